//! A planar comparison-failure exhibit for the weak (one-directional)
//! operator definitions.
//!
//! The construction lives inside the unit disc Ω. A compact convex set S —
//! a smoothed triangle whose boundary is six circular arcs meeting
//! tangentially — sits well inside Ω. Nonnegative exterior data f is
//! supported on three annular sectors far outside Ω, one behind each
//! corner of S, placed so that every line normal to ∂S passes through the
//! region where f = 1.
//!
//! Two facts are then certified numerically:
//!
//! * the zero function (extended by f outside Ω) satisfies both weak
//!   one-directional conditions: the "sub" side holds because the data is
//!   nonnegative, and the "super" side holds because through every point
//!   of Ω there is a full line missing supp f entirely;
//! * for small ε > 0 the ramp function u_ε = ε·φ_ρ(d(x, ∂S)) — zero
//!   outside S, ε on the ρ-eroded core — is a strict classical
//!   subsolution: along its gradient direction the line always crosses
//!   {f = 1}, producing an order-one positive contribution that dominates
//!   the O(ε) local terms.
//!
//! Together these defeat any comparison principle for the weak
//! definitions: u_ε > 0 = u on S although both are subsolutions for the
//! same exterior data and u is a full weak solution.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Growth, ScalarField, C11};
use crate::geom;
use crate::operator::{
    ifl_eval, ifl_eval_weak, second_difference_integral, Exponent, QuadratureConfig, WeakSide,
};

/// Largest |φ'| of the quintic smoothstep on [0, 1].
const SSTEP_D1_MAX: f64 = 1.875;
/// Largest |φ''| of the quintic smoothstep on [0, 1] (= 10/√3).
const SSTEP_D2_MAX: f64 = 5.773_502_691_896_258;

/// Quintic smoothstep: 0 for t ≤ 0, 1 for t ≥ 1, 6t⁵−15t⁴+10t³ between.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

/// Derivative of [`smoothstep`].
pub fn smoothstep_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Parameters of the exhibit geometry. All lengths are absolute; the
/// construction is validated by [`build_geometry`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryParams {
    /// Distance of the three corner centers from the origin.
    pub circumradius: f64,
    /// Radius of the small corner arcs.
    pub corner_radius: f64,
    /// Inner radius of the data annulus (must exceed 1: data outside Ω).
    pub annulus_inner: f64,
    /// Outer radius of the data annulus.
    pub annulus_outer: f64,
    /// Ramp width of the data bumps (f = 1 at depth ≥ 2δ, 0 at depth ≤ δ).
    pub delta: f64,
    /// Ramp width of the subsolution profile φ_ρ.
    pub rho: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        GeometryParams {
            circumradius: 0.5,
            corner_radius: 0.1,
            annulus_inner: 1.2,
            annulus_outer: 2.0,
            delta: 0.05,
            rho: 0.05,
        }
    }
}

/// One circular boundary arc. The body S lies locally inside the circle,
/// so the inward signed distance contribution is `radius − |x − center|`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryArc {
    pub center: [f64; 2],
    pub radius: f64,
    /// Polar angle (about `center`) of the arc midpoint.
    pub mid_angle: f64,
    /// Angular half-width of the arc.
    pub half_width: f64,
}

impl BoundaryArc {
    /// Nearest point of the arc to `x` and the distance to it.
    pub fn nearest(&self, x: &[f64]) -> ([f64; 2], f64) {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        let dev = wrap_angle(dy.atan2(dx) - self.mid_angle);
        let a = self.mid_angle + dev.clamp(-self.half_width, self.half_width);
        let p = [
            self.center[0] + self.radius * a.cos(),
            self.center[1] + self.radius * a.sin(),
        ];
        let d = ((x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2)).sqrt();
        (p, d)
    }

    /// Endpoint at the signed angular offset `±half_width`.
    fn endpoint(&self, sign: f64) -> [f64; 2] {
        let a = self.mid_angle + sign * self.half_width;
        [
            self.center[0] + self.radius * a.cos(),
            self.center[1] + self.radius * a.sin(),
        ]
    }
}

/// The audited exhibit geometry: the smoothed triangle S, its boundary
/// arcs, and the three data sectors.
#[derive(Debug, Clone, Serialize)]
pub struct TriangleGeometry {
    pub params: GeometryParams,
    /// Corner centers (also the centers of all six boundary arcs).
    pub vertices: [[f64; 2]; 3],
    /// Distance between corner centers.
    pub side: f64,
    /// Radius of the three far-side arcs (= side + corner_radius).
    pub side_radius: f64,
    /// Six boundary arcs: indices 0..3 far sides, 3..6 corner caps.
    pub arcs: Vec<BoundaryArc>,
    /// Polar angles of the data-sector axes (the corner directions).
    pub sector_axes: [f64; 3],
    /// Worst junction mismatch (position + tangent) over all six junctions.
    pub tangency_residual: f64,
    /// Worst margin, over sampled boundary normals, by which the normal
    /// line penetrates the {f = 1} core of its data sector.
    pub normal_line_margin: f64,
    /// Inner radius of S (largest inscribed disc about the incenter).
    pub inradius: f64,
}

/// Constructs and audits the exhibit geometry.
///
/// The boundary of S consists of three far-side arcs of radius
/// `side + corner_radius` and three corner caps of radius `corner_radius`,
/// every one centered at a corner center; adjacent arcs share tangents at
/// their junctions by construction, and the residual is audited. The data
/// sectors are the π/3 sectors behind each corner intersected with the
/// annulus.
pub fn build_geometry(params: GeometryParams) -> Result<TriangleGeometry> {
    let p = &params;
    if !(p.circumradius > 0.0 && p.corner_radius > 0.0) {
        return Err(Error::ParameterViolation(format!(
            "circumradius and corner_radius must be positive, got {} and {}",
            p.circumradius, p.corner_radius
        )));
    }
    if !(p.annulus_inner > 1.0 && p.annulus_outer > p.annulus_inner) {
        return Err(Error::GeometryInfeasible(format!(
            "data annulus [{}, {}] must lie outside the closed unit disc with inner < outer",
            p.annulus_inner, p.annulus_outer
        )));
    }
    if !(p.delta > 0.0 && 6.0 * p.delta < p.annulus_outer - p.annulus_inner) {
        return Err(Error::GeometryInfeasible(format!(
            "data ramp width delta = {} leaves no core in an annulus of width {}",
            p.delta,
            p.annulus_outer - p.annulus_inner
        )));
    }
    if p.circumradius + p.corner_radius >= 1.0 - 1e-6 {
        return Err(Error::GeometryInfeasible(format!(
            "the body S reaches radius {} and must stay inside the unit disc",
            p.circumradius + p.corner_radius
        )));
    }

    let axes = [
        FRAC_PI_2,
        FRAC_PI_2 + 2.0 * PI / 3.0,
        FRAC_PI_2 + 4.0 * PI / 3.0,
    ];
    let vertices: [[f64; 2]; 3] = [
        [p.circumradius * axes[0].cos(), p.circumradius * axes[0].sin()],
        [p.circumradius * axes[1].cos(), p.circumradius * axes[1].sin()],
        [p.circumradius * axes[2].cos(), p.circumradius * axes[2].sin()],
    ];
    let side = ((vertices[0][0] - vertices[1][0]).powi(2)
        + (vertices[0][1] - vertices[1][1]).powi(2))
    .sqrt();
    let side_radius = side + p.corner_radius;

    let mut arcs = Vec::with_capacity(6);
    // Far-side arcs: centered at corner k, spanning the 60° fan through the
    // opposite side (the fan bisector points from the corner through the
    // origin).
    for k in 0..3 {
        arcs.push(BoundaryArc {
            center: vertices[k],
            radius: side_radius,
            mid_angle: wrap_angle(axes[k] + PI),
            half_width: FRAC_PI_6,
        });
    }
    // Corner caps: centered at corner k, spanning the outward 60° fan.
    for k in 0..3 {
        arcs.push(BoundaryArc {
            center: vertices[k],
            radius: p.corner_radius,
            mid_angle: axes[k],
            half_width: FRAC_PI_6,
        });
    }

    // Junction audit: each far-side arc meets the caps of the other two
    // corners; positions and tangent directions must agree.
    let mut tangency_residual: f64 = 0.0;
    for k in 0..3 {
        for (sign, j) in [(1.0, (k + 2) % 3), (-1.0, (k + 1) % 3)] {
            // Endpoints ordered by angle: mid+half leans toward the corner
            // reached by rotating +120° twice (checked numerically below).
            let e_side = arcs[k].endpoint(sign);
            // The cap of corner j meets this side arc at the endpoint whose
            // angular position about v_j points along v_j − v_k.
            let dirx = vertices[j][0] - vertices[k][0];
            let diry = vertices[j][1] - vertices[k][1];
            let n = (dirx * dirx + diry * diry).sqrt();
            let expect = [
                vertices[j][0] + p.corner_radius * dirx / n,
                vertices[j][1] + p.corner_radius * diry / n,
            ];
            let pos_res = ((e_side[0] - expect[0]).powi(2) + (e_side[1] - expect[1]).powi(2))
                .sqrt();
            // Tangency: radial directions from both centers must be parallel
            // at the junction.
            let r1 = [e_side[0] - vertices[k][0], e_side[1] - vertices[k][1]];
            let r2 = [e_side[0] - vertices[j][0], e_side[1] - vertices[j][1]];
            let n1 = (r1[0] * r1[0] + r1[1] * r1[1]).sqrt();
            let n2 = (r2[0] * r2[0] + r2[1] * r2[1]).sqrt();
            let cross = (r1[0] * r2[1] - r1[1] * r2[0]).abs() / (n1 * n2);
            tangency_residual = tangency_residual.max(pos_res).max(cross);
        }
    }
    if tangency_residual > 1e-8 {
        return Err(Error::GeometryInfeasible(format!(
            "boundary arcs fail to meet tangentially: residual {tangency_residual:.3e}"
        )));
    }

    let inradius = p.corner_radius + side * (1.0 - 1.0 / 3.0_f64.sqrt());
    let mut geom = TriangleGeometry {
        params,
        vertices,
        side,
        side_radius,
        arcs,
        sector_axes: axes,
        tangency_residual,
        normal_line_margin: 0.0,
        inradius,
    };

    // Normal-line audit: every line normal to ∂S is a line through a corner
    // center whose direction lies in the 60° fan around that corner's axis;
    // each such line must cross the {f = 1} core (depth ≥ 2δ) of the
    // corner's data sector with a positive margin.
    let mut worst = f64::INFINITY;
    let n_dirs = 121;
    for k in 0..3 {
        for i in 0..n_dirs {
            let t = i as f64 / (n_dirs - 1) as f64;
            let ang = geom.sector_axes[k] - FRAC_PI_6 + t * (2.0 * FRAC_PI_6);
            let y = [ang.cos(), ang.sin()];
            let (depth, _) = max_sector_depth_on_line(&geom, k, &geom.vertices[k], &y);
            worst = worst.min(depth - 2.0 * geom.params.delta);
        }
    }
    geom.normal_line_margin = worst;
    if worst < 5e-3 {
        return Err(Error::GeometryInfeasible(format!(
            "boundary-normal lines do not reach the data cores: margin {worst:.3e}"
        )));
    }
    Ok(geom)
}

impl TriangleGeometry {
    /// Signed distance to ∂S: positive inside S, negative outside, together
    /// with the nearest boundary point.
    pub fn signed_distance_detailed(&self, x: &[f64]) -> (f64, [f64; 2]) {
        let mut best = f64::INFINITY;
        let mut nearest = [0.0, 0.0];
        for arc in &self.arcs {
            let (p, d) = arc.nearest(x);
            if d < best {
                best = d;
                nearest = p;
            }
        }
        let sd = if self.contains(x) { best } else { -best };
        (sd, nearest)
    }

    /// Signed distance to ∂S (positive inside).
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        self.signed_distance_detailed(x).0
    }

    /// Membership in the closed body S.
    pub fn contains(&self, x: &[f64]) -> bool {
        // S is the corner_radius-neighborhood of the lens-triangle T whose
        // three arcs have radius `side` about the corners.
        let mut dmax: f64 = 0.0;
        for v in &self.vertices {
            let d = ((x[0] - v[0]).powi(2) + (x[1] - v[1]).powi(2)).sqrt();
            dmax = dmax.max(d);
        }
        if dmax <= self.side {
            return true;
        }
        // Outside T: distance to T is the smallest distance to its arcs
        // (arc endpoints are the corners, so clamping covers them).
        let mut dt = f64::INFINITY;
        for k in 0..3 {
            let arc = BoundaryArc {
                center: self.vertices[k],
                radius: self.side,
                mid_angle: wrap_angle(self.sector_axes[k] + PI),
                half_width: FRAC_PI_6,
            };
            let (_, d) = arc.nearest(x);
            dt = dt.min(d);
        }
        dt <= self.params.corner_radius
    }

    /// Signed depth of `x` inside the data sector `k` (annulus ∩ π/3 sector
    /// behind corner k): positive inside, −distance outside.
    pub fn sector_depth(&self, x: &[f64], k: usize) -> f64 {
        let (r1, r2) = (self.params.annulus_inner, self.params.annulus_outer);
        let axis = self.sector_axes[k];
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let dev = wrap_angle(x[1].atan2(x[0]) - axis);
        let inside = r >= r1 && r <= r2 && dev.abs() <= FRAC_PI_6;

        let mut d = f64::INFINITY;
        // Bounding arcs at radii r1 and r2.
        for radius in [r1, r2] {
            let arc = BoundaryArc {
                center: [0.0, 0.0],
                radius,
                mid_angle: axis,
                half_width: FRAC_PI_6,
            };
            let (_, di) = arc.nearest(x);
            d = d.min(di);
        }
        // Radial side segments at dev = ±π/6.
        for sgn in [-1.0, 1.0] {
            let a = axis + sgn * FRAC_PI_6;
            let (ca, sa) = (a.cos(), a.sin());
            // Project onto the segment {t·(ca,sa) : t ∈ [r1, r2]}.
            let t = (x[0] * ca + x[1] * sa).clamp(r1, r2);
            let di = ((x[0] - t * ca).powi(2) + (x[1] - t * sa).powi(2)).sqrt();
            d = d.min(di);
        }
        if inside {
            d
        } else {
            -d
        }
    }

    /// The exterior data value: sum of the three sector bumps, each ramping
    /// from 0 at depth δ to 1 at depth 2δ.
    pub fn data_value(&self, x: &[f64]) -> f64 {
        let delta = self.params.delta;
        let mut f = 0.0;
        for k in 0..3 {
            f += smoothstep((self.sector_depth(x, k) - delta) / delta);
        }
        f
    }

    /// Polyline rows for external plotting: boundary arcs, sector outlines,
    /// data cores, and corner centers, each labeled.
    pub fn figure_rows(&self, n_per_piece: usize) -> Vec<(String, f64, f64)> {
        let n = n_per_piece.max(2);
        let mut rows = Vec::new();
        for (i, arc) in self.arcs.iter().enumerate() {
            let label = if i < 3 {
                format!("side_arc_{i}")
            } else {
                format!("corner_cap_{}", i - 3)
            };
            for j in 0..n {
                let t = j as f64 / (n - 1) as f64;
                let a = arc.mid_angle + (2.0 * t - 1.0) * arc.half_width;
                rows.push((
                    label.clone(),
                    arc.center[0] + arc.radius * a.cos(),
                    arc.center[1] + arc.radius * a.sin(),
                ));
            }
        }
        let (r1, r2) = (self.params.annulus_inner, self.params.annulus_outer);
        for k in 0..3 {
            for (tag, inset) in [("sector", 0.0), ("core", 2.0 * self.params.delta)] {
                let label = format!("{tag}_{k}");
                let lo = r1 + inset;
                let hi = r2 - inset;
                let half = |r: f64| {
                    if inset == 0.0 {
                        FRAC_PI_6
                    } else {
                        FRAC_PI_6 - (inset / r).asin()
                    }
                };
                // Trace the closed outline: inner arc, side, outer arc, side.
                let mut pts = Vec::new();
                for j in 0..n {
                    let t = j as f64 / (n - 1) as f64;
                    let a = self.sector_axes[k] + (2.0 * t - 1.0) * half(lo);
                    pts.push((lo * a.cos(), lo * a.sin()));
                }
                for j in 0..n {
                    let t = j as f64 / (n - 1) as f64;
                    let r = lo + t * (hi - lo);
                    let a = self.sector_axes[k] + half(r);
                    pts.push((r * a.cos(), r * a.sin()));
                }
                for j in 0..n {
                    let t = j as f64 / (n - 1) as f64;
                    let a = self.sector_axes[k] + (1.0 - 2.0 * t) * half(hi);
                    pts.push((hi * a.cos(), hi * a.sin()));
                }
                for j in 0..n {
                    let t = j as f64 / (n - 1) as f64;
                    let r = hi - t * (hi - lo);
                    let a = self.sector_axes[k] - half(r);
                    pts.push((r * a.cos(), r * a.sin()));
                }
                for (px, py) in pts {
                    rows.push((label.clone(), px, py));
                }
            }
        }
        for (k, v) in self.vertices.iter().enumerate() {
            rows.push((format!("corner_{k}"), v[0], v[1]));
        }
        rows
    }
}

/// Largest signed depth of the line {x + t·y} inside data sector `k`,
/// together with the maximizing parameter t. Sound to within ~1e-6 via the
/// 1-Lipschitz property of the signed depth.
fn max_sector_depth_on_line(
    geom: &TriangleGeometry,
    k: usize,
    x: &[f64],
    y: &[f64],
) -> (f64, f64) {
    let r2 = geom.params.annulus_outer;
    let xy = x[0] * y[0] + x[1] * y[1];
    let xx = x[0] * x[0] + x[1] * x[1];
    let reach = r2 + 0.05;
    let disc = reach * reach - (xx - xy * xy);
    if disc <= 0.0 {
        // The whole line stays outside the outer disc.
        let x_perp = (xx - xy * xy).max(0.0).sqrt();
        return (-(x_perp - r2), -xy);
    }
    let w = disc.sqrt();
    let (t_lo, t_hi) = (-xy - w, -xy + w);
    let dt = 0.02;
    let steps = ((t_hi - t_lo) / dt).ceil() as usize;
    let depth_at = |t: f64| geom.sector_depth(&[x[0] + t * y[0], x[1] + t * y[1]], k);
    let mut vals = Vec::with_capacity(steps + 1);
    let mut best = f64::NEG_INFINITY;
    let mut best_t = t_lo;
    for i in 0..=steps {
        let t = t_lo + (t_hi - t_lo) * i as f64 / steps as f64;
        let v = depth_at(t);
        if v > best {
            best = v;
            best_t = t;
        }
        vals.push((t, v));
    }
    let h = (t_hi - t_lo) / steps as f64;
    for i in 0..steps {
        let (ta, va) = vals[i];
        let (tb, vb) = vals[i + 1];
        // Lipschitz upper bound for the max inside the interval.
        if 0.5 * (va + vb + h) > best + 1e-7 {
            let mut f = |t: f64| depth_at(t);
            let (tm, vm) = geom::golden_max(&mut f, ta, tb, 40);
            if vm > best {
                best = vm;
                best_t = tm;
            }
        }
    }
    // Final polish around the incumbent.
    let mut f = |t: f64| depth_at(t);
    let (tm, vm) = geom::golden_max(&mut f, best_t - h, best_t + h, 48);
    if vm > best {
        best = vm;
        best_t = tm;
    }
    (best, best_t)
}

/// Builds the exterior data field f: nonnegative, C^{1,1} on the whole
/// plane, identically 0 on a neighborhood of the closed unit disc, and
/// equal to 1 on the core of each data sector. Re-audits that every
/// boundary-normal line crosses {f = 1}.
pub fn build_data_f(geom: &TriangleGeometry) -> Result<ScalarField> {
    let delta = geom.params.delta;
    let (r1, r2) = (geom.params.annulus_inner, geom.params.annulus_outer);
    // Re-audit against the actual field: the deepest point of each sampled
    // normal line must carry f = 1.
    let n_dirs = 61;
    for k in 0..3 {
        for i in 0..n_dirs {
            let t = i as f64 / (n_dirs - 1) as f64;
            let ang = geom.sector_axes[k] - FRAC_PI_6 + t * (2.0 * FRAC_PI_6);
            let y = [ang.cos(), ang.sin()];
            let (_, t_star) = max_sector_depth_on_line(geom, k, &geom.vertices[k], &y);
            let p = [
                geom.vertices[k][0] + t_star * y[0],
                geom.vertices[k][1] + t_star * y[1],
            ];
            let fv = geom.data_value(&p);
            if fv < 1.0 - 1e-9 {
                return Err(Error::AuditFailure(format!(
                    "normal line through corner {k} at angle {ang:.4} misses the data core: \
                     deepest point {p:?} has f = {fv:.6}"
                )));
            }
        }
    }

    let g_eval = geom.clone();
    let g_grad = geom.clone();
    // Global curvature bound for f: ramp + level-set curvature of the
    // sector depth (radius ≥ r1 wherever the ramp is active).
    let m_f = SSTEP_D2_MAX / (delta * delta) + SSTEP_D1_MAX / (delta * r1.min(1.0));
    Ok(
        ScalarField::new(2, Growth::Bounded { c0: 1.0 }, move |x| {
            g_eval.data_value(x)
        })
        .with_grad(move |x: &[f64]| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            // Flat outside the active ramp band.
            if !(r1 + 0.5 * delta..=r2 - 0.5 * delta).contains(&r) {
                return vec![0.0, 0.0];
            }
            // Central differences; the field is C^{1,1} so this is safe.
            let h = 1e-6;
            vec![
                (g_grad.data_value(&[x[0] + h, x[1]]) - g_grad.data_value(&[x[0] - h, x[1]]))
                    / (2.0 * h),
                (g_grad.data_value(&[x[0], x[1] + h]) - g_grad.data_value(&[x[0], x[1] - h]))
                    / (2.0 * h),
            ]
        })
        .with_c11(move |x: &[f64]| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if r < r1 + delta {
                // Identically zero on this disc.
                return Some(C11 {
                    m: 0.0,
                    eta0: (r1 + delta - r).max(1e-9),
                });
            }
            if r > r2 - delta {
                return Some(C11 {
                    m: 0.0,
                    eta0: (r - (r2 - delta)).max(1e-9),
                });
            }
            Some(C11 { m: m_f, eta0: 1.0 })
        }),
    )
}

/// The ramp subsolution u_ε = ε·φ_ρ(d(x, ∂S)): zero outside S, ε on the
/// ρ-eroded core, with analytic gradient along the inward boundary normal.
///
/// Fails with `RegularityFailure` when ρ is too large for the corner
/// curvature (the profile must stay C^{1,1}), or when sampled second
/// differences exceed the certified budget.
pub fn build_subsolution(geom: &TriangleGeometry, rho: f64, eps: f64) -> Result<ScalarField> {
    if !(rho > 0.0 && eps >= 0.0) {
        return Err(Error::ParameterViolation(format!(
            "need rho > 0 and eps >= 0, got rho = {rho}, eps = {eps}"
        )));
    }
    let r_corner = geom.params.corner_radius;
    if rho > 0.5 * r_corner {
        return Err(Error::RegularityFailure(format!(
            "ramp width rho = {rho} exceeds half the corner radius {r_corner}: \
             the profile is not C^{{1,1}} with a usable budget"
        )));
    }
    if geom.inradius < 0.25 {
        return Err(Error::RegularityFailure(format!(
            "body inradius {} too small for the ramp certificates",
            geom.inradius
        )));
    }
    // |D²u| ≤ ε(φ''_max/ρ² + φ'_max·κ/ρ) with the level-set curvature
    // κ ≤ 1/(r_corner − ρ) on the active ramp.
    let m_ramp = eps * (SSTEP_D2_MAX / (rho * rho) + SSTEP_D1_MAX / (rho * (r_corner - rho)));

    let g_eval = geom.clone();
    let g_grad = geom.clone();
    let g_c11 = geom.clone();
    let field = ScalarField::new(2, Growth::Bounded { c0: eps.max(1e-300) }, move |x| {
        eps * smoothstep(g_eval.signed_distance(x) / rho)
    })
    .with_grad(move |x: &[f64]| {
        let (sd, p) = g_grad.signed_distance_detailed(x);
        let d1 = smoothstep_deriv(sd / rho);
        if d1 == 0.0 {
            return vec![0.0, 0.0];
        }
        let dx = x[0] - p[0];
        let dy = x[1] - p[1];
        let n = (dx * dx + dy * dy).sqrt();
        let c = eps * d1 / (rho * n);
        vec![c * dx, c * dy]
    })
    .with_c11(move |x: &[f64]| {
        let sd = g_c11.signed_distance(x);
        if sd >= rho + 0.02 {
            Some(C11 {
                m: 0.0,
                eta0: sd - rho,
            })
        } else if sd <= -0.02 {
            Some(C11 { m: 0.0, eta0: -sd })
        } else {
            // The profile is globally C^{1,1} with constant m_ramp: the
            // active ramp {0 < sd < ρ} is clear of all distance-function
            // kinks because ρ < corner_radius < inradius.
            Some(C11 {
                m: m_ramp,
                eta0: 10.0,
            })
        }
    });

    // Regularity audit: sampled symmetric second differences on the ramp
    // collar must respect the certified budget.
    if eps > 0.0 {
        let budget = m_ramp * 1.000_001 + 1e-12;
        for (i, arc) in geom.arcs.iter().enumerate() {
            for j in 0..5 {
                let a = arc.mid_angle + (j as f64 / 4.0 - 0.5) * 1.6 * arc.half_width;
                let bp = [
                    arc.center[0] + arc.radius * a.cos(),
                    arc.center[1] + arc.radius * a.sin(),
                ];
                // Inward normal: toward the arc center.
                let nx = (arc.center[0] - bp[0]) / arc.radius;
                let ny = (arc.center[1] - bp[1]) / arc.radius;
                for frac in [0.25, 0.5, 0.75] {
                    let x0 = [bp[0] + frac * rho * nx, bp[1] + frac * rho * ny];
                    for (ex, ey) in [(1.0, 0.0), (0.0, 1.0), (0.707, 0.707), (nx, ny)] {
                        for h in [1e-3, 3e-3, 1e-2] {
                            let xp = [x0[0] + h * ex, x0[1] + h * ey];
                            let xm = [x0[0] - h * ex, x0[1] - h * ey];
                            let d2 = field.eval(&xp) + field.eval(&xm) - 2.0 * field.eval(&x0);
                            if d2.abs() > budget * h * h * (ex * ex + ey * ey) {
                                return Err(Error::RegularityFailure(format!(
                                    "second difference {:.3e} exceeds budget {:.3e} at \
                                     arc {i} sample {x0:?} (h = {h})",
                                    d2.abs(),
                                    budget * h * h
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(field)
}

/// Sampling / certification configuration shared by both certificates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyConfig {
    /// Samples in Ω for the zero-solution certificate.
    pub n_samples: usize,
    /// Samples in S for the subsolution certificate.
    pub n_sub_samples: usize,
    /// Angular resolution of the free-line direction grid.
    pub k_dir: usize,
    /// RNG seed (all sampling is deterministic given the seed).
    pub seed: u64,
    /// Certificate tolerance for the weak/strong residuals.
    pub tol: f64,
    /// Bisection steps for the largest certified ε.
    pub bisect_steps: usize,
    /// Quadrature settings for all operator evaluations.
    pub quad: QuadratureConfig,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            n_samples: 200,
            n_sub_samples: 32,
            k_dir: 720,
            seed: 7,
            tol: 1e-3,
            bisect_steps: 20,
            quad: QuadratureConfig::default(),
        }
    }
}

/// Per-sample verdict of the zero-solution certificate.
#[derive(Debug, Clone, Serialize)]
pub struct SampleVerdict {
    pub point: Vec<f64>,
    /// Certified free direction (unit vector), when one was found.
    pub direction: Option<Vec<f64>>,
    /// Distance margin between the free line and supp f, minus the angular
    /// thickening; positive means robustly free.
    pub clearance: f64,
    /// Weak "sub" value (sup over directions of the symmetric integral).
    pub sub_value: f64,
    /// Symmetric integral along the certified free direction (bounds the
    /// weak "super" value from above).
    pub free_value: f64,
    pub err_est: f64,
    pub certified: bool,
    /// Whether the direction grid had to be refined for this sample.
    pub refined: bool,
}

/// Report of the zero-solution certificate.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroCertReport {
    pub samples: usize,
    pub certified: usize,
    pub k_dir: usize,
    /// Smallest robust clearance over all certified samples.
    pub worst_clearance: f64,
    /// Smallest weak-sub value (should be ≥ −tol; typically strictly > 0).
    pub worst_sub_value: f64,
    /// Largest free-direction value (should be ≤ tol).
    pub worst_free_value: f64,
    pub refined_samples: usize,
    pub per_sample: Vec<SampleVerdict>,
}

/// Searches for a robustly free direction through `x`: a unit vector whose
/// full line clears the support of f by more than the angular thickening
/// of the direction grid. Returns (direction, clearance).
fn find_free_direction(
    geom: &TriangleGeometry,
    x: &[f64],
    k_dir: usize,
) -> (Option<[f64; 2]>, f64) {
    let delta = geom.params.delta;
    let thick = (1.0 + geom.params.annulus_outer) * PI / k_dir as f64;
    let clearance_of = |y: &[f64; 2]| -> f64 {
        let mut clear = f64::INFINITY;
        for k in 0..3 {
            let (depth, _) = max_sector_depth_on_line(geom, k, x, y);
            clear = clear.min(delta - depth);
        }
        clear - thick
    };
    // The three side-parallel directions, most promising first: the line
    // through x perpendicular to the corner axis of largest x-alignment
    // passes between the sectors with margin ≈ δ.
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let pa = x[0] * geom.sector_axes[a].cos() + x[1] * geom.sector_axes[a].sin();
        let pb = x[0] * geom.sector_axes[b].cos() + x[1] * geom.sector_axes[b].sin();
        pb.partial_cmp(&pa).unwrap()
    });
    for k in order {
        let a = geom.sector_axes[k] + FRAC_PI_2;
        let y = [a.cos(), a.sin()];
        let c = clearance_of(&y);
        if c > 0.0 {
            return (Some(y), c);
        }
    }
    // Fall back to the uniform grid over the half-circle.
    let mut best = f64::NEG_INFINITY;
    let mut best_dir = None;
    for j in 0..k_dir {
        let a = j as f64 * PI / k_dir as f64;
        let y = [a.cos(), a.sin()];
        let c = clearance_of(&y);
        if c > best {
            best = c;
            best_dir = Some(y);
        }
        if c > 0.0 {
            return (Some(y), c);
        }
    }
    (if best > 0.0 { best_dir } else { None }, best)
}

/// Certifies one sample of the zero-solution certificate. The sample must
/// lie strictly inside the unit disc.
pub fn certify_zero_at(
    geom: &TriangleGeometry,
    f: &ScalarField,
    x: &[f64],
    s: Exponent,
    cfg: &CertifyConfig,
) -> Result<SampleVerdict> {
    if x.len() != 2 || x[0] * x[0] + x[1] * x[1] >= 1.0 {
        return Err(Error::ParameterViolation(format!(
            "certificate samples must lie inside the unit disc, got {x:?}"
        )));
    }
    let (mut dir, mut clearance) = find_free_direction(geom, x, cfg.k_dir);
    let mut refined = false;
    if dir.is_none() {
        // Refine the direction set before giving up.
        refined = true;
        let (d2, c2) = find_free_direction(geom, x, cfg.k_dir * 4);
        dir = d2;
        clearance = c2;
    }

    // Weak "sub" side: the scanned sup of symmetric integrals must be ≥ −tol
    // (the data is nonnegative, so every direction integrates ≥ 0).
    let sub = ifl_eval_weak(f, x, s, &cfg.quad, WeakSide::Sub)?;

    // Weak "super" side: along the certified free direction the symmetric
    // integral vanishes, so the directional inf is ≤ tol.
    let (free_value, free_err) = match dir {
        Some(y) => {
            let r = second_difference_integral(f, x, &[y[0], y[1]], s, &cfg.quad)?;
            (r.value, r.err_est)
        }
        None => (f64::INFINITY, 0.0),
    };

    let certified = dir.is_some()
        && clearance > 0.0
        && sub.value >= -(cfg.tol + sub.err_est)
        && free_value <= cfg.tol + free_err;
    Ok(SampleVerdict {
        point: x.to_vec(),
        direction: dir.map(|y| vec![y[0], y[1]]),
        clearance,
        sub_value: sub.value,
        free_value,
        err_est: sub.err_est.max(free_err),
        certified,
        refined,
    })
}

/// Certifies that u ≡ 0, extended by the data f outside Ω, satisfies both
/// weak one-directional conditions at `n_samples` random points of Ω.
pub fn certify_zero_weak_solution(
    geom: &TriangleGeometry,
    f: &ScalarField,
    s: Exponent,
    cfg: &CertifyConfig,
) -> Result<ZeroCertReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::with_capacity(cfg.n_samples);
    while samples.len() < cfg.n_samples {
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if x[0] * x[0] + x[1] * x[1] < 0.998 {
            samples.push(vec![x[0], x[1]]);
        }
    }
    let verdicts: Vec<Result<SampleVerdict>> = samples
        .par_iter()
        .map(|x| certify_zero_at(geom, f, x, s, cfg))
        .collect();
    let mut per_sample = Vec::with_capacity(verdicts.len());
    for v in verdicts {
        per_sample.push(v?);
    }
    let certified = per_sample.iter().filter(|v| v.certified).count();
    if certified < per_sample.len() {
        let witness = per_sample
            .iter()
            .find(|v| !v.certified)
            .map(|v| v.point.clone())
            .unwrap_or_default();
        return Err(Error::CertificationFailure {
            failed: per_sample.len() - certified,
            total: per_sample.len(),
            witness,
        });
    }
    let worst_clearance = per_sample
        .iter()
        .map(|v| v.clearance)
        .fold(f64::INFINITY, f64::min);
    let worst_sub_value = per_sample
        .iter()
        .map(|v| v.sub_value)
        .fold(f64::INFINITY, f64::min);
    let worst_free_value = per_sample
        .iter()
        .map(|v| v.free_value)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ZeroCertReport {
        samples: per_sample.len(),
        certified,
        k_dir: cfg.k_dir,
        worst_clearance,
        worst_sub_value,
        worst_free_value,
        refined_samples: per_sample.iter().filter(|v| v.refined).count(),
        per_sample,
    })
}

/// One strong-residual evaluation of the patched field u_ε + f.
#[derive(Debug, Clone, Serialize)]
pub struct SubResidual {
    pub point: Vec<f64>,
    pub value: f64,
    pub err_est: f64,
    pub branch: String,
}

/// Report of the positive-subsolution certificate.
#[derive(Debug, Clone, Serialize)]
pub struct SubsolutionReport {
    /// Largest certified ε (0 only if certification failed).
    pub eps_max: f64,
    /// Bisection cap: 10⁻² of the smallest pure-data contribution.
    pub eps_cap: f64,
    /// Smallest pure-data operator value over the samples (ε → 0 margin).
    pub data_floor: f64,
    pub samples: usize,
    /// Smallest residual over the samples at eps_max.
    pub worst_residual: f64,
    pub tol: f64,
    pub bisect_steps: usize,
    pub residuals: Vec<SubResidual>,
}

/// The candidate subsolution patched with the exterior data: the two have
/// disjoint supports, so the patch is a plain sum.
fn patched_field(
    geom: &TriangleGeometry,
    u_eps: &ScalarField,
    f: &ScalarField,
    eps: f64,
) -> ScalarField {
    let u = u_eps.clone();
    let f_eval = f.clone();
    let u_g = u_eps.clone();
    let u_c = u_eps.clone();
    let f_c = f.clone();
    let r1 = geom.params.annulus_inner;
    let delta = geom.params.delta;
    ScalarField::new(2, Growth::Bounded { c0: 1.0 + eps }, move |x| {
        u.eval(x) + f_eval.eval(x)
    })
    .with_grad(move |x: &[f64]| u_g.gradient(x, 1e-6))
    .with_c11(move |x: &[f64]| {
        let cu = u_c.c11_at(x)?;
        let cf = f_c.c11_at(x)?;
        // Keep the certificate ball clear of the data region so the u
        // branch constants stay valid on their own.
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let gap = (r1 + delta - r).max(1e-9);
        Some(C11 {
            m: cu.m + cf.m,
            eta0: cu.eta0.min(cf.eta0).min(gap),
        })
    })
}

/// Deterministic interior samples of S: seeded rejection sampling plus two
/// constructed probes (the incenter and a mid-ramp point with a nonzero
/// gradient).
fn subsolution_samples(geom: &TriangleGeometry, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5u64);
    let reach = geom.params.circumradius + geom.params.corner_radius;
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 2);
    pts.push(vec![0.0, 0.0]);
    // Mid-ramp probe on the first far-side arc.
    let arc = &geom.arcs[0];
    let a = arc.mid_angle;
    let bp = [
        arc.center[0] + arc.radius * a.cos(),
        arc.center[1] + arc.radius * a.sin(),
    ];
    let nx = (arc.center[0] - bp[0]) / arc.radius;
    let ny = (arc.center[1] - bp[1]) / arc.radius;
    let half_rho = 0.5 * geom.params.rho;
    pts.push(vec![bp[0] + half_rho * nx, bp[1] + half_rho * ny]);
    while pts.len() < n + 2 {
        let x = [
            rng.gen_range(-reach..reach),
            rng.gen_range(-reach..reach),
        ];
        if geom.signed_distance(&x) > 1e-3 {
            pts.push(vec![x[0], x[1]]);
        }
    }
    pts
}

/// Evaluates the strong residual Δ-value of u_ε + f at each sample.
pub fn subsolution_residuals(
    geom: &TriangleGeometry,
    f: &ScalarField,
    s: Exponent,
    eps: f64,
    rho: f64,
    samples: &[Vec<f64>],
    quad: &QuadratureConfig,
) -> Result<Vec<SubResidual>> {
    let u = build_subsolution(geom, rho, eps)?;
    let w = patched_field(geom, &u, f, eps);
    let out: Vec<Result<SubResidual>> = samples
        .par_iter()
        .map(|x| {
            let r = ifl_eval(&w, x, s, quad)?;
            Ok(SubResidual {
                point: x.clone(),
                value: r.value,
                err_est: r.err_est,
                branch: format!("{:?}", r.branch),
            })
        })
        .collect();
    let mut v = Vec::with_capacity(out.len());
    for r in out {
        v.push(r?);
    }
    Ok(v)
}

/// Finds by bisection the largest ε ≤ ε_cap for which u_ε is a certified
/// strict subsolution at every sample: residual ≥ −(tol + err) pointwise.
/// The builder is called once per tested ε.
pub fn certify_positive_subsolution<B>(
    geom: &TriangleGeometry,
    builder: B,
    f: &ScalarField,
    s: Exponent,
    cfg: &CertifyConfig,
) -> Result<(f64, SubsolutionReport)>
where
    B: Fn(f64) -> Result<ScalarField>,
{
    let samples = subsolution_samples(geom, cfg.n_sub_samples, cfg.seed);

    // ε → 0 margin: the operator applied to the pure data extension. Its
    // smallest value over the samples caps the bisection range.
    let data_res: Vec<Result<f64>> = samples
        .par_iter()
        .map(|x| Ok(ifl_eval(f, x, s, &cfg.quad)?.value))
        .collect();
    let mut data_floor = f64::INFINITY;
    for r in data_res {
        data_floor = data_floor.min(r?);
    }
    if data_floor <= cfg.tol {
        return Err(Error::AuditFailure(format!(
            "pure-data operator floor {data_floor:.3e} is not safely positive; \
             the geometry audit should have prevented this"
        )));
    }
    let eps_cap = 1e-2 * data_floor;

    let evaluate = |eps: f64| -> Result<(bool, f64, Vec<SubResidual>)> {
        let u = builder(eps)?;
        let w = patched_field(geom, &u, f, eps);
        let rs: Vec<Result<SubResidual>> = samples
            .par_iter()
            .map(|x| {
                let r = ifl_eval(&w, x, s, &cfg.quad)?;
                Ok(SubResidual {
                    point: x.clone(),
                    value: r.value,
                    err_est: r.err_est,
                    branch: format!("{:?}", r.branch),
                })
            })
            .collect();
        let mut out = Vec::with_capacity(rs.len());
        let mut ok = true;
        let mut worst = f64::INFINITY;
        for r in rs {
            let r = r?;
            if r.value < -(cfg.tol + r.err_est) {
                ok = false;
            }
            worst = worst.min(r.value);
            out.push(r);
        }
        Ok((ok, worst, out))
    };

    let floor_eps = eps_cap / 2.0_f64.powi(20);
    let (cap_ok, cap_worst, cap_res) = evaluate(eps_cap)?;
    let (eps_max, worst, residuals) = if cap_ok {
        (eps_cap, cap_worst, cap_res)
    } else {
        let (floor_ok, _, _) = evaluate(floor_eps)?;
        if !floor_ok {
            return Err(Error::NoPositiveEpsilon(format!(
                "residuals stay below −tol even at eps = {floor_eps:.3e} \
                 (cap {eps_cap:.3e}); the geometry or audit is inconsistent"
            )));
        }
        let mut lo = floor_eps;
        let mut hi = eps_cap;
        let mut best: Option<(f64, f64, Vec<SubResidual>)> = None;
        for _ in 0..cfg.bisect_steps {
            let mid = 0.5 * (lo + hi);
            let (ok, w, r) = evaluate(mid)?;
            if ok {
                lo = mid;
                best = Some((mid, w, r));
            } else {
                hi = mid;
            }
        }
        match best {
            Some((e, w, r)) => (e, w, r),
            None => {
                let (_, w, r) = evaluate(floor_eps)?;
                (floor_eps, w, r)
            }
        }
    };

    let report = SubsolutionReport {
        eps_max,
        eps_cap,
        data_floor,
        samples: samples.len(),
        worst_residual: worst,
        tol: cfg.tol,
        bisect_steps: cfg.bisect_steps,
        residuals,
    };
    Ok((eps_max, report))
}

/// The joint comparison-failure exhibit: both certificates together with
/// the facts that tie them into a counterexample.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonExhibit {
    /// Certified ε: u_ε is a strict subsolution at this amplitude.
    pub eps_max: f64,
    /// min over core samples of u_ε — strictly positive separation from 0.
    pub strict_gap: f64,
    /// Zero-solution certificate summary.
    pub zero: ZeroCertReport,
    /// Subsolution certificate summary.
    pub subsolution: SubsolutionReport,
    /// Both candidates use the same exterior data (true by construction).
    pub shared_exterior_data: bool,
}

/// Runs both certificates with shared data and geometry.
pub fn comparison_exhibit(
    geom: &TriangleGeometry,
    s: Exponent,
    cfg: &CertifyConfig,
) -> Result<ComparisonExhibit> {
    let f = build_data_f(geom)?;
    let zero = certify_zero_weak_solution(geom, &f, s, cfg)?;
    let rho = geom.params.rho;
    let (eps_max, subsolution) =
        certify_positive_subsolution(geom, |e| build_subsolution(geom, rho, e), &f, s, cfg)?;
    let u = build_subsolution(geom, rho, eps_max)?;
    // Strict positivity on the eroded core.
    let mut strict_gap = f64::INFINITY;
    for x in subsolution_samples(geom, 16, cfg.seed) {
        if geom.signed_distance(&x) > rho {
            strict_gap = strict_gap.min(u.eval(&x));
        }
    }
    Ok(ComparisonExhibit {
        eps_max,
        strict_gap,
        zero,
        subsolution,
        shared_exterior_data: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn geom() -> TriangleGeometry {
        build_geometry(GeometryParams::default()).unwrap()
    }

    #[test]
    fn construction_is_tangent_and_feasible() {
        let g = geom();
        assert!(g.tangency_residual < 1e-10, "{}", g.tangency_residual);
        assert!(g.normal_line_margin > 5e-3, "{}", g.normal_line_margin);
        assert_relative_eq!(g.side, 0.5 * 3.0_f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(g.side_radius, g.side + 0.1, max_relative = 1e-12);
    }

    #[test]
    fn signed_distance_matches_closed_forms() {
        let g = geom();
        // Origin: the inradius, r_corner + side(1 − 1/√3).
        let expect = 0.1 + g.side * (1.0 - 1.0 / 3.0_f64.sqrt());
        assert_relative_eq!(g.signed_distance(&[0.0, 0.0]), expect, epsilon = 1e-12);
        // A corner center sits at depth corner_radius.
        let v = g.vertices[0];
        assert_relative_eq!(g.signed_distance(&v), 0.1, epsilon = 1e-12);
        // Far outside: distance to the cap of the nearest corner.
        let far = [0.0, 0.9];
        let d = g.signed_distance(&far);
        assert!(d < 0.0);
        assert_relative_eq!(-d, 0.9 - (0.5 + 0.1), epsilon = 1e-9);
    }

    #[test]
    fn membership_agrees_with_signed_distance() {
        let g = geom();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let x = [rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)];
            let sd = g.signed_distance(&x);
            if sd.abs() > 1e-9 {
                assert_eq!(g.contains(&x), sd > 0.0, "at {x:?}, sd = {sd}");
            }
        }
    }

    #[test]
    fn geometry_is_threefold_symmetric() {
        let g = geom();
        let rot = geom::Rotation::plane(2, 0, 1, 2.0 * PI / 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = vec![rng.gen_range(-2.2..2.2), rng.gen_range(-2.2..2.2)];
            let rx = rot.apply(&x);
            assert_relative_eq!(
                g.signed_distance(&x),
                g.signed_distance(&rx),
                epsilon = 1e-9
            );
            assert_relative_eq!(g.data_value(&x), g.data_value(&rx), epsilon = 1e-9);
        }
    }

    #[test]
    fn sector_depth_matches_axis_formula() {
        let g = geom();
        // On the sector axis the depth is min of the radial gaps and the
        // side-line distance r·sin(π/6).
        for r in [1.25, 1.5, 1.9] {
            let x = [r * g.sector_axes[0].cos(), r * g.sector_axes[0].sin()];
            let expect = (r - 1.2_f64).min(2.0 - r).min(r * FRAC_PI_6.sin());
            assert_relative_eq!(g.sector_depth(&x, 0), expect, epsilon = 1e-12);
        }
        // Outside: on the axis below the annulus.
        let x = [1.0 * g.sector_axes[0].cos(), 1.0 * g.sector_axes[0].sin()];
        assert_relative_eq!(g.sector_depth(&x, 0), -0.2, epsilon = 1e-12);
    }

    #[test]
    fn data_is_zero_on_disc_and_one_on_cores() {
        let g = geom();
        let f = build_data_f(&g).unwrap();
        for a in 0..12 {
            let t = a as f64 * PI / 6.0;
            assert_eq!(f.eval(&[t.cos() * 0.999, t.sin() * 0.999]), 0.0);
            assert_eq!(f.eval(&[t.cos() * 1.2, t.sin() * 1.2]), 0.0);
        }
        for k in 0..3 {
            let r = 0.5 * (1.2 + 2.0);
            let x = [r * g.sector_axes[k].cos(), r * g.sector_axes[k].sin()];
            assert_relative_eq!(f.eval(&x), 1.0, epsilon = 1e-12);
        }
        // Bounded by 1 and nonnegative everywhere sampled.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let x = [rng.gen_range(-2.2..2.2), rng.gen_range(-2.2..2.2)];
            let v = f.eval(&x);
            assert!((0.0..=1.0 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn subsolution_profile_and_gradient() {
        let g = geom();
        let eps = 1e-3;
        let u = build_subsolution(&g, 0.05, eps).unwrap();
        // ε on the eroded core, 0 outside S.
        assert_relative_eq!(u.eval(&[0.0, 0.0]), eps, epsilon = 1e-15);
        assert_eq!(u.eval(&[0.9, 0.0]), 0.0);
        // Mid-ramp: gradient matches finite differences and points along
        // the inward arc normal.
        let arc = &g.arcs[0];
        let a = arc.mid_angle + 0.1;
        let bp = [
            arc.center[0] + arc.radius * a.cos(),
            arc.center[1] + arc.radius * a.sin(),
        ];
        let n = [
            (arc.center[0] - bp[0]) / arc.radius,
            (arc.center[1] - bp[1]) / arc.radius,
        ];
        let x = [bp[0] + 0.025 * n[0], bp[1] + 0.025 * n[1]];
        let ga = u.gradient(&x, 1e-6);
        let h = 1e-6;
        let gn = [
            (u.eval(&[x[0] + h, x[1]]) - u.eval(&[x[0] - h, x[1]])) / (2.0 * h),
            (u.eval(&[x[0], x[1] + h]) - u.eval(&[x[0], x[1] - h])) / (2.0 * h),
        ];
        let norm = (ga[0] * ga[0] + ga[1] * ga[1]).sqrt();
        assert!(norm > 0.0);
        assert!((ga[0] - gn[0]).abs() < 1e-6 * (1.0 + norm));
        assert!((ga[1] - gn[1]).abs() < 1e-6 * (1.0 + norm));
        let align = (ga[0] * n[0] + ga[1] * n[1]) / norm;
        assert_relative_eq!(align, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn subsolution_rejects_oversized_ramp() {
        let g = geom();
        match build_subsolution(&g, 0.09, 1e-3) {
            Err(Error::RegularityFailure(_)) => {}
            other => panic!("expected RegularityFailure, got {other:?}"),
        }
    }

    #[test]
    fn free_direction_exists_at_center_and_near_boundary() {
        let g = geom();
        let (dir, clear) = find_free_direction(&g, &[0.0, 0.0], 720);
        let y = dir.expect("center must have a free line");
        assert!(clear > 0.02, "clearance {clear}");
        // The certified direction is one of the side-parallel lines.
        let mut ok = false;
        for k in 0..3 {
            let a = g.sector_axes[k] + FRAC_PI_2;
            let d = (y[0] * a.cos() + y[1] * a.sin()).abs();
            if d > 1.0 - 1e-9 {
                ok = true;
            }
        }
        assert!(ok, "direction {y:?} is not side-parallel");
        for t in 0..12 {
            let ang = t as f64 * PI / 6.0 + 0.05;
            let x = [0.97 * ang.cos(), 0.97 * ang.sin()];
            let (dir, clear) = find_free_direction(&g, &x, 720);
            assert!(dir.is_some() && clear > 0.0, "no free line at {x:?}");
        }
    }

    #[test]
    fn certify_rejects_samples_outside_domain() {
        let g = geom();
        let f = build_data_f(&g).unwrap();
        let s = Exponent::new(0.75).unwrap();
        let cfg = CertifyConfig::default();
        match certify_zero_at(&g, &f, &[1.5, 0.0], s, &cfg) {
            Err(Error::ParameterViolation(_)) => {}
            other => panic!("expected ParameterViolation, got {other:?}"),
        }
    }

    #[test]
    fn verdicts_are_threefold_symmetric() {
        let g = geom();
        let f = build_data_f(&g).unwrap();
        let s = Exponent::new(0.75).unwrap();
        let mut cfg = CertifyConfig::default();
        cfg.quad.tol = 1e-3;
        let rot = geom::Rotation::plane(2, 0, 1, 2.0 * PI / 3.0);
        for x in [vec![0.31, 0.12], vec![-0.44, 0.25]] {
            let v1 = certify_zero_at(&g, &f, &x, s, &cfg).unwrap();
            let v2 = certify_zero_at(&g, &f, &rot.apply(&x), s, &cfg).unwrap();
            assert!(v1.certified && v2.certified);
            assert_relative_eq!(v1.clearance, v2.clearance, epsilon = 1e-6);
            assert_relative_eq!(v1.sub_value, v2.sub_value, max_relative = 2e-2);
        }
    }

    #[test]
    fn figure_rows_cover_all_pieces() {
        let g = geom();
        let rows = g.figure_rows(16);
        for tag in [
            "side_arc_0",
            "corner_cap_2",
            "sector_1",
            "core_0",
            "corner_1",
        ] {
            assert!(rows.iter().any(|(l, _, _)| l == tag), "missing {tag}");
        }
    }
}
