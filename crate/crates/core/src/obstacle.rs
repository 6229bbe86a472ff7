//! Double-obstacle problem between two cone-monotone profiles pinned to 0
//! far left and 1 far right along the first axis.
//!
//! The pair carries analytic assumption constants (Lipschitz bound, strict
//! and far-field slope bounds, touching-paraboloid openings and decay
//! exponent), all of which are auditable numerically.  The solver is a
//! projected monotone value iteration clamped between the obstacles; the
//! post-verification checks the one-sided operator inequalities on the free
//! and semi-free regions.  Companion measurements: coincidence radius,
//! Lipschitz constant against the two-cone bound, detachment rate at the
//! contact boundary, and the shifted-slope (sigma) sets with their band
//! radius.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirichlet::{
    post_tolerance, regression_slope, table_interpolant, BarrierSide, ConeSpec,
    MonotonicityReport,
};
use crate::error::{Error, Result};
use crate::field::{self, Growth, ScalarField, C11};
use crate::game::{dpp_directions, dpp_sweep, Kernel, KernelConfig};
use crate::geom;
use crate::grid::{GridSpec, ValueTable};
use crate::operator::{ifl_eval, Exponent, QuadratureConfig};

/// Which obstacle a contact statement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactSide {
    /// The upper profile (1 everywhere except far left, where it decays to 0).
    Upper,
    /// The lower profile (0 everywhere except far right, where it rises to 1).
    Lower,
}

/// Obstacle pair 0 <= lower < upper <= 1, monotone along a cone about e1,
/// with polynomially controlled tails and touching paraboloids.
#[derive(Clone, Debug)]
pub struct ObstaclePair {
    /// Upper profile.
    pub upper: ScalarField,
    /// Lower profile.
    pub lower: ScalarField,
    /// Tail power of the upper profile on the left axis.
    pub gamma_upper: f64,
    /// Tail power of (1 - lower profile) on the right axis.
    pub gamma_lower: f64,
    /// Common Lipschitz constant of both profiles.
    pub lip: f64,
    /// Monotonicity cone half-angle about e1 (strictly below pi/2).
    pub theta: f64,
    /// Touching-paraboloid opening coefficients: the opening at anchor
    /// x is kappa * max(|x_1|, 1)^(-gamma-2) on the matching tail.
    pub kappa_upper: f64,
    pub kappa_lower: f64,
    /// Plateau constant of the paraboloid assumptions, in (0, 1).
    pub rho0: f64,
    /// Anchors with |x_1| > m0 satisfy the paraboloid inequalities.
    pub m0: f64,
}

/// The model pair: upper = min(|x_1|^(-g_up), 1) for x_1 <= -1 (else 1),
/// lower = max(1 - x_1^(-g_lo), 0) for x_1 >= 1 (else 0).  Both depend on
/// the first coordinate only, so they are monotone in every direction of
/// the open half-space about e1; all assumption constants are analytic.
///
/// Panics when a power is not positive or dim == 0 (caller contract).
pub fn model_obstacles(gamma_upper: f64, gamma_lower: f64, dim: usize) -> ObstaclePair {
    assert!(
        gamma_upper > 0.0 && gamma_lower > 0.0,
        "decay powers must be positive"
    );
    assert!(dim >= 1, "dimension must be at least 1");
    let upper = model_profile(ContactSide::Upper, gamma_upper, dim);
    let lower = model_profile(ContactSide::Lower, gamma_lower, dim);
    // rho0 fixed at 1/2; the plateau radius where the paraboloid
    // assumptions hold follows from
    //   t^(-g) * (3g+2) / (2(g+1)) < rho0.
    let rho0 = 0.5;
    let m0_of = |g: f64| ((3.0 * g + 2.0) / (2.0 * (g + 1.0) * rho0)).powf(1.0 / g);
    let m0 = m0_of(gamma_upper).max(m0_of(gamma_lower)).max(1.5);
    ObstaclePair {
        upper,
        lower,
        gamma_upper,
        gamma_lower,
        lip: gamma_upper.max(gamma_lower),
        // x1-only profiles are monotone in the whole open half-space;
        // stay strictly inside it so the cone geometry is well posed.
        theta: std::f64::consts::FRAC_PI_2 * (1.0 - 1e-9),
        kappa_upper: 0.5 * gamma_upper * (gamma_upper + 1.0),
        kappa_lower: 0.5 * gamma_lower * (gamma_lower + 1.0),
        rho0,
        m0,
    }
}

/// One model profile with analytic gradient and curvature certificate
/// away from its kink at |x_1| = 1.
fn model_profile(side: ContactSide, g: f64, dim: usize) -> ScalarField {
    // Both profiles are functions of t = sign * x_1 with a flat zone
    // t < 1 and a power tail for t >= 1:
    //   Upper: value(t) = t^(-g) on the tail (t = -x_1), flat value 1;
    //   Lower: value(t) = 1 - t^(-g) on the tail (t = +x_1), flat value 0.
    let sign = match side {
        ContactSide::Upper => -1.0,
        ContactSide::Lower => 1.0,
    };
    let eval = move |x: &[f64]| -> f64 {
        let t = sign * x[0];
        match side {
            ContactSide::Upper => {
                if t >= 1.0 {
                    t.powf(-g)
                } else {
                    1.0
                }
            }
            ContactSide::Lower => {
                if t >= 1.0 {
                    1.0 - t.powf(-g)
                } else {
                    0.0
                }
            }
        }
    };
    let grad = move |x: &[f64]| -> Vec<f64> {
        let t = sign * x[0];
        let mut out = vec![0.0; x.len()];
        if t > 1.0 {
            // d/dx1 of t^(-g) with t = -x1 is +g t^(-g-1); of 1 - t^(-g)
            // with t = +x1 it is also +g t^(-g-1): both profiles rise
            // along +e1.
            out[0] = g * t.powf(-g - 1.0);
        }
        out
    };
    let c11 = move |x: &[f64]| -> Option<C11> {
        let t = sign * x[0];
        let d_kink = (t - 1.0).abs();
        if d_kink <= 1e-12 {
            return None;
        }
        if t < 1.0 {
            // Flat zone: exactly polynomial until the kink.
            Some(C11 { m: 0.0, eta0: d_kink })
        } else {
            // Power tail: |value''| = g(g+1) t^(-g-2), maximized over the
            // ball of radius eta0 at its inner edge.
            let eta0 = 0.5 * d_kink;
            let m = g * (g + 1.0) * (t - eta0).powf(-g - 2.0);
            Some(C11 { m, eta0 })
        }
    };
    ScalarField::new(dim, Growth::Bounded { c0: 1.0 }, eval)
        .with_grad(grad)
        .with_c11(c11)
}

impl ObstaclePair {
    /// Profile field for one side.
    pub fn profile(&self, side: ContactSide) -> &ScalarField {
        match side {
            ContactSide::Upper => &self.upper,
            ContactSide::Lower => &self.lower,
        }
    }

    /// Tail power for one side.
    pub fn gamma(&self, side: ContactSide) -> f64 {
        match side {
            ContactSide::Upper => self.gamma_upper,
            ContactSide::Lower => self.gamma_lower,
        }
    }

    /// Strict-slope lower bound along e1 on the strict zones
    /// {upper < 1} resp. {lower > 0} intersected with {|x_1| <= m}
    /// (infinite when the zones are empty, i.e. m <= 1).
    pub fn strict_slope_bound(&self, m: f64) -> f64 {
        if m <= 1.0 {
            return f64::INFINITY;
        }
        let a = self.gamma_upper * m.powf(-self.gamma_upper - 1.0);
        let b = self.gamma_lower * m.powf(-self.gamma_lower - 1.0);
        a.min(b)
    }

    /// Far-field slope bound: sup over the band {m < |x_1| < 2m} of the
    /// summed profile slopes.  Tends to 0 as m grows.
    pub fn band_slope_bound(&self, m: f64) -> f64 {
        let one = |g: f64| -> f64 {
            if m >= 1.0 {
                g * m.powf(-g - 1.0)
            } else if 2.0 * m > 1.0 {
                // The band straddles the kink; the steepest point is at
                // |x_1| = 1 where the slope is g.
                g
            } else {
                0.0
            }
        };
        one(self.gamma_upper) + one(self.gamma_lower)
    }

    /// Decay exponent of the paraboloid bound: with the model openings the
    /// side quantity A^s (gap + |grad|^2/(4A))^(1-s) scales like
    /// |x_1|^-(gamma + 2s).  The constraint for coincidence near infinity
    /// is alpha_decay > 2s, i.e. gamma > 0.
    pub fn alpha_decay(&self, s: Exponent) -> f64 {
        self.gamma_upper.min(self.gamma_lower) + s.two_s()
    }

    /// Touching-paraboloid opening at first coordinate x1 for one side.
    pub fn opening(&self, x1: f64, side: ContactSide) -> f64 {
        let (kappa, g) = match side {
            ContactSide::Upper => (self.kappa_upper, self.gamma_upper),
            ContactSide::Lower => (self.kappa_lower, self.gamma_lower),
        };
        kappa * x1.abs().max(1.0).powf(-g - 2.0)
    }

    /// The paraboloid touching the profile at `anchor`: from below for the
    /// upper profile (opening downward), from above for the lower profile
    /// (opening upward).
    pub fn touching_paraboloid(&self, anchor: &[f64], side: ContactSide) -> ScalarField {
        let profile = self.profile(side);
        let v0 = profile.eval(anchor);
        let g = profile.gradient(anchor, 1e-6);
        let a = self.opening(anchor[0], side);
        let quad = match side {
            ContactSide::Upper => a,
            ContactSide::Lower => -a,
        };
        field::paraboloid(anchor.to_vec(), g, vec![quad; anchor.len()], v0)
    }

    /// Gap + slope-head quantity of the paraboloid assumptions at an
    /// anchor: upper side uses upper(x) + |grad|^2/(4A); lower side uses
    /// 1 - lower(x) + |grad|^2/(4A).
    pub fn plateau_head(&self, anchor: &[f64], side: ContactSide) -> f64 {
        let profile = self.profile(side);
        let gap = match side {
            ContactSide::Upper => profile.eval(anchor),
            ContactSide::Lower => 1.0 - profile.eval(anchor),
        };
        let grad = profile.gradient(anchor, 1e-6);
        let a = self.opening(anchor[0], side);
        gap + geom::dot(&grad, &grad) / (4.0 * a)
    }

    /// The barrier-side bound A^s * head^(1-s) whose decay in |x_1| drives
    /// coincidence near infinity.
    pub fn paraboloid_bound(&self, anchor: &[f64], side: ContactSide, s: Exponent) -> f64 {
        let a = self.opening(anchor[0], side);
        a.powf(s.s()) * self.plateau_head(anchor, side).powf(1.0 - s.s())
    }

    /// Calibrated coincidence threshold: the smallest anchor depth beyond
    /// which the barrier's positive plateau term dominates the paraboloid
    /// penalty, so the cut-paraboloid barriers are admissible.  Scanned on
    /// a geometric ladder; conservative (an upper bound for the true
    /// threshold of the construction).
    pub fn coincidence_threshold(&self, s: Exponent) -> f64 {
        let c_theta = self.theta.sin();
        // Plateau radius: beyond it the opposite profile is within
        // (1 - rho0)/2 of its limit.
        let plat = |g: f64| (2.0 / (1.0 - self.rho0)).powf(1.0 / g);
        let m_plat = plat(self.gamma_upper).max(plat(self.gamma_lower));
        let c_parab = 1.0 / (s.s() * (1.0 - s.s()));
        let lhs = |t: f64| {
            (1.0 - self.rho0) / (4.0 * s.s()) * (c_theta / (m_plat + t)).powf(s.two_s())
        };
        let start = self.m0.max(m_plat).max(2.0);
        let mut t = start;
        // March a geometric ladder; accept the first depth from which the
        // plateau term dominates with a factor-2 safety margin at every
        // probe up to 10^4 times deeper.
        for _ in 0..400 {
            let mut ok = true;
            let mut probe = t;
            while probe <= t * 1e4 {
                for side in [ContactSide::Upper, ContactSide::Lower] {
                    let sgn = match side {
                        ContactSide::Upper => -1.0,
                        ContactSide::Lower => 1.0,
                    };
                    let mut x = vec![0.0; self.upper.dim];
                    x[0] = sgn * probe;
                    if lhs(probe) < 2.0 * c_parab * self.paraboloid_bound(&x, side, s) {
                        ok = false;
                    }
                }
                if !ok {
                    break;
                }
                probe *= 1.5;
            }
            if ok {
                return t;
            }
            t *= 1.1;
        }
        t
    }
}

/// Assumption audit outcome: each structural inequality with pass/fail and
/// its worst witness.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionAudit {
    /// 0 <= lower < upper <= 1 at all samples.
    pub ordered: bool,
    /// upper -> 0 left, lower -> 1 right (tail smallness at the window edge).
    pub limits_ok: bool,
    /// Strict monotonicity along e1 at the analytic bound on the strict zones.
    pub strict_bound_ok: bool,
    /// Far-field band slope within the analytic bound.
    pub band_bound_ok: bool,
    /// Touching: paraboloids stay on the correct side of their profile.
    pub touching_ok: bool,
    /// Plateau inequalities head < rho0 at anchors beyond m0.
    pub plateau_ok: bool,
    /// Fitted decay exponent of the paraboloid bound.
    pub alpha_fit: f64,
    /// Analytic decay exponent min(gamma) + 2s.
    pub alpha_analytic: f64,
    /// alpha_decay > 2s with the fitted exponent honoring the analytic one.
    pub alpha_pass: bool,
    /// Worst plateau head observed beyond m0.
    pub worst_head: f64,
    /// Worst ordering margin min(upper - lower).
    pub min_gap: f64,
    /// Witness of the worst touching violation (empty when touching_ok).
    pub touching_witness: Vec<f64>,
    pub pass: bool,
}

/// Numerical audit of the structural assumptions on a window
/// |x_1| <= window, sampled along the axis.
pub fn audit_assumptions(
    pair: &ObstaclePair,
    s: Exponent,
    window: f64,
    samples: usize,
) -> AssumptionAudit {
    let dim = pair.upper.dim;
    let n = samples.max(16);
    let axis_point = |x1: f64| -> Vec<f64> {
        let mut x = vec![0.0; dim];
        x[0] = x1;
        x
    };

    let mut ordered = true;
    let mut min_gap = f64::INFINITY;
    for i in 0..=n {
        let x1 = -window + 2.0 * window * i as f64 / n as f64;
        let x = axis_point(x1);
        let lo = pair.lower.eval(&x);
        let hi = pair.upper.eval(&x);
        min_gap = min_gap.min(hi - lo);
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            ordered = false;
        }
    }

    let limits_ok = pair.upper.eval(&axis_point(-window)) <= window.powf(-pair.gamma_upper) + 1e-12
        && 1.0 - pair.lower.eval(&axis_point(window)) <= window.powf(-pair.gamma_lower) + 1e-12;

    // Strict monotonicity: e1-pairs inside the strict zones at several
    // depths against the analytic bound.
    let mut strict_bound_ok = true;
    for k in 1..=8 {
        let m = 1.0 + (window - 1.0) * k as f64 / 8.0;
        let bound = pair.strict_slope_bound(m);
        if !bound.is_finite() {
            continue;
        }
        for j in 0..8 {
            let t = 1.0 + (m - 1.0) * (j as f64 + 0.5) / 8.0;
            let r = 0.25 * (m - 1.0) / 8.0;
            for sgn in [-1.0, 1.0] {
                let hi_x = axis_point(sgn * t + r);
                let lo_x = axis_point(sgn * t - r);
                if hi_x[0].abs() > m || lo_x[0].abs() > m || hi_x[0].abs() < 1.0 || lo_x[0].abs() < 1.0 {
                    continue;
                }
                let profile = if sgn < 0.0 { &pair.upper } else { &pair.lower };
                let q = (profile.eval(&hi_x) - profile.eval(&lo_x)) / (2.0 * r);
                if q < bound * (1.0 - 1e-9) {
                    strict_bound_ok = false;
                }
            }
        }
    }

    // Far-field band bound.
    let mut band_bound_ok = true;
    for k in 1..=6 {
        let m = 1.0 + (0.45 * window - 1.0).max(0.0) * k as f64 / 6.0;
        let bound = pair.band_slope_bound(m);
        for j in 0..12 {
            let t = m + m * (j as f64 + 0.5) / 12.0;
            let r = 0.02 * m;
            for sgn in [-1.0, 1.0] {
                let a = axis_point(sgn * t - r);
                let b = axis_point(sgn * t + r);
                if a[0].abs() <= m || a[0].abs() >= 2.0 * m || b[0].abs() <= m || b[0].abs() >= 2.0 * m
                {
                    continue;
                }
                let q = ((pair.upper.eval(&b) - pair.upper.eval(&a)).abs()
                    + (pair.lower.eval(&b) - pair.lower.eval(&a)).abs())
                    / (2.0 * r);
                if q > bound * (1.0 + 1e-9) {
                    band_bound_ok = false;
                }
            }
        }
    }

    // Touching + plateau inequalities at anchors beyond m0, and the decay
    // fit of the paraboloid bound.
    let mut touching_ok = true;
    let mut plateau_ok = true;
    let mut worst_head: f64 = 0.0;
    let mut touching_witness = Vec::new();
    let mut ln_t = Vec::new();
    let mut ln_q = Vec::new();
    let deep = (10.0 * window).max(10.0 * pair.m0);
    for k in 0..24 {
        let t = pair.m0 * 1.05 * (deep / (pair.m0 * 1.05)).powf(k as f64 / 23.0);
        let mut q_worst: f64 = 0.0;
        for side in [ContactSide::Upper, ContactSide::Lower] {
            let sgn = match side {
                ContactSide::Upper => -1.0,
                ContactSide::Lower => 1.0,
            };
            let anchor = axis_point(sgn * t);
            let head = pair.plateau_head(&anchor, side);
            worst_head = worst_head.max(head);
            if head >= pair.rho0 {
                plateau_ok = false;
            }
            q_worst = q_worst.max(pair.paraboloid_bound(&anchor, side, s));
            // Touching on a probe ladder around the anchor (both axis
            // directions, several scales).
            let parab = pair.touching_paraboloid(&anchor, side);
            let profile = pair.profile(side);
            for j in 1..=12 {
                let r = t * j as f64 / 6.0;
                for sgn_r in [-1.0, 1.0] {
                    let x = axis_point(anchor[0] + sgn_r * r);
                    let p = parab.eval(&x);
                    let v = profile.eval(&x);
                    let bad = match side {
                        ContactSide::Upper => p > v + 1e-12,
                        ContactSide::Lower => p < v - 1e-12,
                    };
                    if bad && touching_witness.is_empty() {
                        touching_ok = false;
                        touching_witness = x.clone();
                    } else if bad {
                        touching_ok = false;
                    }
                }
            }
        }
        ln_t.push(t.ln());
        ln_q.push(q_worst.max(1e-300).ln());
    }
    let alpha_fit = -regression_slope(&ln_t, &ln_q);
    let alpha_analytic = pair.alpha_decay(s);
    let alpha_pass =
        alpha_fit > s.two_s() && (alpha_fit - alpha_analytic).abs() <= 0.2 * alpha_analytic;

    let pass = ordered
        && limits_ok
        && strict_bound_ok
        && band_bound_ok
        && touching_ok
        && plateau_ok
        && alpha_pass;
    AssumptionAudit {
        ordered,
        limits_ok,
        strict_bound_ok,
        band_bound_ok,
        touching_ok,
        plateau_ok,
        alpha_fit,
        alpha_analytic,
        alpha_pass,
        worst_head,
        min_gap,
        touching_witness,
        pass,
    }
}

/// One seeded paraboloid patch of a barrier envelope.
#[derive(Clone)]
struct PatchSeed {
    anchor: Vec<f64>,
    v0: f64,
    g: Vec<f64>,
    a: f64,
}

/// Cone-restricted paraboloid envelope over/under a base profile.  For the
/// sub side the field is max(base, max over seeds of (p ∨ 0) on the +e1
/// cone from the seed); for the super side min(base, min of (p ∧ 1) on the
/// -e1 cone).  The envelope is upper (resp. lower) semicontinuous: patches
/// switch on across their cone boundary.
#[derive(Clone)]
struct PatchEnvelope {
    base: ScalarField,
    seeds: Vec<PatchSeed>,
    side: BarrierSide,
    theta: f64,
    base_lip: f64,
}

impl PatchEnvelope {
    fn cone_sign(&self) -> f64 {
        match self.side {
            BarrierSide::Sub => 1.0,
            BarrierSide::Super => -1.0,
        }
    }

    /// Distance from `c` to the closed circular cone about sign*e1 with
    /// half-angle theta, and the projection residual c - P(c) (which is
    /// the gradient of dist^2 / 2; the projection onto a convex cone is
    /// firmly nonexpansive, so the residual is 1-Lipschitz in c).
    fn cone_defect(&self, c: &[f64]) -> (f64, Vec<f64>) {
        let sgn = self.cone_sign();
        let c1 = sgn * c[0];
        let mut rho2 = 0.0;
        for ck in &c[1..] {
            rho2 += ck * ck;
        }
        let rho = rho2.sqrt();
        let norm = (c1 * c1 + rho2).sqrt();
        let (ct, st) = (self.theta.cos(), self.theta.sin());
        if norm == 0.0 || c1 >= norm * ct {
            return (0.0, vec![0.0; c.len()]); // inside the cone
        }
        let t = c1 * ct + rho * st;
        if t <= 0.0 {
            // the apex is the nearest point
            return (norm, c.to_vec());
        }
        // nearest point on the boundary ray, in the (axis, transverse) plane
        let d = rho * ct - c1 * st;
        let mut diff = vec![0.0; c.len()];
        diff[0] = sgn * (c1 - t * ct);
        for k in 1..c.len() {
            diff[k] = c[k] * (1.0 - t * st / rho);
        }
        (d, diff)
    }

    /// Per-seed sheet: the extremum of the seed paraboloid over all its
    /// translates along the monotonicity cone,
    ///   sub:   sup_{D in C+} p(x - D) = peak - a dist^2(c, C+),
    ///   super: inf_{D in C-} p(x - D) = trough + a dist^2(c, C-),
    /// where c = (x - anchor) -/+ g/(2a).  Continuous, C^{1,1} with
    /// curvature bound 2a, monotone along the cone axis.
    fn sheet(&self, i: usize, x: &[f64]) -> (f64, Vec<f64>, f64) {
        let sd = &self.seeds[i];
        let a = sd.a.max(1e-300);
        let mut c = vec![0.0; x.len()];
        let mut g2 = 0.0;
        for k in 0..x.len() {
            let shift = sd.g[k] / (2.0 * a);
            c[k] = x[k] - sd.anchor[k]
                - match self.side {
                    BarrierSide::Sub => shift,
                    BarrierSide::Super => -shift,
                };
            g2 += sd.g[k] * sd.g[k];
        }
        let (dist, diff) = self.cone_defect(&c);
        match self.side {
            BarrierSide::Sub => {
                let peak = sd.v0 + g2 / (4.0 * a);
                let grad: Vec<f64> = diff.iter().map(|d| -2.0 * a * d).collect();
                (peak - a * dist * dist, grad, dist)
            }
            BarrierSide::Super => {
                let trough = sd.v0 - g2 / (4.0 * a);
                let grad: Vec<f64> = diff.iter().map(|d| 2.0 * a * d).collect();
                (trough + a * dist * dist, grad, dist)
            }
        }
    }

    fn clip(&self, raw: f64) -> f64 {
        match self.side {
            BarrierSide::Sub => raw.max(0.0),
            BarrierSide::Super => raw.min(1.0),
        }
    }

    fn better(&self, candidate: f64, incumbent: f64) -> bool {
        match self.side {
            BarrierSide::Sub => candidate > incumbent,
            BarrierSide::Super => candidate < incumbent,
        }
    }

    /// Envelope value and the active piece (None = base profile).
    fn active(&self, x: &[f64]) -> (f64, Option<usize>) {
        let mut best = self.base.eval(x);
        let mut idx = None;
        for i in 0..self.seeds.len() {
            let v = self.clip(self.sheet(i, x).0);
            if self.better(v, best) {
                best = v;
                idx = Some(i);
            }
        }
        (best, idx)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self.active(x).1 {
            None => self.base.gradient(x, 1e-6),
            Some(i) => self.sheet(i, x).1,
        }
    }

    /// Local regularity certificate: the active sheet is quadratic-capped
    /// with curvature bound 2a; the certificate radius is limited by the
    /// runner-up gap (crease of the max) and by the clip level set.
    fn c11(&self, x: &[f64]) -> Option<C11> {
        let base_val = self.base.eval(x);
        let mut top = base_val;
        let mut top_idx: Option<usize> = None;
        let mut second = f64::NAN;
        let mut top_dist = 0.0;
        for i in 0..self.seeds.len() {
            let (raw, _, dist) = self.sheet(i, x);
            let v = self.clip(raw);
            if self.better(v, top) {
                second = top;
                top = v;
                top_idx = Some(i);
                top_dist = dist;
            } else if second.is_nan() || self.better(v, second) {
                second = v;
            }
        }
        let gap = if second.is_nan() {
            f64::INFINITY
        } else {
            (top - second).abs()
        };
        if gap <= 1e-12 {
            return None;
        }
        // Local Lipschitz bound of all sheets on the unit ball around x.
        let mut lx = self.base_lip;
        for i in 0..self.seeds.len() {
            let (_, _, dist) = self.sheet(i, x);
            lx = lx.max(2.0 * self.seeds[i].a * (dist + 1.0));
        }
        let r_gap = if lx > 0.0 { 0.5 * gap / lx } else { f64::INFINITY };
        match top_idx {
            None => self
                .base
                .c11_at(x)
                .map(|c| C11 {
                    m: c.m,
                    eta0: c.eta0.min(r_gap).min(1.0),
                })
                .filter(|c| c.eta0 > 0.0),
            Some(i) => {
                let sd = &self.seeds[i];
                let lip_sheet = 2.0 * sd.a * (top_dist + 1.0);
                let clip_margin = match self.side {
                    BarrierSide::Sub => top,
                    BarrierSide::Super => 1.0 - top,
                };
                let r_clip = clip_margin / (lip_sheet + 1e-300);
                let eta0 = r_gap.min(r_clip).min(1.0);
                if eta0 > 0.0 {
                    Some(C11 {
                        m: 2.0 * sd.a,
                        eta0,
                    })
                } else {
                    None
                }
            }
        }
    }
}

/// Barrier envelope from touching paraboloids seeded at `seeds`.
///
/// Sub side: seeds must lie beyond the coincidence threshold on the left;
/// the result is the upper-touching patch envelope maxed with the lower
/// profile (a subsolution of the obstacle family).  Super side: mirrored.
/// Empty seed lists return the bare profile.
pub fn obstacle_barriers(
    pair: &ObstaclePair,
    s: Exponent,
    seeds: &[Vec<f64>],
    side: BarrierSide,
) -> Result<ScalarField> {
    let dim = pair.upper.dim;
    if seeds.is_empty() {
        return Ok(match side {
            BarrierSide::Sub => pair.lower.clone(),
            BarrierSide::Super => pair.upper.clone(),
        });
    }
    let m_tilde = pair.coincidence_threshold(s);
    let mut patch_seeds = Vec::with_capacity(seeds.len());
    for anchor in seeds {
        if anchor.len() != dim {
            return Err(Error::ParameterViolation(format!(
                "seed dimension {} does not match obstacle dimension {}",
                anchor.len(),
                dim
            )));
        }
        let ok = match side {
            BarrierSide::Sub => anchor[0] < -m_tilde,
            BarrierSide::Super => anchor[0] > m_tilde,
        };
        if !ok {
            return Err(Error::ParameterViolation(format!(
                "seed first coordinate {} inside the coincidence threshold {:.3}",
                anchor[0], m_tilde
            )));
        }
        let contact = match side {
            BarrierSide::Sub => ContactSide::Upper,
            BarrierSide::Super => ContactSide::Lower,
        };
        let profile = pair.profile(contact);
        patch_seeds.push(PatchSeed {
            anchor: anchor.clone(),
            v0: profile.eval(anchor),
            g: profile.gradient(anchor, 1e-6),
            a: pair.opening(anchor[0], contact),
        });
    }
    let base = match side {
        BarrierSide::Sub => pair.lower.clone(),
        BarrierSide::Super => pair.upper.clone(),
    };
    let env = PatchEnvelope {
        base,
        seeds: patch_seeds,
        side,
        theta: pair.theta,
        base_lip: pair.lip,
    };
    let (e1, e2, e3) = (env.clone(), env.clone(), env);
    Ok(
        ScalarField::new(dim, Growth::Bounded { c0: 1.0 }, move |x| e1.active(x).0)
            .with_grad(move |x: &[f64]| e2.gradient(x))
            .with_c11(move |x: &[f64]| e3.c11(x)),
    )
}

/// Grid and iteration configuration for the obstacle solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObstacleConfig {
    /// Half-width of the first-axis window.
    pub window: f64,
    pub h: f64,
    pub dim: usize,
    /// Period of the transverse axes when dim > 1.
    pub transverse_period: f64,
    /// Step-size scale; None picks h^(2s) per level.
    pub eps: Option<f64>,
    pub tol: f64,
    pub max_sweeps: usize,
    pub k_dir: usize,
    pub multiscale: bool,
    pub post_check: bool,
    pub post_samples: usize,
    pub quad: QuadratureConfig,
}

impl Default for ObstacleConfig {
    fn default() -> Self {
        ObstacleConfig {
            window: 20.0,
            h: 1.0 / 64.0,
            dim: 1,
            transverse_period: 1.0,
            eps: None,
            tol: 1e-6,
            max_sweeps: 200_000,
            k_dir: 16,
            multiscale: true,
            post_check: true,
            post_samples: 48,
            quad: QuadratureConfig {
                tol: 1e-3,
                ..QuadratureConfig::default()
            },
        }
    }
}

/// One-sided residual post-verification summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstaclePostReport {
    pub checked: usize,
    pub skipped_low_gradient: usize,
    pub skipped_unverifiable: usize,
    /// Worst excess below -tol where the solution sits above the lower
    /// obstacle (subsolution side); <= 0 means satisfied.
    pub worst_sub_excess: f64,
    /// Worst excess above +tol where the solution sits below the upper
    /// obstacle (supersolution side); <= 0 means satisfied.
    pub worst_super_excess: f64,
    pub worst_point: Vec<f64>,
    pub tol: f64,
    pub pass: bool,
}

/// Converged obstacle solution with contact flags.
#[derive(Debug, Clone)]
pub struct ObstacleSolution {
    pub table: ValueTable,
    pub s: Exponent,
    pub eps: f64,
    pub sweeps: usize,
    pub tol_iter: f64,
    /// Per-node flags: the solution meets the upper/lower obstacle within
    /// the contact tolerance.
    pub contact_plus: Vec<bool>,
    pub contact_minus: Vec<bool>,
    /// Obstacle values on the grid.
    pub lower_values: Vec<f64>,
    pub upper_values: Vec<f64>,
    pub post: Option<ObstaclePostReport>,
}

impl ObstacleSolution {
    /// Multilinear interpolant with per-cell regularity certificates.
    pub fn interpolant(&self) -> ScalarField {
        table_interpolant(&self.table)
    }

    pub fn free(&self, f: usize) -> bool {
        !self.contact_plus[f] && !self.contact_minus[f]
    }

    /// Contact tolerance at a point for one side: robustly above the
    /// iteration tolerance and the quadratic sag of the local touching
    /// paraboloid over one cell.
    pub fn contact_tolerance(&self, pair: &ObstaclePair, x1: f64, side: ContactSide) -> f64 {
        let h = self.table.spec.h[0];
        (10.0 * self.tol_iter).max(h * h * pair.opening(x1, side))
    }
}

fn obstacle_grid(cfg: &ObstacleConfig) -> Result<GridSpec> {
    let mut lo = vec![-cfg.window];
    let mut hi = vec![cfg.window];
    for _ in 1..cfg.dim {
        lo.push(0.0);
        hi.push(cfg.transverse_period);
    }
    let mut spec = GridSpec::bounded(lo, hi, cfg.h)?;
    for k in 1..cfg.dim {
        spec = spec.with_periodic_axis(k, cfg.transverse_period)?;
    }
    Ok(spec)
}

/// Projected monotone value iteration for the double-obstacle problem:
/// V <- clamp(dpp(V), lower, upper) from V = lower, with the exterior
/// extended by the obstacles themselves (they coincide with the solution
/// near infinity).  Multiscale when enabled; contact flags and one-sided
/// residual verification on the final grid.
pub fn solve_obstacle(
    pair: &ObstaclePair,
    s: Exponent,
    cfg: &ObstacleConfig,
) -> Result<ObstacleSolution> {
    if cfg.dim != pair.upper.dim {
        return Err(Error::ParameterViolation(format!(
            "config dimension {} does not match obstacle dimension {}",
            cfg.dim, pair.upper.dim
        )));
    }
    if !(cfg.window > 2.0) || !(cfg.h > 0.0) || !(cfg.h < cfg.window) {
        return Err(Error::ParameterViolation(
            "need window > 2 and 0 < h < window".into(),
        ));
    }
    let audit = audit_assumptions(pair, s, cfg.window, 64);
    if !audit.pass {
        return Err(Error::AssumptionViolation(format!(
            "obstacle pair failed its assumption audit: {:?}",
            audit
        )));
    }

    // Level ladder: h doubling to a coarse bootstrap, finest last.
    let mut hs = vec![cfg.h];
    if cfg.multiscale {
        let mut h = cfg.h;
        while 2.0 * h < 0.26 && hs.len() < 5 {
            h *= 2.0;
            hs.push(h);
        }
    }
    hs.reverse();

    let lower = pair.lower.clone();
    let upper = pair.upper.clone();
    let exterior: std::sync::Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> = {
        let (lo, hi) = (lower.clone(), upper.clone());
        std::sync::Arc::new(move |x: &[f64]| {
            if x[0] >= 0.0 {
                lo.eval(x)
            } else {
                hi.eval(x)
            }
        })
    };

    let mut table: Option<ValueTable> = None;
    let mut sweeps_total = 0usize;
    for (li, &h_level) in hs.iter().enumerate() {
        let final_level = li + 1 == hs.len();
        let level_cfg = ObstacleConfig { h: h_level, ..cfg.clone() };
        let spec = obstacle_grid(&level_cfg)?;
        let eps = cfg.eps.unwrap_or_else(|| h_level.powf(s.two_s()));
        let init: Box<dyn Fn(&[f64]) -> f64> = match &table {
            None => {
                let lo = lower.clone();
                Box::new(move |x: &[f64]| lo.eval(x))
            }
            Some(prev) => {
                let (prev, lo, hi) = (prev.clone(), lower.clone(), upper.clone());
                Box::new(move |x: &[f64]| prev.eval(x).max(lo.eval(x)).min(hi.eval(x)))
            }
        };
        let mut t = ValueTable::build(spec, |_| true, init, exterior.clone(), eps);
        let kernel = Kernel::build(
            s,
            eps,
            &KernelConfig {
                fine_span: (2.0 * cfg.window).min(4.0),
                fine_width: h_level,
                ..KernelConfig::default()
            },
        )?;
        let dirs = dpp_directions(cfg.dim, cfg.k_dir);
        let level_tol = if final_level {
            cfg.tol
        } else {
            (1e-2 * h_level * h_level).max(cfg.tol)
        };
        let mut converged = false;
        for _ in 0..cfg.max_sweeps {
            let (values, residual) = dpp_sweep(&t, &kernel, &dirs, Some((&lower, &upper)));
            t.values = values;
            t.residuals.push(residual);
            sweeps_total += 1;
            if residual < level_tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                residual: *t.residuals.last().unwrap_or(&f64::INFINITY),
                tol: level_tol,
                sweeps: t.residuals.len(),
            });
        }
        table = Some(t);
    }
    let table = table.expect("at least one level solved");

    // Contact flags on the final grid.
    let len = table.spec.len();
    let mut lower_values = vec![0.0; len];
    let mut upper_values = vec![0.0; len];
    let mut contact_plus = vec![false; len];
    let mut contact_minus = vec![false; len];
    let h = table.spec.h[0];
    for f in 0..len {
        let x = table.spec.point_of_flat(f);
        lower_values[f] = lower.eval(&x);
        upper_values[f] = upper.eval(&x);
        let tol_minus =
            (10.0 * cfg.tol).max(h * h * pair.opening(x[0], ContactSide::Lower));
        let tol_plus = (10.0 * cfg.tol).max(h * h * pair.opening(x[0], ContactSide::Upper));
        contact_minus[f] = table.values[f] - lower_values[f] <= tol_minus;
        contact_plus[f] = upper_values[f] - table.values[f] <= tol_plus;
    }

    let mut sol = ObstacleSolution {
        table,
        s,
        eps: cfg.eps.unwrap_or_else(|| cfg.h.powf(s.two_s())),
        sweeps: sweeps_total,
        tol_iter: cfg.tol,
        contact_plus,
        contact_minus,
        lower_values,
        upper_values,
        post: None,
    };
    if cfg.post_check {
        let report = obstacle_post_verify(&sol, pair, cfg)?;
        let pass = report.pass;
        let (worst_point, worst) = (
            report.worst_point.clone(),
            report.worst_sub_excess.max(report.worst_super_excess),
        );
        sol.post = Some(report);
        if !pass {
            return Err(Error::PostCheckFailure {
                summary: "one-sided obstacle residual check failed".into(),
                worst_point,
                worst_residual: worst,
            });
        }
    }
    Ok(sol)
}

/// One-sided residual verification at sampled cell centres: where the
/// solution stands clear of the lower obstacle the operator must be
/// >= -tol, where it stands clear of the upper obstacle it must be
/// <= +tol (free points get both).  Points with unresolvably small
/// gradients or missing certificates are skipped and counted.
pub fn obstacle_post_verify(
    sol: &ObstacleSolution,
    pair: &ObstaclePair,
    cfg: &ObstacleConfig,
) -> Result<ObstaclePostReport> {
    let spec = &sol.table.spec;
    let dim = spec.dim();
    let h = spec.h[0];
    let field = sol.interpolant();
    let tol = post_tolerance(h, sol.s);
    let mut quad = cfg.quad.clone();
    quad.delta_in = quad.delta_in.min(h / 8.0);
    quad.tol = quad.tol.min(tol / 10.0).max(1e-6);

    // Candidate cell centres (first axis offset by h/2, transverse at
    // node coordinates to stay inside one cell in 1-D sweeps).
    let mut candidates = Vec::new();
    let mut idx = vec![0usize; dim];
    for f in 0..spec.len() {
        spec.unflat(f, &mut idx);
        if (0..dim).any(|k| idx[k] + 1 >= spec.n[k]) {
            continue;
        }
        let mut x = spec.point_of_flat(f);
        for k in 0..dim {
            x[k] += 0.5 * spec.h[k];
        }
        if x[0].abs() > cfg.window - 2.0 * h {
            continue;
        }
        candidates.push(x);
    }
    let stride = (candidates.len() / cfg.post_samples.max(1)).max(1);
    let samples: Vec<Vec<f64>> = candidates.into_iter().step_by(stride).collect();

    // Gradient gate: the interpolant direction is trustworthy only when
    // the local slope clears both the iteration noise floor and the
    // curvature-driven interpolation error of one cell.
    let grad_floor = |x: &[f64]| -> f64 {
        let mut m2: f64 = 0.0;
        let mut xp = x.to_vec();
        for k in 0..dim {
            let hk = spec.h[k];
            xp[k] = x[k] + hk;
            let up = sol.table.eval(&xp);
            xp[k] = x[k] - hk;
            let um = sol.table.eval(&xp);
            xp[k] = x[k];
            m2 = m2.max((up + um - 2.0 * sol.table.eval(x)).abs() / (hk * hk));
        }
        (10.0 * h * m2).max(10.0 * sol.tol_iter / h).max(1e-9)
    };

    struct SampleVerdict {
        sub_excess: f64,
        super_excess: f64,
        point: Vec<f64>,
        skipped_grad: bool,
        skipped_unverifiable: bool,
    }
    let verdicts: Vec<SampleVerdict> = samples
        .par_iter()
        .map(|x| {
            let mut v = SampleVerdict {
                sub_excess: f64::NEG_INFINITY,
                super_excess: f64::NEG_INFINITY,
                point: x.clone(),
                skipped_grad: false,
                skipped_unverifiable: false,
            };
            let u_val = field.eval(x);
            let lo = pair.lower.eval(x);
            let hi = pair.upper.eval(x);
            let tol_minus = sol.contact_tolerance(pair, x[0], ContactSide::Lower);
            let tol_plus = sol.contact_tolerance(pair, x[0], ContactSide::Upper);
            let above_lower = u_val - lo > tol_minus;
            let below_upper = hi - u_val > tol_plus;
            if !above_lower && !below_upper {
                return v;
            }
            let g = field.gradient(x, h / 4.0);
            if geom::norm(&g) <= grad_floor(x) {
                v.skipped_grad = true;
                return v;
            }
            match ifl_eval(&field, x, sol.s, &quad) {
                Ok(res) => {
                    let allow = tol + res.err_est;
                    if above_lower {
                        v.sub_excess = -res.value - allow;
                    }
                    if below_upper {
                        v.super_excess = res.value - allow;
                    }
                }
                Err(_) => v.skipped_unverifiable = true,
            }
            v
        })
        .collect();

    let mut checked = 0usize;
    let mut skipped_low_gradient = 0usize;
    let mut skipped_unverifiable = 0usize;
    let mut worst_sub = f64::NEG_INFINITY;
    let mut worst_super = f64::NEG_INFINITY;
    let mut worst_point = Vec::new();
    let mut worst_score = f64::NEG_INFINITY;
    for v in &verdicts {
        if v.skipped_grad {
            skipped_low_gradient += 1;
            continue;
        }
        if v.skipped_unverifiable {
            skipped_unverifiable += 1;
            continue;
        }
        if v.sub_excess == f64::NEG_INFINITY && v.super_excess == f64::NEG_INFINITY {
            continue;
        }
        checked += 1;
        let score = v.sub_excess.max(v.super_excess);
        if score > worst_score {
            worst_score = score;
            worst_point = v.point.clone();
        }
        worst_sub = worst_sub.max(v.sub_excess);
        worst_super = worst_super.max(v.super_excess);
    }
    if worst_sub == f64::NEG_INFINITY {
        worst_sub = 0.0;
    }
    if worst_super == f64::NEG_INFINITY {
        worst_super = 0.0;
    }
    let pass = checked > 0 && worst_sub <= 0.0 && worst_super <= 0.0;
    Ok(ObstaclePostReport {
        checked,
        skipped_low_gradient,
        skipped_unverifiable,
        worst_sub_excess: worst_sub,
        worst_super_excess: worst_super,
        worst_point,
        tol,
        pass,
    })
}

/// Smallest M such that every grid point with x_1 > M touches the lower
/// obstacle and every point with x_1 < -M touches the upper obstacle;
/// infinite when no such band exists inside the window.
pub fn find_coincidence_m(sol: &ObstacleSolution) -> f64 {
    let spec = &sol.table.spec;
    let w = spec.hi(0);
    let h = spec.h[0];
    let mut right_sup: f64 = 0.0;
    let mut left_sup: f64 = 0.0;
    let mut right_contact = false;
    let mut left_contact = false;
    for f in 0..spec.len() {
        let x = spec.point_of_flat(f);
        if x[0] > 0.0 {
            if sol.contact_minus[f] {
                right_contact = true;
            } else {
                right_sup = right_sup.max(x[0]);
            }
        } else if x[0] < 0.0 {
            if sol.contact_plus[f] {
                left_contact = true;
            } else {
                left_sup = left_sup.max(-x[0]);
            }
        }
    }
    let m = right_sup.max(left_sup);
    if !right_contact || !left_contact || m >= w - 0.5 * h {
        return f64::INFINITY;
    }
    m
}

/// Lipschitz measurement against the two-cone bound.
#[derive(Debug, Clone, Serialize)]
pub struct LipschitzReport {
    /// Max |dU| / |dx| over neighbouring grid pairs.
    pub lip_est: f64,
    /// Two-cone constant of the given cone.
    pub a_theta: f64,
    /// A_theta * L_0 * 1.1.
    pub bound: f64,
    pub pass: bool,
}

/// Two-cone chaining constant: for any x, z there is w in the
/// intersection of the downward cones from x and z with
/// |x - w| + |z - w| <= A_theta |x - z|; the extremal pair is transverse
/// and gives 1/sin(theta).
pub fn a_theta(cone: &ConeSpec) -> f64 {
    1.0 / cone.theta.sin()
}

/// Brute-force oracle for the two-cone constant: minimise
/// (|x - w| + |z - w|) / |x - z| over a grid of w in the intersection of
/// the downward cones from x and z.
pub fn two_cone_ratio(cone: &ConeSpec, x: &[f64], z: &[f64], n_scan: usize) -> f64 {
    let dim = x.len();
    let d = geom::dist(x, z);
    if d == 0.0 {
        return 0.0;
    }
    let lo1 = x[0].min(z[0]) - 4.0 * d;
    let hi1 = x[0].min(z[0]);
    let mut best = f64::INFINITY;
    let mut w = vec![0.0; dim];
    let mut neg = vec![0.0; dim];
    let scan = |w: &[f64], best: &mut f64, neg: &mut Vec<f64>| {
        for src in [x, z] {
            for k in 0..dim {
                neg[k] = src[k] - w[k];
            }
            // Closed cone: the extremal w sits on the boundary.
            let n = geom::norm(neg);
            if !(n == 0.0 || neg[0] / n >= cone.theta.cos() - 1e-12) {
                return false;
            }
        }
        let r = (geom::dist(x, w) + geom::dist(z, w)) / d;
        if r < *best {
            *best = r;
            return true;
        }
        false
    };
    // Grid over the box spanned by the pair, extended downward along e1,
    // then zoom rounds around the running argmin (the coarse lattice
    // alone overestimates the minimum by O(cell / d)).
    let mut centre = vec![0.0; dim];
    centre[0] = 0.5 * (lo1 + hi1);
    for k in 1..dim {
        centre[k] = 0.5 * (x[k] + z[k]);
    }
    let mut half = vec![0.0; dim];
    half[0] = 0.5 * (hi1 - lo1);
    for k in 1..dim {
        half[k] = 2.0 * d;
    }
    let mut idx = vec![0usize; dim];
    let total = (n_scan + 1).pow(dim as u32);
    for _round in 0..4 {
        let mut arg = centre.clone();
        for f in 0..total {
            let mut rem = f;
            for k in 0..dim {
                idx[k] = rem % (n_scan + 1);
                rem /= n_scan + 1;
            }
            for k in 0..dim {
                w[k] = centre[k] - half[k] + 2.0 * half[k] * idx[k] as f64 / n_scan as f64;
            }
            if scan(&w, &mut best, &mut neg) {
                arg.copy_from_slice(&w);
            }
        }
        centre = arg;
        for hk in half.iter_mut() {
            // next box = a few cells of the current lattice
            *hk *= 4.0 / n_scan as f64;
        }
    }
    best
}

/// Grid Lipschitz estimate of the solution against A_theta * L_0 * 1.1.
pub fn check_lipschitz(
    sol: &ObstacleSolution,
    pair: &ObstaclePair,
    cone: &ConeSpec,
) -> LipschitzReport {
    let spec = &sol.table.spec;
    let dim = spec.dim();
    let mut lip_est: f64 = 0.0;
    let mut idx = vec![0usize; dim];
    for f in 0..spec.len() {
        spec.unflat(f, &mut idx);
        for k in 0..dim {
            if idx[k] + 1 >= spec.n[k] {
                continue;
            }
            let mut jdx = idx.clone();
            jdx[k] += 1;
            let q = (sol.table.get(&jdx) - sol.table.get(&idx)).abs() / spec.h[k];
            lip_est = lip_est.max(q);
        }
    }
    let at = a_theta(cone);
    let bound = at * pair.lip * 1.1;
    LipschitzReport {
        lip_est,
        a_theta: at,
        bound,
        pass: lip_est <= bound,
    }
}

/// Log-log detachment-rate fit: slope of ln(hi - lo) against ln r along
/// `anchor + r y` for r in [r_min, r_max] (sqrt-2 ladder).  Differences
/// below `floor` are unresolved and dropped; fewer than four resolved
/// bands is an InsufficientResolution error.
pub fn detachment_exponent(
    hi: &ScalarField,
    lo: &ScalarField,
    anchor: &[f64],
    y: &[f64],
    r_min: f64,
    r_max: f64,
    floor: f64,
) -> Result<f64> {
    if !(r_min > 0.0 && r_min < r_max) {
        return Err(Error::ParameterViolation(
            "need 0 < r_min < r_max for the detachment fit".into(),
        ));
    }
    let mut ln_r = Vec::new();
    let mut ln_d = Vec::new();
    let mut r = r_min;
    let mut x = vec![0.0; anchor.len()];
    while r <= r_max * (1.0 + 1e-12) {
        for k in 0..anchor.len() {
            x[k] = anchor[k] + r * y[k];
        }
        let d = hi.eval(&x) - lo.eval(&x);
        if d > floor {
            ln_r.push(r.ln());
            ln_d.push(d.ln());
        }
        r *= std::f64::consts::SQRT_2;
    }
    if ln_r.len() < 4 {
        return Err(Error::InsufficientResolution(format!(
            "only {} resolved detachment bands (need 4)",
            ln_r.len()
        )));
    }
    Ok(regression_slope(&ln_r, &ln_d))
}

/// Detachment rate of a computed solution on one contact side: anchors at
/// the contact boundary, direction along the obstacle gradient (the
/// solution detaches into the free region).
pub fn detachment_from_solution(
    sol: &ObstacleSolution,
    pair: &ObstaclePair,
    side: ContactSide,
    r_max: f64,
) -> Result<f64> {
    let spec = &sol.table.spec;
    let dim = spec.dim();
    let h = spec.h[0];
    // Boundary anchor: the contact node adjacent to a free node, on the
    // matching end of the axis.
    let mut anchor: Option<Vec<f64>> = None;
    let mut idx = vec![0usize; dim];
    for f in 0..spec.len() {
        spec.unflat(f, &mut idx);
        if (1..dim).any(|k| idx[k] != 0) {
            continue;
        }
        let x = spec.point_of_flat(f);
        match side {
            ContactSide::Upper => {
                // Left contact block: largest x1 with contact whose +e1
                // neighbour is free.
                if sol.contact_plus[f] && x[0] < 0.0 && idx[0] + 1 < spec.n[0] {
                    let mut jdx = idx.clone();
                    jdx[0] += 1;
                    let jf = spec.flat(&jdx);
                    if !sol.contact_plus[jf] {
                        let better = anchor.as_ref().map_or(true, |a| x[0] > a[0]);
                        if better {
                            anchor = Some(x.clone());
                        }
                    }
                }
            }
            ContactSide::Lower => {
                if sol.contact_minus[f] && x[0] > 0.0 && idx[0] > 0 {
                    let mut jdx = idx.clone();
                    jdx[0] -= 1;
                    let jf = spec.flat(&jdx);
                    if !sol.contact_minus[jf] {
                        let better = anchor.as_ref().map_or(true, |a| x[0] < a[0]);
                        if better {
                            anchor = Some(x.clone());
                        }
                    }
                }
            }
        }
    }
    let anchor = anchor.ok_or_else(|| {
        Error::InsufficientResolution("no contact boundary found on the requested side".into())
    })?;
    let field = sol.interpolant();
    let mut y = vec![0.0; dim];
    let floor = 10.0 * sol.tol_iter;
    match side {
        ContactSide::Upper => {
            // Gap upper - U opens along +e1 (the upper profile's gradient
            // direction at the contact set).
            y[0] = 1.0;
            let r_cap = r_max.min(sol.table.spec.hi(0) - anchor[0] - 2.0 * h);
            detachment_exponent(&pair.upper, &field, &anchor, &y, 2.0 * h, r_cap, floor)
        }
        ContactSide::Lower => {
            // Gap U - lower opens along -e1.
            y[0] = -1.0;
            let r_cap = r_max.min(anchor[0] - sol.table.spec.lo[0] - 2.0 * h);
            detachment_exponent(&field, &pair.lower, &anchor, &y, 2.0 * h, r_cap, floor)
        }
    }
}

/// Shifted-slope sets: where a step of h along y changes the profile by
/// no more than beta*h.  The effective sets intersect the strict zones
/// ({upper < 1} resp. {lower > 0}); their distance to the origin is the
/// band radius M_beta, which matches the analytic inversion of the
/// far-field slope bound for the model pair.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaReport {
    pub beta: f64,
    pub step: f64,
    pub direction: Vec<f64>,
    /// Detected band radius (min |x_1| over both effective sets).
    pub m_beta: f64,
    /// Analytic model inversion slope(M) * y_1 = beta, clamped at the
    /// strict-zone edge.
    pub m_beta_analytic: f64,
    pub plus_points: usize,
    pub minus_points: usize,
    /// No sampled point of the intersection of the effective sets lies
    /// inside the detected band.
    pub inclusion_ok: bool,
    pub window: f64,
}

/// Sample the shifted-slope sets along the axis on [-window, window].
pub fn sigma_sets(
    pair: &ObstaclePair,
    h: f64,
    y: &[f64],
    beta: f64,
    window: f64,
    scan_h: f64,
) -> Result<SigmaReport> {
    let dim = pair.upper.dim;
    if !(h > 0.0 && h < 1.0) || beta <= 0.0 || scan_h <= 0.0 {
        return Err(Error::ParameterViolation(
            "need h in (0,1), beta > 0, scan_h > 0".into(),
        ));
    }
    if y.len() != dim || (geom::norm(y) - 1.0).abs() > 1e-9 || y[0] <= 0.0 {
        return Err(Error::ParameterViolation(
            "direction must be a unit vector with positive first component".into(),
        ));
    }
    let n = ((2.0 * window) / scan_h).ceil() as usize;
    let mut plus_points = 0usize;
    let mut minus_points = 0usize;
    let mut m_plus = f64::INFINITY;
    let mut m_minus = f64::INFINITY;
    let mut both: Vec<f64> = Vec::new();
    let mut x = vec![0.0; dim];
    let mut xs = vec![0.0; dim];
    for i in 0..=n {
        x[0] = -window + 2.0 * window * i as f64 / n as f64;
        for k in 0..dim {
            xs[k] = x[k] - h * y[k];
        }
        let in_plus = pair.upper.eval(&x) < 1.0 - 1e-12
            && pair.upper.eval(&xs) + beta * h >= pair.upper.eval(&x) - 1e-14;
        let in_minus = pair.lower.eval(&x) > 1e-12
            && pair.lower.eval(&xs) + beta * h >= pair.lower.eval(&x) - 1e-14;
        if in_plus {
            plus_points += 1;
            m_plus = m_plus.min(x[0].abs());
        }
        if in_minus {
            minus_points += 1;
            m_minus = m_minus.min(x[0].abs());
        }
        if in_plus && in_minus {
            both.push(x[0]);
        }
    }
    let m_beta = m_plus.min(m_minus);
    let analytic_side = |g: f64| -> f64 {
        if beta >= g * y[0] {
            1.0
        } else {
            (g * y[0] / beta).powf(1.0 / (g + 1.0))
        }
    };
    let m_beta_analytic = analytic_side(pair.gamma_upper).min(analytic_side(pair.gamma_lower));
    let inclusion_ok = both.iter().all(|&t| t.abs() >= m_beta - 1e-12);
    Ok(SigmaReport {
        beta,
        step: h,
        direction: y.to_vec(),
        m_beta,
        m_beta_analytic,
        plus_points,
        minus_points,
        inclusion_ok,
        window,
    })
}

/// Uniform linear monotonicity of the solution along e1 inside
/// {|x_1| <= band}: beta = min over grid pairs of dU / step.
pub fn uniform_linear_monotonicity(
    sol: &ObstacleSolution,
    band: f64,
    steps: &[usize],
) -> MonotonicityReport {
    let spec = &sol.table.spec;
    let h = spec.h[0];
    let mut beta = f64::INFINITY;
    let mut pairs = 0usize;
    let mut violations = Vec::new();
    let mut idx = vec![0usize; spec.dim()];
    for f in 0..spec.len() {
        spec.unflat(f, &mut idx);
        let x = spec.point_of_flat(f);
        if x[0].abs() > band {
            continue;
        }
        for &k in steps {
            if idx[0] + k >= spec.n[0] {
                continue;
            }
            let mut jdx = idx.clone();
            jdx[0] += k;
            let xj = x[0] + h * k as f64;
            if xj.abs() > band {
                continue;
            }
            let du = sol.table.get(&jdx) - sol.table.get(&idx);
            pairs += 1;
            if du < -1e-9 {
                violations.push(x.clone());
            }
            beta = beta.min(du.max(0.0) / (h * k as f64));
        }
    }
    if !beta.is_finite() {
        beta = 0.0;
    }
    MonotonicityReport {
        beta,
        alpha: 1.0,
        pairs,
        violations,
    }
}

/// Symmetry defect of the model involution U(x) = 1 - U(-x): max over
/// grid nodes (exact for the symmetric model pair).
pub fn involution_defect(sol: &ObstacleSolution) -> f64 {
    let spec = &sol.table.spec;
    let mut worst: f64 = 0.0;
    for f in 0..spec.len() {
        let x = spec.point_of_flat(f);
        let mut xm = x.clone();
        xm[0] = -x[0];
        let mirrored = sol.table.eval(&xm);
        worst = worst.max((sol.table.values[f] - (1.0 - mirrored)).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_profiles_have_exact_values_and_slopes() {
        let pair = model_obstacles(1.0, 1.0, 1);
        assert_eq!(pair.upper.eval(&[-2.0]), 0.5);
        assert_eq!(pair.upper.eval(&[0.0]), 1.0);
        assert_eq!(pair.lower.eval(&[2.0]), 0.5);
        assert_eq!(pair.lower.eval(&[0.0]), 0.0);
        // d/dx1 of 1 - x1^-1 at x1 = 2 is 1/4.
        let g = pair.lower.gradient(&[2.0], 1e-6);
        assert!((g[0] - 0.25).abs() < 1e-12);
        // Model symmetry: lower(x) = 1 - upper(-x).
        for t in [-3.0, -1.5, 0.0, 1.2, 4.0] {
            let a = pair.lower.eval(&[t]);
            let b = 1.0 - pair.upper.eval(&[-t]);
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn band_slope_bound_decays_and_matches_power() {
        let pair = model_obstacles(1.0, 1.0, 1);
        // gamma = 1: sup slope beyond m is m^-2 per profile.
        assert!((pair.band_slope_bound(10.0) - 2.0 * 0.01).abs() < 1e-15);
        assert!(pair.band_slope_bound(40.0) < pair.band_slope_bound(10.0));
        assert_eq!(pair.band_slope_bound(0.4), 0.0);
    }

    #[test]
    fn assumption_audit_passes_for_model_pair() {
        let pair = model_obstacles(1.0, 1.0, 1);
        let s = Exponent::new(0.75).unwrap();
        let audit = audit_assumptions(&pair, s, 20.0, 64);
        assert!(audit.ordered, "{audit:?}");
        assert!(audit.touching_ok, "{audit:?}");
        assert!(audit.plateau_ok, "{audit:?}");
        // alpha_decay = gamma + 2s = 2.5 > 2s = 1.5.
        assert!((audit.alpha_analytic - 2.5).abs() < 1e-12);
        assert!(audit.alpha_pass, "{audit:?}");
        assert!(audit.pass, "{audit:?}");
    }

    #[test]
    fn barrier_touches_profile_at_seed() {
        let pair = model_obstacles(1.0, 1.0, 1);
        let s = Exponent::new(0.75).unwrap();
        let m = pair.coincidence_threshold(s);
        let seed = vec![-(m + 5.0)];
        let p = obstacle_barriers(&pair, s, &[seed.clone()], BarrierSide::Sub).unwrap();
        let touch = p.eval(&seed);
        assert!((touch - pair.upper.eval(&seed)).abs() < 1e-12);
        // Between the obstacles everywhere on a sample line.
        for i in 0..200 {
            let x = vec![-30.0 + 60.0 * i as f64 / 199.0];
            let v = p.eval(&x);
            assert!(v >= pair.lower.eval(&x) - 1e-12);
            assert!(v <= pair.upper.eval(&x) + 1e-12);
        }
    }

    #[test]
    fn barrier_rejects_shallow_seeds() {
        let pair = model_obstacles(1.0, 1.0, 1);
        let s = Exponent::new(0.75).unwrap();
        let err = obstacle_barriers(&pair, s, &[vec![-1.0]], BarrierSide::Sub).unwrap_err();
        assert!(matches!(err, Error::ParameterViolation(_)));
    }

    #[test]
    fn empty_seed_list_returns_profile() {
        let pair = model_obstacles(1.0, 2.0, 1);
        let s = Exponent::new(0.75).unwrap();
        let p = obstacle_barriers(&pair, s, &[], BarrierSide::Sub).unwrap();
        for t in [-5.0, 0.0, 3.0] {
            assert_eq!(p.eval(&[t]), pair.lower.eval(&[t]));
        }
    }

    #[test]
    fn sigma_analytic_inversion_matches_detection() {
        let pair = model_obstacles(1.0, 1.0, 1);
        let beta = 0.01;
        let rep = sigma_sets(&pair, 1.0 / 64.0, &[1.0], beta, 40.0, 1.0 / 256.0).unwrap();
        // gamma = 1: slope m^-2 = beta at m = 10.
        assert!((rep.m_beta_analytic - 10.0).abs() < 1e-9);
        assert!((rep.m_beta - rep.m_beta_analytic).abs() <= 1.0 / 64.0 + 1.0 / 256.0);
        assert!(rep.inclusion_ok);
        // Halving beta twice: band radius non-decreasing.
        let rep2 = sigma_sets(&pair, 1.0 / 64.0, &[1.0], beta / 2.0, 40.0, 1.0 / 256.0).unwrap();
        let rep4 = sigma_sets(&pair, 1.0 / 64.0, &[1.0], beta / 4.0, 40.0, 1.0 / 256.0).unwrap();
        assert!(rep2.m_beta >= rep.m_beta);
        assert!(rep4.m_beta >= rep2.m_beta);
    }

    #[test]
    fn sigma_large_beta_fills_strict_zones() {
        let pair = model_obstacles(1.0, 1.0, 1);
        // beta above the central slope (gamma = 1 at the kink).
        let rep = sigma_sets(&pair, 0.25, &[1.0], 2.0, 10.0, 1.0 / 64.0).unwrap();
        assert!((rep.m_beta_analytic - 1.0).abs() < 1e-12);
        assert!(rep.m_beta <= 1.0 + 0.25 + 1.0 / 64.0);
        assert!(rep.inclusion_ok);
    }

    #[test]
    fn detachment_fitter_recovers_square_profile() {
        // hi - lo = c * r^2 along e1 from the origin.
        let hi = ScalarField::new(1, Growth::Power { c: 10.0, alpha: 2.0 }, |x| {
            3.0 * x[0] * x[0]
        });
        let lo = field::constant(1, 0.0);
        let slope =
            detachment_exponent(&hi, &lo, &[0.0], &[1.0], 1.0 / 64.0, 0.5, 1e-12).unwrap();
        assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn detachment_refuses_flat_gap() {
        let hi = field::constant(1, 1.0);
        let lo = field::constant(1, 1.0);
        let err =
            detachment_exponent(&hi, &lo, &[0.0], &[1.0], 1.0 / 64.0, 0.5, 1e-12).unwrap_err();
        assert!(matches!(err, Error::InsufficientResolution(_)));
    }

    #[test]
    fn two_cone_constant_for_quarter_opening() {
        let cone = ConeSpec { theta: std::f64::consts::FRAC_PI_4 };
        assert!((a_theta(&cone) - std::f64::consts::SQRT_2).abs() < 1e-12);
        // Brute-force transverse pair in 2-D approaches the bound from below.
        let r = two_cone_ratio(&cone, &[0.0, 0.0], &[0.0, 1.0], 160);
        assert!(r <= a_theta(&cone) + 0.02, "ratio {r}");
        assert!(r >= a_theta(&cone) - 0.05, "ratio {r}");
        // Axis-aligned pair: the lower point serves as w, ratio 1.
        let r1 = two_cone_ratio(&cone, &[0.0, 0.0], &[1.0, 0.0], 160);
        assert!(r1 <= 1.0 + 1e-9, "ratio {r1}");
    }
}
