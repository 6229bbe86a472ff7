//! Pointwise evaluation of the infinity fractional Laplacian and the
//! directional one-sided integrals it is built from.
//!
//! Every directional integral is split into three segments:
//!   [0, δ_in]      — local model fitted from dyadic probes, rigorously
//!                    capped by the C^{1,1} constant;
//!   [δ_in, R_eff]  — adaptive Gauss–Kronrod after the substitution
//!                    η = e^τ (the kernel η^{-1-2s} becomes smooth);
//!   [R_eff, ∞)     — bounded analytically from the declared growth
//!                    class; R_eff is pushed outward from R_out until the
//!                    bound is far below the target tolerance.

use crate::error::{Error, Result};
use crate::field::{ScalarField, C11};
use crate::geom;
use crate::quad;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;

/// Fractional order s with the admissible range (1/2, 1) enforced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(s: f64) -> Result<Self> {
        if s > 0.5 && s < 1.0 && s.is_finite() {
            Ok(Exponent(s))
        } else {
            Err(Error::ParameterViolation(format!(
                "fractional order must satisfy 1/2 < s < 1, got {s}"
            )))
        }
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.0
    }

    #[inline]
    pub fn two_s(&self) -> f64 {
        2.0 * self.0
    }
}

/// Tuning for the singular-integral quadrature.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Inner split radius δ_in.
    pub delta_in: f64,
    /// Base truncation radius R_out (extended automatically when the
    /// growth tail is still significant there).
    pub r_out: f64,
    /// Number of dyadic probe points for the inner local model (>= 3).
    pub n_inner: usize,
    /// Maximum adaptive panels for the middle segment.
    pub n_mid: usize,
    /// Sphere-direction count for sup/inf scans.
    pub k_dir: usize,
    /// Gradient-zero threshold; None derives 10*h_grad*max(M,1) per point.
    pub tau_grad: Option<f64>,
    /// Central-difference step for numeric gradients.
    pub h_grad: f64,
    /// Target absolute error.
    pub tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            delta_in: 1e-3,
            r_out: 1e3,
            n_inner: 3,
            n_mid: 800,
            k_dir: 64,
            tau_grad: None,
            h_grad: 1e-6,
            tol: 1e-4,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.delta_in > 0.0 && self.delta_in < self.r_out) {
            return Err(Error::ParameterViolation(format!(
                "need 0 < delta_in < r_out (got {} and {})",
                self.delta_in, self.r_out
            )));
        }
        if dim == 2 && self.k_dir < 8 {
            return Err(Error::ParameterViolation(format!(
                "k_dir must be >= 8 in dimension 2, got {}",
                self.k_dir
            )));
        }
        if let Some(t) = self.tau_grad {
            if t <= 0.0 {
                return Err(Error::ParameterViolation(format!(
                    "tau_grad must be positive, got {t}"
                )));
            }
        }
        if !(self.tol > 0.0) || !(self.h_grad > 0.0) || self.n_inner < 3 {
            return Err(Error::ParameterViolation(
                "tol and h_grad must be positive and n_inner >= 3".into(),
            ));
        }
        Ok(())
    }

    /// Effective gradient-zero threshold at a point with local constant m.
    pub fn tau_for(&self, m: Option<f64>) -> f64 {
        self.tau_grad
            .unwrap_or_else(|| 10.0 * self.h_grad * m.filter(|v| v.is_finite()).unwrap_or(1.0).max(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    NonzeroGrad,
    ZeroGrad,
}

/// Outcome of one operator evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorResult {
    pub value: f64,
    pub err_est: f64,
    pub branch: Branch,
    /// Gradient direction (nonzero-gradient branch).
    pub v_star: Option<Vec<f64>>,
    /// Maximizing direction of the one-sided scan (zero-gradient branch).
    pub y_star: Option<Vec<f64>>,
    /// Minimizing pull direction z (the integral uses -z).
    pub z_star: Option<Vec<f64>>,
}

/// Value and honest error bound for one directional integral.
#[derive(Debug, Clone, Copy)]
pub struct DirectionalIntegral {
    pub value: f64,
    pub err_est: f64,
    /// Where the numeric segment actually stopped.
    pub r_eff: f64,
}

#[derive(Clone, Copy)]
enum Symmetry {
    /// u(x+ηv) + u(x-ηv) - 2u(x): quadratic-even local model.
    Two,
    /// u(x+ηy) - u(x): quadratic+cubic local model.
    One,
}

fn growth_ok(u: &ScalarField, s: Exponent) -> Result<()> {
    let alpha = u.growth.alpha();
    if alpha >= s.two_s() {
        return Err(Error::GrowthViolation(format!(
            "growth exponent {alpha} is not below 2s = {}; tail integral diverges",
            s.two_s()
        )));
    }
    Ok(())
}

/// Upper bound for the absolute tail ∫_R^∞ |increment|/η^{1+2s} dη given
/// the growth envelope; `terms` is 2 for the symmetric difference, 1 for
/// the one-sided increment.
fn tail_bound(u: &ScalarField, x: &[f64], ux: f64, s: Exponent, r: f64, terms: f64) -> f64 {
    let two_s = s.two_s();
    let base = ux.abs() * terms * r.powf(-two_s) / two_s;
    match u.growth {
        crate::field::Growth::Bounded { c0 } => base + terms * c0 * r.powf(-two_s) / two_s,
        crate::field::Growth::Power { c, alpha } => {
            let c_eff = c * (1.0 + geom::norm(x)).powf(alpha.max(0.0));
            if alpha > 0.0 {
                // (1+η)^α ≤ (2η)^α for η ≥ 1
                base + terms * c_eff * 2f64.powf(alpha) * r.powf(alpha - two_s) / (two_s - alpha)
            } else {
                base + terms * c_eff * r.powf(-two_s) / two_s
            }
        }
    }
}

/// Core of both directional integrals. `probe(η)` must return the raw
/// increment (symmetric difference or one-sided difference) at radius η.
fn directional_integral<F: Fn(f64) -> f64>(
    u: &ScalarField,
    x: &[f64],
    s: Exponent,
    cfg: &QuadratureConfig,
    c11: C11,
    probe: F,
    sym: Symmetry,
) -> DirectionalIntegral {
    let two_s = s.two_s();
    let ux = u.eval(x);

    // --- inner segment ------------------------------------------------
    let mut delta = cfg.delta_in;
    if c11.eta0.is_finite() {
        delta = delta.min(0.5 * c11.eta0);
    }
    // keep probes above the floating-point cancellation floor
    let noise = 16.0 * f64::EPSILON * (ux.abs() + 1.0);
    let m_terms = match sym {
        Symmetry::Two => 2.0,
        Symmetry::One => 1.0,
    };
    let hard_cap = if c11.m.is_finite() {
        m_terms * c11.m * delta.powf(2.0 - two_s) / (2.0 - two_s)
    } else {
        f64::INFINITY
    };

    let d1 = probe(delta);
    let d2 = probe(0.5 * delta);
    let d3 = probe(0.25 * delta);
    let kd = delta.powf(-two_s);
    let (mut inner_val, inner_one, pred3, next_exp) = match sym {
        Symmetry::Two => {
            // model A(η/δ)^2 + B(η/δ)^4
            let a = (16.0 * d2 - d1) / 3.0;
            let b = d1 - a;
            let v = kd * (a / (2.0 - two_s) + b / (4.0 - two_s));
            let one = kd * d1 / (2.0 - two_s);
            (v, one, a / 16.0 + b / 256.0, 6.0)
        }
        Symmetry::One => {
            // model A(η/δ)^2 + B(η/δ)^3
            let a = 8.0 * d2 - d1;
            let b = d1 - a;
            let v = kd * (a / (2.0 - two_s) + b / (3.0 - two_s));
            let one = kd * d1 / (2.0 - two_s);
            (v, one, a / 16.0 + b / 64.0, 4.0)
        }
    };
    let disc = (d3 - pred3).abs();
    let mut inner_err = 0.25 * (inner_val - inner_one).abs()
        + 2f64.powf(next_exp) * disc * kd / (2.0 - two_s)
        + noise * kd / (2.0 - two_s);
    if hard_cap.is_finite() {
        if inner_val.abs() > hard_cap {
            inner_val = inner_val.signum() * hard_cap;
        }
        inner_err = inner_err.min(2.0 * hard_cap);
    }

    // --- tail: extend the cut radius until the envelope bound is small -
    let mut r_eff = cfg.r_out.max(delta * 4.0);
    let tail_goal = 0.1 * cfg.tol;
    let mut tail_err = tail_bound(u, x, ux, s, r_eff, m_terms);
    while tail_err > tail_goal && r_eff < 1e12 {
        r_eff *= 4.0;
        tail_err = tail_bound(u, x, ux, s, r_eff, m_terms);
    }

    // --- middle segment on log scale -----------------------------------
    let (lo, hi) = (delta.ln(), r_eff.ln());
    let mid = quad::adaptive(
        &|t: f64| {
            let eta = t.exp();
            probe(eta) * (-two_s * t).exp()
        },
        lo,
        hi,
        0.6 * cfg.tol,
        cfg.n_mid,
    );

    DirectionalIntegral {
        value: inner_val + mid.value,
        err_est: inner_err + mid.error + tail_err,
        r_eff,
    }
}

/// ∫_0^∞ [u(x+ηv)+u(x−ηv)−2u(x)] / η^{1+2s} dη for a unit direction v.
pub fn second_difference_integral(
    u: &ScalarField,
    x: &[f64],
    v: &[f64],
    s: Exponent,
    cfg: &QuadratureConfig,
) -> Result<DirectionalIntegral> {
    cfg.validate(u.dim)?;
    growth_ok(u, s)?;
    let c11 = u.require_c11(x, s.two_s())?;
    let ux = u.eval(x);
    let bufs = RefCell::new((vec![0.0; u.dim], vec![0.0; u.dim]));
    Ok(directional_integral(
        u,
        x,
        s,
        cfg,
        c11,
        |eta| {
            let (bp, bm) = &mut *bufs.borrow_mut();
            geom::axpy(bp, x, eta, v);
            geom::axpy(bm, x, -eta, v);
            u.eval(bp) + u.eval(bm) - 2.0 * ux
        },
        Symmetry::Two,
    ))
}

/// L(u, y, x) = ∫_0^∞ [u(x+ηy)−u(x)] / η^{1+2s} dη. Requires a vanishing
/// gradient at x: for s > 1/2 the linear part makes this integral diverge.
pub fn one_sided_integral(
    u: &ScalarField,
    x: &[f64],
    y: &[f64],
    s: Exponent,
    cfg: &QuadratureConfig,
) -> Result<DirectionalIntegral> {
    cfg.validate(u.dim)?;
    growth_ok(u, s)?;
    let c11 = u.require_c11(x, s.two_s())?;
    let p = u.gradient(x, cfg.h_grad);
    let pn = geom::norm(&p);
    let tau = cfg.tau_for(Some(c11.m));
    if pn > tau {
        return Err(Error::DivergentIntegral(format!(
            "one-sided integral needs a vanishing gradient; |grad| = {pn:.3e} > {tau:.3e} at {x:?}"
        )));
    }
    Ok(one_sided_core(u, x, y, s, cfg, c11))
}

fn one_sided_core(
    u: &ScalarField,
    x: &[f64],
    y: &[f64],
    s: Exponent,
    cfg: &QuadratureConfig,
    c11: C11,
) -> DirectionalIntegral {
    let ux = u.eval(x);
    let buf = RefCell::new(vec![0.0; u.dim]);
    directional_integral(
        u,
        x,
        s,
        cfg,
        c11,
        |eta| {
            let b = &mut *buf.borrow_mut();
            geom::axpy(b, x, eta, y);
            u.eval(b) - ux
        },
        Symmetry::One,
    )
}

/// Directions used by the zero-gradient scans (sup over y, inf over -z).
fn scan_directions(dim: usize, k_dir: usize) -> Vec<Vec<f64>> {
    geom::sphere_directions(dim, k_dir)
}

/// Refine a 2-D direction around the best angle with golden section.
fn refine_dir_2d<F: Fn(&[f64]) -> f64>(f: &F, best: &[f64], window: f64, maximize: bool) -> (Vec<f64>, f64) {
    let theta0 = best[1].atan2(best[0]);
    let mut eval = |th: f64| {
        let d = [th.cos(), th.sin()];
        let v = f(&d);
        if maximize {
            v
        } else {
            -v
        }
    };
    let (th, v) = geom::golden_max(&mut eval, theta0 - window, theta0 + window, 28);
    (vec![th.cos(), th.sin()], if maximize { v } else { -v })
}

struct ZeroBranch {
    sup: f64,
    inf: f64,
    err: f64,
    y_star: Vec<f64>,
    z_star: Vec<f64>,
}

fn zero_branch(
    u: &ScalarField,
    x: &[f64],
    s: Exponent,
    cfg: &QuadratureConfig,
    c11: C11,
) -> ZeroBranch {
    let dirs = scan_directions(u.dim, cfg.k_dir);
    let mut best_hi = f64::NEG_INFINITY;
    let mut best_lo = f64::INFINITY;
    let mut err_hi = 0.0;
    let mut err_lo = 0.0;
    let mut y_star = dirs[0].clone();
    let mut w_min = dirs[0].clone();
    for d in &dirs {
        let r = one_sided_core(u, x, d, s, cfg, c11);
        if r.value > best_hi {
            best_hi = r.value;
            err_hi = r.err_est;
            y_star = d.clone();
        }
        if r.value < best_lo {
            best_lo = r.value;
            err_lo = r.err_est;
            w_min = d.clone();
        }
    }
    if u.dim == 2 {
        let window = 2.0 * std::f64::consts::PI / dirs.len() as f64;
        let eval = |d: &[f64]| one_sided_core(u, x, d, s, cfg, c11).value;
        let (yr, vr) = refine_dir_2d(&eval, &y_star, window, true);
        if vr > best_hi {
            best_hi = vr;
            y_star = yr;
        }
        let (wr, vr) = refine_dir_2d(&eval, &w_min, window, false);
        if vr < best_lo {
            best_lo = vr;
            w_min = wr;
        }
    }
    ZeroBranch {
        sup: best_hi,
        inf: best_lo,
        err: err_hi + err_lo,
        y_star,
        z_star: geom::scale(&w_min, -1.0),
    }
}

/// Extremal one-sided integrals at a point where the zero-gradient
/// branch applies: returns (sup_y L(u,y,x), inf_z L(u,-z,x), combined
/// error estimate). Their sum is the zero-branch operator value.
pub fn one_sided_extremes(
    u: &ScalarField,
    x: &[f64],
    s: Exponent,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64, f64)> {
    cfg.validate(u.dim)?;
    growth_ok(u, s)?;
    let c11 = u.require_c11(x, s.two_s())?;
    let zb = zero_branch(u, x, s, cfg, c11);
    Ok((zb.sup, zb.inf, zb.err))
}

/// Full operator evaluation with automatic branch selection.
pub fn ifl_eval(
    u: &ScalarField,
    x: &[f64],
    s: Exponent,
    cfg: &QuadratureConfig,
) -> Result<OperatorResult> {
    cfg.validate(u.dim)?;
    growth_ok(u, s)?;
    let c11 = u.require_c11(x, s.two_s())?;
    let p = u.gradient(x, cfg.h_grad);
    let pn = geom::norm(&p);
    let tau = cfg.tau_for(Some(c11.m));
    let analytic = u.has_analytic_grad();
    if !analytic && pn >= 0.5 * tau && pn <= 2.0 * tau {
        return Err(Error::AmbiguousGradient {
            point: x.to_vec(),
            magnitude: pn,
            lo: 0.5 * tau,
            hi: 2.0 * tau,
        });
    }
    let nonzero = if analytic { pn > 0.0 } else { pn > tau };
    if nonzero {
        let v = geom::scale(&p, 1.0 / pn);
        let r = second_difference_integral(u, x, &v, s, cfg)?;
        Ok(OperatorResult {
            value: r.value,
            err_est: r.err_est,
            branch: Branch::NonzeroGrad,
            v_star: Some(v),
            y_star: None,
            z_star: None,
        })
    } else {
        let zb = zero_branch(u, x, s, cfg, c11);
        Ok(OperatorResult {
            value: zb.sup + zb.inf,
            err_est: zb.err,
            branch: Branch::ZeroGrad,
            v_star: None,
            y_star: Some(zb.y_star),
            z_star: Some(zb.z_star),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakSide {
    Sub,
    Super,
}

/// Weak (one-directional) form: sup (side=Sub) or inf (side=Super) over
/// directions of the symmetric second-difference integral. For a nonzero
/// gradient this defers to the full evaluation.
pub fn ifl_eval_weak(
    u: &ScalarField,
    x: &[f64],
    s: Exponent,
    cfg: &QuadratureConfig,
    side: WeakSide,
) -> Result<OperatorResult> {
    cfg.validate(u.dim)?;
    growth_ok(u, s)?;
    let c11 = u.require_c11(x, s.two_s())?;
    let p = u.gradient(x, cfg.h_grad);
    let pn = geom::norm(&p);
    let tau = cfg.tau_for(Some(c11.m));
    let analytic = u.has_analytic_grad();
    if !analytic && pn >= 0.5 * tau && pn <= 2.0 * tau {
        return Err(Error::AmbiguousGradient {
            point: x.to_vec(),
            magnitude: pn,
            lo: 0.5 * tau,
            hi: 2.0 * tau,
        });
    }
    let nonzero = if analytic { pn > 0.0 } else { pn > tau };
    if nonzero {
        return ifl_eval(u, x, s, cfg);
    }
    let dirs = scan_directions(u.dim, cfg.k_dir);
    let mut best = match side {
        WeakSide::Sub => f64::NEG_INFINITY,
        WeakSide::Super => f64::INFINITY,
    };
    let mut best_err = 0.0;
    let mut best_dir = dirs[0].clone();
    for d in &dirs {
        let r = second_difference_integral(u, x, d, s, cfg)?;
        let better = match side {
            WeakSide::Sub => r.value > best,
            WeakSide::Super => r.value < best,
        };
        if better {
            best = r.value;
            best_err = r.err_est;
            best_dir = d.clone();
        }
    }
    if u.dim == 2 {
        let window = 2.0 * std::f64::consts::PI / dirs.len() as f64;
        let eval = |d: &[f64]| {
            second_difference_integral(u, x, d, s, cfg)
                .map(|r| r.value)
                .unwrap_or(best)
        };
        let maximize = matches!(side, WeakSide::Sub);
        let (dr, vr) = refine_dir_2d(&eval, &best_dir, window, maximize);
        let improved = if maximize { vr > best } else { vr < best };
        if improved {
            if let Ok(r) = second_difference_integral(u, x, &dr, s, cfg) {
                best = r.value;
                best_err = r.err_est;
                best_dir = dr;
            }
        }
    }
    Ok(OperatorResult {
        value: best,
        err_est: best_err,
        branch: Branch::ZeroGrad,
        v_star: None,
        y_star: Some(best_dir),
        z_star: None,
    })
}

/// Patch φ onto u inside the open ball B_r(x_0): the truncated test
/// function of the viscosity definitions. The result keeps u's growth
/// class (with the constant enlarged to cover φ on the patch) and carries
/// φ's local regularity inside the ball, u's outside.
pub fn compose_truncated(
    u: &ScalarField,
    phi: &ScalarField,
    x0: &[f64],
    r: f64,
) -> Result<ScalarField> {
    if u.dim != phi.dim || x0.len() != u.dim {
        return Err(Error::ParameterViolation(format!(
            "dimension mismatch: u is {}-d, phi is {}-d, x0 has length {}",
            u.dim,
            phi.dim,
            x0.len()
        )));
    }
    if !(r > 0.0) {
        return Err(Error::ParameterViolation(format!(
            "patch radius must be positive, got {r}"
        )));
    }
    if phi.c11_at(x0).is_none() {
        return Err(Error::MissingRegularity(
            x0.to_vec(),
            "patch function lacks second-order control at the patch center".into(),
        ));
    }
    let phi_cap = phi.growth.envelope(geom::norm(x0) + r);
    let growth = match u.growth {
        crate::field::Growth::Bounded { c0 } => crate::field::Growth::Bounded {
            c0: c0.max(phi_cap),
        },
        crate::field::Growth::Power { c, alpha } => crate::field::Growth::Power {
            c: c.max(phi_cap),
            alpha,
        },
    };
    let (uu, pp, cc) = (u.clone(), phi.clone(), x0.to_vec());
    let mut out = ScalarField::new(u.dim, growth, move |x| {
        if geom::dist(x, &cc) < r {
            pp.eval(x)
        } else {
            uu.eval(x)
        }
    });
    let (uu, pp, cc) = (u.clone(), phi.clone(), x0.to_vec());
    out = out.with_c11(move |x| {
        let d = geom::dist(x, &cc);
        if d < r {
            pp.c11_at(x).map(|c| C11 {
                m: c.m,
                eta0: c.eta0.min(r - d),
            })
        } else if d > r {
            uu.c11_at(x).map(|c| C11 {
                m: c.m,
                eta0: c.eta0.min(d - r),
            })
        } else {
            None
        }
    });
    if phi.has_analytic_grad() && u.has_analytic_grad() {
        let (uu, pp, cc) = (u.clone(), phi.clone(), x0.to_vec());
        out = out.with_grad(move |x| {
            if geom::dist(x, &cc) < r {
                pp.gradient(x, 0.0)
            } else {
                uu.gradient(x, 0.0)
            }
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field;

    fn s34() -> Exponent {
        Exponent::new(0.75).unwrap()
    }

    #[test]
    fn constant_second_difference_is_zero() {
        let u = field::constant(2, 7.5);
        let cfg = QuadratureConfig::default();
        let r = second_difference_integral(&u, &[0.3, -0.2], &[1.0, 0.0], s34(), &cfg).unwrap();
        assert!(r.value.abs() < 1e-12, "value {}", r.value);
    }

    #[test]
    fn affine_second_difference_cancels() {
        let u = field::affine(vec![2.0, -1.0], 0.5);
        let cfg = QuadratureConfig::default();
        let v = geom::normalize(&[1.0, 3.0]);
        let r = second_difference_integral(&u, &[0.1, 0.2], &v, s34(), &cfg).unwrap();
        assert!(r.value.abs() < cfg.tol, "value {}", r.value);
    }

    #[test]
    fn quadratic_growth_is_rejected() {
        let u = field::paraboloid(vec![0.0, 0.0], vec![0.0, 0.0], vec![2.0, 1.0], 1.0);
        let cfg = QuadratureConfig::default();
        let got = ifl_eval(&u, &[0.5, 0.0], s34(), &cfg);
        assert!(matches!(got, Err(Error::GrowthViolation(_))), "{got:?}");
    }

    #[test]
    fn cusp_tip_is_rejected() {
        let u = field::cusp(1.0, 0.0, vec![0.0, 0.0], 0.75).unwrap();
        let cfg = QuadratureConfig::default();
        let got = one_sided_integral(&u, &[0.0, 0.0], &[1.0, 0.0], s34(), &cfg);
        assert!(
            matches!(got, Err(Error::MissingRegularity(_, _))),
            "{got:?}"
        );
    }

    #[test]
    fn one_sided_rejects_sloped_points() {
        let u = field::cusp(1.0, 0.0, vec![0.0], 0.75).unwrap();
        let cfg = QuadratureConfig::default();
        let got = one_sided_integral(&u, &[0.7], &[1.0], s34(), &cfg);
        assert!(matches!(got, Err(Error::DivergentIntegral(_))), "{got:?}");
    }

    #[test]
    fn compose_patches_values() {
        let u = field::constant(2, 1.0);
        let phi = field::paraboloid(vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 1.0], 0.5);
        let t = compose_truncated(&u, &phi, &[0.0, 0.0], 0.5).unwrap();
        assert!((t.eval(&[0.0, 0.0]) - 0.5).abs() < 1e-15);
        assert!((t.eval(&[1.0, 0.0]) - 1.0).abs() < 1e-15);
        // inside regularity present, boundary absent
        assert!(t.c11_at(&[0.1, 0.0]).is_some());
        assert!(t.c11_at(&[0.5, 0.0]).is_none());
    }
}
