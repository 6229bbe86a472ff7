//! Scalar fields: the universal carrier for solutions, data, barriers and
//! obstacles. A field is an evaluation rule plus a declared growth class,
//! an optional analytic gradient, and optional per-point C^{1,1} control.

use crate::error::{Error, Result};
use crate::geom;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Declared behavior at infinity; controls the analytic tail of the
/// singular integrals. `Power { c, alpha }` means |u(x)| <= c*(1+|x|)^alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Growth {
    Bounded { c0: f64 },
    Power { c: f64, alpha: f64 },
}

impl Growth {
    /// Envelope value C*(1+r)^alpha (or the constant bound).
    pub fn envelope(&self, r: f64) -> f64 {
        match *self {
            Growth::Bounded { c0 } => c0,
            Growth::Power { c, alpha } => c * (1.0 + r).powf(alpha),
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            Growth::Bounded { .. } => 0.0,
            Growth::Power { alpha, .. } => alpha,
        }
    }

    /// The weaker (larger) of two growth classes.
    pub fn weaker(&self, other: &Growth) -> Growth {
        match (*self, *other) {
            (Growth::Bounded { c0: a }, Growth::Bounded { c0: b }) => {
                Growth::Bounded { c0: a.max(b) }
            }
            (Growth::Power { c, alpha }, Growth::Bounded { c0 })
            | (Growth::Bounded { c0 }, Growth::Power { c, alpha }) => Growth::Power {
                c: c.max(c0),
                alpha,
            },
            (Growth::Power { c: c1, alpha: a1 }, Growth::Power { c: c2, alpha: a2 }) => {
                Growth::Power {
                    c: c1.max(c2),
                    alpha: a1.max(a2),
                }
            }
        }
    }
}

/// Second-order control at a point: |u(x0+z) - u(x0) - p.z| <= m*|z|^2 for
/// |z| < eta0 (p is the field's gradient at x0).
#[derive(Debug, Clone, Copy)]
pub struct C11 {
    pub m: f64,
    pub eta0: f64,
}

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type C11Fn = Arc<dyn Fn(&[f64]) -> Option<C11> + Send + Sync>;

/// An evaluable function on R^N with growth/regularity metadata.
#[derive(Clone)]
pub struct ScalarField {
    pub dim: usize,
    pub growth: Growth,
    eval: EvalFn,
    grad: Option<GradFn>,
    c11: Option<C11Fn>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("growth", &self.growth)
            .field("has_grad", &self.grad.is_some())
            .field("has_c11", &self.c11.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn new<F>(dim: usize, growth: Growth, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        ScalarField {
            dim,
            growth,
            eval: Arc::new(eval),
            grad: None,
            c11: None,
        }
    }

    pub fn with_grad<G>(mut self, grad: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn with_c11<C>(mut self, c11: C) -> Self
    where
        C: Fn(&[f64]) -> Option<C11> + Send + Sync + 'static,
    {
        self.c11 = Some(Arc::new(c11));
        self
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.eval)(x)
    }

    pub fn has_analytic_grad(&self) -> bool {
        self.grad.is_some()
    }

    /// Gradient at x: analytic when available, otherwise central
    /// differences with step `h_grad`.
    pub fn gradient(&self, x: &[f64], h_grad: f64) -> Vec<f64> {
        if let Some(g) = &self.grad {
            return g(x);
        }
        let mut out = vec![0.0; self.dim];
        let mut xp = x.to_vec();
        for i in 0..self.dim {
            xp[i] = x[i] + h_grad;
            let up = self.eval(&xp);
            xp[i] = x[i] - h_grad;
            let um = self.eval(&xp);
            xp[i] = x[i];
            out[i] = (up - um) / (2.0 * h_grad);
        }
        out
    }

    /// C^{1,1} control at x, if declared.
    pub fn c11_at(&self, x: &[f64]) -> Option<C11> {
        self.c11.as_ref().and_then(|c| c(x))
    }

    /// Require C^{1,1} data at x, with a second-difference probe as the
    /// diagnostic when it is missing: if the symmetric second differences
    /// look like eta^{2s-1} (non-summable against the kernel) we report
    /// MissingRegularity.
    pub fn require_c11(&self, x: &[f64], two_s: f64) -> Result<C11> {
        if let Some(c) = self.c11_at(x) {
            return Ok(c);
        }
        // Probe along the first axis and a diagonal at two scales.
        let mut worst: f64 = 0.0;
        let dirs = geom::sphere_directions(self.dim, 8);
        let mut buf_p = vec![0.0; self.dim];
        let mut buf_m = vec![0.0; self.dim];
        let u0 = self.eval(x);
        for d in dirs.iter().take(4) {
            for &eta in &[1e-2, 1e-3] {
                geom::axpy(&mut buf_p, x, eta, d);
                geom::axpy(&mut buf_m, x, -eta, d);
                let dd = (self.eval(&buf_p) + self.eval(&buf_m) - 2.0 * u0).abs();
                // ratio against the critical eta^{2s-1} profile
                worst = worst.max(dd / eta.powf(two_s - 1.0));
            }
        }
        Err(Error::MissingRegularity(
            x.to_vec(),
            format!(
                "no c11 data; second-difference probe ratio vs eta^(2s-1) is {:.3e}",
                worst
            ),
        ))
    }

    // ---- combinators -------------------------------------------------

    /// u + c (same growth up to the shifted constant).
    pub fn add_constant(&self, c: f64) -> ScalarField {
        let base = self.clone();
        let growth = match self.growth {
            Growth::Bounded { c0 } => Growth::Bounded { c0: c0 + c.abs() },
            Growth::Power { c: cc, alpha } => Growth::Power { c: cc + c.abs(), alpha },
        };
        let mut f = ScalarField::new(self.dim, growth, move |x| base.eval(x) + c);
        let g = self.clone();
        if self.grad.is_some() {
            f = f.with_grad(move |x| g.gradient(x, 0.0));
        }
        let g2 = self.clone();
        if self.c11.is_some() {
            f = f.with_c11(move |x| g2.c11_at(x));
        }
        f
    }

    /// t * u.
    pub fn scale_values(&self, t: f64) -> ScalarField {
        let base = self.clone();
        let growth = match self.growth {
            Growth::Bounded { c0 } => Growth::Bounded { c0: c0 * t.abs() },
            Growth::Power { c, alpha } => Growth::Power { c: c * t.abs(), alpha },
        };
        let mut f = ScalarField::new(self.dim, growth, move |x| t * base.eval(x));
        if self.grad.is_some() {
            let g = self.clone();
            f = f.with_grad(move |x| geom::scale(&g.gradient(x, 0.0), t));
        }
        if self.c11.is_some() {
            let g = self.clone();
            f = f.with_c11(move |x| {
                g.c11_at(x).map(|c| C11 {
                    m: c.m * t.abs(),
                    eta0: c.eta0,
                })
            });
        }
        f
    }

    /// u1 + u2.
    pub fn sum(&self, other: &ScalarField) -> ScalarField {
        assert_eq!(self.dim, other.dim);
        let (a, b) = (self.clone(), other.clone());
        let growth = sum_growth(&self.growth, &other.growth);
        let mut f = ScalarField::new(self.dim, growth, move |x| a.eval(x) + b.eval(x));
        if self.grad.is_some() && other.grad.is_some() {
            let (a, b) = (self.clone(), other.clone());
            f = f.with_grad(move |x| geom::add(&a.gradient(x, 0.0), &b.gradient(x, 0.0)));
        }
        if self.c11.is_some() && other.c11.is_some() {
            let (a, b) = (self.clone(), other.clone());
            f = f.with_c11(move |x| match (a.c11_at(x), b.c11_at(x)) {
                (Some(ca), Some(cb)) => Some(C11 {
                    m: ca.m + cb.m,
                    eta0: ca.eta0.min(cb.eta0),
                }),
                _ => None,
            });
        }
        f
    }

    /// u1 - u2 (used by the sandwich checks).
    pub fn difference(&self, other: &ScalarField) -> ScalarField {
        self.sum(&other.scale_values(-1.0))
    }

    /// Precomposition with a rigid motion: x ↦ u(R x + t).
    pub fn precompose_rigid(&self, rot: geom::Rotation, shift: Vec<f64>) -> ScalarField {
        assert_eq!(self.dim, rot.dim);
        assert_eq!(self.dim, shift.len());
        let base = self.clone();
        let growth = match self.growth {
            Growth::Bounded { c0 } => Growth::Bounded { c0 },
            // |Rx+t| <= |x| + |t|
            Growth::Power { c, alpha } => Growth::Power {
                c: c * (1.0 + geom::norm(&shift)).powf(alpha.max(0.0)),
                alpha,
            },
        };
        let (r, t) = (rot.clone(), shift.clone());
        let mut f = ScalarField::new(self.dim, growth, move |x| {
            base.eval(&geom::add(&r.apply(x), &t))
        });
        if self.c11.is_some() {
            let base = self.clone();
            let (r, t) = (rot.clone(), shift.clone());
            f = f.with_c11(move |x| base.c11_at(&geom::add(&r.apply(x), &t)));
        }
        if self.grad.is_some() {
            let base = self.clone();
            f = f.with_grad(move |x| {
                let y = geom::add(&rot.apply(x), &shift);
                // grad (u ∘ T)(x) = R^T grad u(Tx); R^T = R^{-1}
                rot.inverse().apply(&base.gradient(&y, 0.0))
            });
        }
        f
    }
}

fn sum_growth(a: &Growth, b: &Growth) -> Growth {
    match (*a, *b) {
        (Growth::Bounded { c0: x }, Growth::Bounded { c0: y }) => Growth::Bounded { c0: x + y },
        (Growth::Power { c, alpha }, Growth::Bounded { c0 })
        | (Growth::Bounded { c0 }, Growth::Power { c, alpha }) => Growth::Power {
            c: c + c0,
            alpha,
        },
        (Growth::Power { c: c1, alpha: a1 }, Growth::Power { c: c2, alpha: a2 }) => Growth::Power {
            c: c1 + c2,
            alpha: a1.max(a2),
        },
    }
}

/// Declarative field primitives, so configs can name them.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    /// c
    Constant { dim: usize, c: f64 },
    /// coef.x + b
    Affine { coef: Vec<f64>, b: f64 },
    /// a*|x-center|^(2s-1) + b
    Cusp {
        a: f64,
        b: f64,
        center: Vec<f64>,
        s: f64,
    },
    /// ((x_1)^+)^s
    HalfProfile { dim: usize, s: f64 },
    /// c + linear.(x-center) - sum_i quad_i (x_i-center_i)^2  (quadratic growth)
    Paraboloid {
        center: Vec<f64>,
        linear: Vec<f64>,
        quad: Vec<f64>,
        c: f64,
    },
    /// max(a*(r0^2 - |x-center|^2), 0)
    CutParaboloid {
        a: f64,
        r0: f64,
        center: Vec<f64>,
    },
    /// height * (1 - (|x-center|/radius)^2)^3 inside, 0 outside
    Bump {
        center: Vec<f64>,
        radius: f64,
        height: f64,
    },
}

impl FieldSpec {
    pub fn dim(&self) -> usize {
        match self {
            FieldSpec::Constant { dim, .. } | FieldSpec::HalfProfile { dim, .. } => *dim,
            FieldSpec::Affine { coef, .. } => coef.len(),
            FieldSpec::Cusp { center, .. }
            | FieldSpec::Paraboloid { center, .. }
            | FieldSpec::CutParaboloid { center, .. }
            | FieldSpec::Bump { center, .. } => center.len(),
        }
    }

    pub fn build(&self) -> Result<ScalarField> {
        match self.clone() {
            FieldSpec::Constant { dim, c } => Ok(constant(dim, c)),
            FieldSpec::Affine { coef, b } => Ok(affine(coef, b)),
            FieldSpec::Cusp { a, b, center, s } => cusp(a, b, center, s),
            FieldSpec::HalfProfile { dim, s } => half_profile(dim, s),
            FieldSpec::Paraboloid {
                center,
                linear,
                quad,
                c,
            } => Ok(paraboloid(center, linear, quad, c)),
            FieldSpec::CutParaboloid { a, r0, center } => cut_paraboloid(a, r0, center),
            FieldSpec::Bump {
                center,
                radius,
                height,
            } => bump(center, radius, height),
        }
    }
}

pub fn constant(dim: usize, c: f64) -> ScalarField {
    ScalarField::new(dim, Growth::Bounded { c0: c.abs() }, move |_| c)
        .with_grad(move |x: &[f64]| vec![0.0; x.len()])
        .with_c11(|_| Some(C11 { m: 0.0, eta0: f64::INFINITY }))
}

pub fn affine(coef: Vec<f64>, b: f64) -> ScalarField {
    let dim = coef.len();
    let cnorm = geom::norm(&coef);
    let coef2 = coef.clone();
    ScalarField::new(
        dim,
        Growth::Power { c: cnorm + b.abs(), alpha: 1.0 },
        move |x| geom::dot(&coef, x) + b,
    )
    .with_grad(move |_: &[f64]| coef2.clone())
    .with_c11(|_| Some(C11 { m: 0.0, eta0: f64::INFINITY }))
}

/// The cusp a*|x - center|^(2s-1) + b: the fundamental-solution profile.
pub fn cusp(a: f64, b: f64, center: Vec<f64>, s: f64) -> Result<ScalarField> {
    if !(0.5 < s && s < 1.0) {
        return Err(Error::ParameterViolation(format!(
            "cusp exponent requires s in (1/2,1), got {s}"
        )));
    }
    let dim = center.len();
    let g = 2.0 * s - 1.0;
    let cshift = 1.0 + geom::norm(&center);
    let c1 = center.clone();
    let c2 = center.clone();
    let c3 = center.clone();
    Ok(ScalarField::new(
        dim,
        Growth::Power {
            c: a.abs() * cshift + b.abs(),
            alpha: g,
        },
        move |x| a * geom::dist(x, &c1).powf(g) + b,
    )
    .with_grad(move |x: &[f64]| {
        let d = geom::sub(x, &c2);
        let r = geom::norm(&d);
        if r == 0.0 {
            vec![f64::NAN; d.len()]
        } else {
            geom::scale(&d, a * g * r.powf(g - 2.0))
        }
    })
    .with_c11(move |x: &[f64]| {
        let r = geom::dist(x, &c3);
        if r <= 0.0 {
            None // no C^{1,1} touching at the tip
        } else {
            // |D^2| eigenvalues are O(|a| g r^{g-2}); worst over B_{r/2}.
            let rho = r / 2.0;
            Some(C11 {
                m: a.abs() * g.max(1.0 - g) * rho.powf(g - 2.0),
                eta0: rho,
            })
        }
    }))
}

/// ((x_1)^+)^s — annihilated by the operator on {x_1 > 0}.
pub fn half_profile(dim: usize, s: f64) -> Result<ScalarField> {
    if !(0.5 < s && s < 1.0) {
        return Err(Error::ParameterViolation(format!(
            "half profile requires s in (1/2,1), got {s}"
        )));
    }
    Ok(ScalarField::new(
        dim,
        Growth::Power { c: 1.0, alpha: s },
        move |x| if x[0] > 0.0 { x[0].powf(s) } else { 0.0 },
    )
    .with_grad(move |x: &[f64]| {
        let mut g = vec![0.0; x.len()];
        if x[0] > 0.0 {
            g[0] = s * x[0].powf(s - 1.0);
        }
        g
    })
    .with_c11(move |x: &[f64]| {
        let t = x[0];
        if t > 0.0 {
            let rho = t / 2.0;
            Some(C11 {
                m: 0.5 * s * (1.0 - s) * rho.powf(s - 2.0),
                eta0: rho,
            })
        } else if t < 0.0 {
            Some(C11 { m: 0.0, eta0: -t })
        } else {
            None // crease point
        }
    }))
}

/// c + linear.(x-center) - sum_i quad_i*(x_i-center_i)^2. Quadratic growth:
/// not admissible for the operator's tail, but used by sup/inf convolutions
/// and as local test patches through compose_truncated.
pub fn paraboloid(center: Vec<f64>, linear: Vec<f64>, quad: Vec<f64>, c: f64) -> ScalarField {
    let dim = center.len();
    assert_eq!(linear.len(), dim);
    assert_eq!(quad.len(), dim);
    let growth_c =
        c.abs() + geom::norm(&linear) + quad.iter().map(|q| q.abs()).sum::<f64>() + 1.0;
    let (c1, l1, q1) = (center.clone(), linear.clone(), quad.clone());
    let (c2, l2, q2) = (center.clone(), linear.clone(), quad.clone());
    let mmax: f64 = quad.iter().fold(0.0f64, |m, q| m.max(q.abs()));
    ScalarField::new(
        dim,
        Growth::Power { c: growth_c, alpha: 2.0 },
        move |x| {
            let mut v = c;
            for i in 0..x.len() {
                let d = x[i] - c1[i];
                v += l1[i] * d - q1[i] * d * d;
            }
            v
        },
    )
    .with_grad(move |x: &[f64]| {
        (0..x.len())
            .map(|i| l2[i] - 2.0 * q2[i] * (x[i] - c2[i]))
            .collect()
    })
    .with_c11(move |_: &[f64]| Some(C11 { m: mmax, eta0: f64::INFINITY }))
}

/// max(a*(r0^2 - |x-center|^2), 0): the cut paraboloid of the barrier
/// constructions. Requires a > 0, r0 > 0; bounded by a*r0^2.
pub fn cut_paraboloid(a: f64, r0: f64, center: Vec<f64>) -> Result<ScalarField> {
    if a <= 0.0 || r0 <= 0.0 {
        return Err(Error::ParameterViolation(format!(
            "cut paraboloid needs a > 0, r0 > 0 (got a={a}, r0={r0})"
        )));
    }
    let dim = center.len();
    let c1 = center.clone();
    let c2 = center.clone();
    let c3 = center.clone();
    Ok(ScalarField::new(
        dim,
        Growth::Bounded { c0: a * r0 * r0 },
        move |x| {
            let r2 = geom::dist(x, &c1).powi(2);
            (a * (r0 * r0 - r2)).max(0.0)
        },
    )
    .with_grad(move |x: &[f64]| {
        let d = geom::sub(x, &c2);
        let r = geom::norm(&d);
        if r < r0 {
            geom::scale(&d, -2.0 * a)
        } else {
            vec![0.0; d.len()]
        }
    })
    .with_c11(move |x: &[f64]| {
        let r = geom::dist(x, &c3);
        if (r - r0).abs() < 1e-14 {
            None // gradient kink on the cut sphere
        } else {
            Some(C11 {
                m: a,
                eta0: (r - r0).abs(),
            })
        }
    }))
}

/// Smooth compactly supported bump height*(1-(|x-c|/R)^2)^3.
pub fn bump(center: Vec<f64>, radius: f64, height: f64) -> Result<ScalarField> {
    if radius <= 0.0 {
        return Err(Error::ParameterViolation(format!(
            "bump radius must be positive, got {radius}"
        )));
    }
    let dim = center.len();
    let c1 = center.clone();
    let c2 = center.clone();
    let m = 18.0 * height.abs() / (radius * radius);
    Ok(ScalarField::new(
        dim,
        Growth::Bounded { c0: height.abs() },
        move |x| {
            let u2 = geom::dist(x, &c1).powi(2) / (radius * radius);
            if u2 >= 1.0 {
                0.0
            } else {
                height * (1.0 - u2).powi(3)
            }
        },
    )
    .with_grad(move |x: &[f64]| {
        let d = geom::sub(x, &c2);
        let u2 = geom::dot(&d, &d) / (radius * radius);
        if u2 >= 1.0 {
            vec![0.0; d.len()]
        } else {
            // d/dx of h*(1-|x-c|^2/R^2)^3
            geom::scale(&d, -6.0 * height * (1.0 - u2).powi(2) / (radius * radius))
        }
    })
    .with_c11(move |_: &[f64]| Some(C11 { m, eta0: f64::INFINITY })))
}

/// Pointwise max of two fields (sub-solution combination).
pub fn pointwise_max(a: &ScalarField, b: &ScalarField) -> ScalarField {
    assert_eq!(a.dim, b.dim);
    let (f, g) = (a.clone(), b.clone());
    ScalarField::new(a.dim, a.growth.weaker(&b.growth), move |x| {
        f.eval(x).max(g.eval(x))
    })
}

/// Pointwise min of two fields (super-solution combination).
pub fn pointwise_min(a: &ScalarField, b: &ScalarField) -> ScalarField {
    assert_eq!(a.dim, b.dim);
    let (f, g) = (a.clone(), b.clone());
    ScalarField::new(a.dim, a.growth.weaker(&b.growth), move |x| {
        f.eval(x).min(g.eval(x))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_gradient_matches_fd() {
        let u = cusp(1.5, 0.3, vec![0.0, 0.0], 0.75).unwrap();
        let x = vec![0.8, -0.6];
        let g = u.gradient(&x, 0.0);
        let mut fd = vec![0.0; 2];
        let h = 1e-6;
        for i in 0..2 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            fd[i] = (u.eval(&xp) - u.eval(&xm)) / (2.0 * h);
        }
        for i in 0..2 {
            assert!((g[i] - fd[i]).abs() < 1e-6, "{:?} vs {:?}", g, fd);
        }
    }

    #[test]
    fn cusp_c11_bound_holds() {
        let u = cusp(1.0, 0.0, vec![0.0], 0.75).unwrap();
        let x = vec![1.0];
        let c = u.c11_at(&x).unwrap();
        let p = u.gradient(&x, 0.0);
        for k in 1..40 {
            let z = c.eta0 * (k as f64) / 40.0;
            for sgn in [-1.0, 1.0] {
                let lhs = (u.eval(&[1.0 + sgn * z]) - u.eval(&x) - p[0] * sgn * z).abs();
                assert!(lhs <= c.m * z * z + 1e-14, "z={z}, lhs={lhs}");
            }
        }
    }

    #[test]
    fn cusp_tip_has_no_c11() {
        let u = cusp(1.0, 0.0, vec![0.0, 0.0], 0.75).unwrap();
        assert!(u.c11_at(&[0.0, 0.0]).is_none());
        assert!(u.require_c11(&[0.0, 0.0], 1.5).is_err());
    }

    #[test]
    fn half_profile_crease() {
        let u = half_profile(1, 0.8).unwrap();
        assert!(u.c11_at(&[0.0]).is_none());
        assert!(u.c11_at(&[0.4]).is_some());
        assert!(u.c11_at(&[-0.4]).is_some());
        assert_eq!(u.eval(&[-1.0]), 0.0);
    }

    #[test]
    fn bump_support() {
        let u = bump(vec![1.0, 0.0], 0.5, 2.0).unwrap();
        assert_eq!(u.eval(&[2.0, 0.0]), 0.0);
        assert!((u.eval(&[1.0, 0.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn field_spec_roundtrip() {
        let spec = FieldSpec::Cusp {
            a: 2.0,
            b: 1.0,
            center: vec![0.5, 0.5],
            s: 0.75,
        };
        let f = spec.build().unwrap();
        assert_eq!(f.dim, 2);
        let json = serde_json::to_string(&spec).unwrap();
        let back: FieldSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.dim(), 2);
        assert!((back.build().unwrap().eval(&[1.0, 1.0]) - f.eval(&[1.0, 1.0])).abs() < 1e-15);
    }
}
