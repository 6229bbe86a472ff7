//! Cross-cutting analysis tooling: Hölder seminorm and modulus-decay
//! measurement, sup/inf convolution approximations with touching-paraboloid
//! certificates, envelope combination of sub/supersolutions, blow-up
//! rescaling, quadratic-patch viscosity spot-checks, and a uniform-limit
//! stability probe.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{self, Growth, ScalarField, C11};
use crate::geom;
use crate::operator::{compose_truncated, ifl_eval, Exponent, QuadratureConfig};

/// A measured Hölder estimate: global seminorm plus the restriction of the
/// pair maximization to dyadic separation scales.
#[derive(Debug, Clone, Serialize)]
pub struct HolderEstimate {
    pub gamma: f64,
    /// sup over sampled pairs of |f(x)−f(y)| / |x−y|^γ.
    pub seminorm: f64,
    /// (δ, sup over pairs with |x−y| ≤ δ) for a decreasing dyadic δ-ladder.
    pub modulus: Vec<(f64, f64)>,
    pub pairs_used: usize,
}

fn box_diam(lo: &[f64], hi: &[f64]) -> f64 {
    lo.iter()
        .zip(hi)
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt()
}

fn sample_in_box(rng: &mut ChaCha8Rng, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    lo.iter()
        .zip(hi)
        .map(|(&a, &b)| rng.gen_range(a..b))
        .collect()
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = geom::norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return geom::scale(&v, 1.0 / n);
        }
    }
}

/// Measures [f]_{C^{0,γ}} over a box by stratified random pairs plus
/// near-neighbor grid pairs, and the modulus ladder at dyadic separations.
pub fn holder_seminorm(
    f: &ScalarField,
    gamma: f64,
    lo: &[f64],
    hi: &[f64],
    pair_budget: usize,
    seed: u64,
) -> Result<HolderEstimate> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::ParameterViolation(format!(
            "Hölder exponent must satisfy 0 < γ ≤ 1, got {gamma}"
        )));
    }
    if lo.len() != f.dim || hi.len() != f.dim || lo.iter().zip(hi).any(|(a, b)| a >= b) {
        return Err(Error::ParameterViolation(format!(
            "invalid region for a {}-d field: lo = {lo:?}, hi = {hi:?}",
            f.dim
        )));
    }
    let dim = f.dim;
    let diam = box_diam(lo, hi);
    // Dyadic ladder: the largest 2^{-k} not above the diameter, then 12
    // halvings.
    let k0 = (-diam.log2()).ceil().max(-20.0) as i32;
    let deltas: Vec<f64> = (k0..k0 + 12).map(|k| 2.0_f64.powi(-k)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = pair_budget.max(64);
    let per = (budget / (deltas.len() + 1)).max(16);
    let mut pairs: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    // Unconstrained pairs for the global seminorm.
    for _ in 0..per {
        let x = sample_in_box(&mut rng, lo, hi);
        let y = sample_in_box(&mut rng, lo, hi);
        let r = geom::dist(&x, &y);
        if r > 0.0 {
            pairs.push((x, y, r));
        }
    }
    // Stratified pairs at each dyadic scale.
    for &d in &deltas {
        let mut made = 0;
        let mut tries = 0;
        while made < per && tries < 20 * per {
            tries += 1;
            let x = sample_in_box(&mut rng, lo, hi);
            let dir = random_unit(&mut rng, dim);
            let r = d * rng.gen_range(0.5..1.0);
            let y: Vec<f64> = x.iter().zip(&dir).map(|(a, v)| a + r * v).collect();
            if y.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v <= b) {
                pairs.push((x, y, r));
                made += 1;
            }
        }
    }
    // Near-neighbor grid pairs: all pairs within 4 grid steps.
    let n_axis: usize = if dim == 1 {
        129
    } else if dim == 2 {
        33
    } else {
        7
    };
    let mut nodes: Vec<Vec<f64>> = vec![vec![]];
    for i in 0..dim {
        let mut next = Vec::new();
        for base in &nodes {
            for j in 0..n_axis {
                let mut v = base.clone();
                v.push(lo[i] + (hi[i] - lo[i]) * j as f64 / (n_axis - 1) as f64);
                next.push(v);
            }
        }
        nodes = next;
    }
    let step = (hi[0] - lo[0]) / (n_axis - 1) as f64;
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            let r = geom::dist(&nodes[i], &nodes[j]);
            if r > 0.0 && r <= 4.0 * step {
                pairs.push((nodes[i].clone(), nodes[j].clone(), r));
            }
        }
    }

    let ratios: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|(x, y, r)| (*r, (f.eval(x) - f.eval(y)).abs() / r.powf(gamma)))
        .collect();
    let mut sorted = ratios.clone();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Prefix maxima give the modulus at every δ.
    let mut prefix: Vec<f64> = Vec::with_capacity(sorted.len());
    let mut run = 0.0_f64;
    for &(_, q) in &sorted {
        run = run.max(q);
        prefix.push(run);
    }
    let seminorm = run;
    let modulus = deltas
        .iter()
        .map(|&d| {
            let idx = sorted.partition_point(|&(r, _)| r <= d);
            let v = if idx == 0 { 0.0 } else { prefix[idx - 1] };
            (d, v)
        })
        .collect();
    Ok(HolderEstimate {
        gamma,
        seminorm,
        modulus,
        pairs_used: sorted.len(),
    })
}

/// Modulus decay measurement: the ratio of the modulus at a probe scale to
/// the global seminorm. Small ratios certify the vanishing-modulus class;
/// homogeneous profiles sampled at their tip give ratio ≈ 1.
pub fn modulus_decay_check(
    f: &ScalarField,
    gamma: f64,
    lo: &[f64],
    hi: &[f64],
    delta_probe: f64,
    pair_budget: usize,
    seed: u64,
) -> Result<(HolderEstimate, f64)> {
    let est = holder_seminorm(f, gamma, lo, hi, pair_budget, seed)?;
    if est.seminorm == 0.0 {
        return Ok((est, 0.0));
    }
    // Interpolate the ladder at the probe scale: smallest ladder δ ≥ probe.
    let mut probe_val = est.seminorm;
    for &(d, v) in &est.modulus {
        if d >= delta_probe {
            probe_val = v;
        }
    }
    let ratio = probe_val / est.seminorm;
    Ok((est, ratio))
}

/// Which convolution regularization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvKind {
    Sup,
    Inf,
}

/// A sup- or inf-convolution of a base field, realized as an evaluable
/// field via bounded local maximization.
#[derive(Clone)]
pub struct ConvolutionField {
    pub base: ScalarField,
    pub eps: f64,
    pub kind: ConvKind,
    pub field: ScalarField,
}

fn conv_admissible(u: &ScalarField) -> Result<()> {
    match u.growth {
        Growth::Bounded { .. } => Ok(()),
        Growth::Power { alpha, .. } if alpha < 2.0 - 1e-9 => Ok(()),
        Growth::Power { c, alpha } => Err(Error::UnboundedSearch(format!(
            "sup/inf convolution needs sub-quadratic growth, got C = {c}, alpha = {alpha}"
        ))),
    }
}

/// Search radius: any maximizer satisfies |x−x0|² ≤ ε(osc + ε) with the
/// oscillation bounded by the growth envelope.
fn conv_radius(u: &ScalarField, eps: f64, x0: &[f64]) -> f64 {
    let r0 = geom::norm(x0);
    let mut radius = (eps * (2.0 * u.growth.envelope(r0 + 1.0) + eps)).sqrt();
    for _ in 0..3 {
        radius = (eps * (2.0 * u.growth.envelope(r0 + radius) + eps)).sqrt();
    }
    1.5 * radius + 1e-9
}

/// sign = +1 maximizes u(x) + ε − |x−x0|²/ε (sup-convolution);
/// sign = −1 minimizes u(x) − ε + |x−x0|²/ε (inf-convolution).
/// Returns (argopt, value).
fn conv_search(u: &ScalarField, eps: f64, sign: f64, x0: &[f64]) -> (Vec<f64>, f64) {
    let dim = u.dim;
    let radius = conv_radius(u, eps, x0);
    let score = |x: &[f64]| -> f64 {
        let d2 = geom::dist(x, x0).powi(2);
        sign * (u.eval(x) + sign * eps) - d2 / eps
    };
    let n: usize = match dim {
        1 => 257,
        2 => 49,
        _ => 9,
    };
    let mut best_x = x0.to_vec();
    let mut best = score(&best_x);
    let mut idx = vec![0usize; dim];
    loop {
        let x: Vec<f64> = (0..dim)
            .map(|i| x0[i] - radius + 2.0 * radius * idx[i] as f64 / (n - 1) as f64)
            .collect();
        let v = score(&x);
        if v > best {
            best = v;
            best_x = x;
        }
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == dim {
                break;
            }
            idx[i] += 1;
            if idx[i] < n {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == dim {
            break;
        }
    }
    // Per-axis golden polish.
    let cell = 2.0 * radius / (n - 1) as f64;
    for _round in 0..3 {
        for i in 0..dim {
            let xc = best_x.clone();
            let mut g = |t: f64| {
                let mut x = xc.clone();
                x[i] = t;
                score(&x)
            };
            let (t, v) = geom::golden_max(&mut g, xc[i] - cell, xc[i] + cell, 40);
            if v > best {
                best = v;
                best_x[i] = t;
            }
        }
    }
    (best_x, sign * best)
}

/// The sup-convolution u^ε(x0) = sup_x {u(x) + ε − |x−x0|²/ε}.
pub fn sup_convolution(u: &ScalarField, eps: f64) -> Result<ConvolutionField> {
    conv_field(u, eps, ConvKind::Sup)
}

/// The inf-convolution u_ε(x0) = inf_x {u(x) − ε + |x−x0|²/ε}.
pub fn inf_convolution(u: &ScalarField, eps: f64) -> Result<ConvolutionField> {
    conv_field(u, eps, ConvKind::Inf)
}

fn conv_field(u: &ScalarField, eps: f64, kind: ConvKind) -> Result<ConvolutionField> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::ParameterViolation(format!(
            "convolution parameter must be positive, got {eps}"
        )));
    }
    conv_admissible(u)?;
    let sign = match kind {
        ConvKind::Sup => 1.0,
        ConvKind::Inf => -1.0,
    };
    let growth = match u.growth {
        Growth::Bounded { c0 } => Growth::Bounded { c0: c0 + eps },
        Growth::Power { c, alpha } => Growth::Power {
            c: 2.0_f64.powf(alpha) * c + eps + 1.0,
            alpha,
        },
    };
    let base = u.clone();
    let inner = u.clone();
    let field = ScalarField::new(u.dim, growth, move |x0| {
        conv_search(&inner, eps, sign, x0).1
    });
    Ok(ConvolutionField {
        base,
        eps,
        kind,
        field,
    })
}

impl ConvolutionField {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.field.eval(x)
    }

    /// The touching paraboloid at `x0`, built from the arg-optimum: a
    /// concave (sup) or convex (inf) paraboloid of opening 2/ε touching the
    /// convolution from below (resp. above) at `x0`. Returns (arg-optimum,
    /// paraboloid field).
    pub fn touching_paraboloid(&self, x0: &[f64]) -> (Vec<f64>, ScalarField) {
        let sign = match self.kind {
            ConvKind::Sup => 1.0,
            ConvKind::Inf => -1.0,
        };
        let (xs, _) = conv_search(&self.base, self.eps, sign, x0);
        let c = self.base.eval(&xs) + sign * self.eps;
        let q = vec![sign / self.eps; self.base.dim];
        let p = field::paraboloid(xs.clone(), vec![0.0; self.base.dim], q, c);
        (xs, p)
    }
}

/// Pointwise maximum of two sub-solutions (or minimum of two
/// super-solutions, via [`combine_min`]). Keeps the weaker growth class and
/// carries a sound local C^{1,1} certificate wherever the active branch
/// dominates by a positive gap.
pub fn combine_max(a: &ScalarField, b: &ScalarField) -> Result<ScalarField> {
    combine(a, b, true)
}

/// Pointwise minimum; see [`combine_max`].
pub fn combine_min(a: &ScalarField, b: &ScalarField) -> Result<ScalarField> {
    combine(a, b, false)
}

fn combine(a: &ScalarField, b: &ScalarField, take_max: bool) -> Result<ScalarField> {
    if a.dim != b.dim {
        return Err(Error::ParameterViolation(format!(
            "cannot combine fields of dimension {} and {}",
            a.dim, b.dim
        )));
    }
    let growth = a.growth.weaker(&b.growth);
    let (ae, be) = (a.clone(), b.clone());
    let (ag, bg) = (a.clone(), b.clone());
    let (ac, bc) = (a.clone(), b.clone());
    let pick = move |fa: f64, fb: f64| -> bool {
        // true -> a is active
        if take_max {
            fa >= fb
        } else {
            fa <= fb
        }
    };
    let pick_g = pick;
    let pick_c = pick;
    Ok(ScalarField::new(a.dim, growth, move |x| {
        let (fa, fb) = (ae.eval(x), be.eval(x));
        if take_max {
            fa.max(fb)
        } else {
            fa.min(fb)
        }
    })
    .with_grad(move |x: &[f64]| {
        let (fa, fb) = (ag.eval(x), bg.eval(x));
        if pick_g(fa, fb) {
            ag.gradient(x, 1e-6)
        } else {
            bg.gradient(x, 1e-6)
        }
    })
    .with_c11(move |x: &[f64]| {
        let (fa, fb) = (ac.eval(x), bc.eval(x));
        let gap = (fa - fb).abs();
        if gap == 0.0 {
            return None;
        }
        let (act, oth) = if pick_c(fa, fb) {
            (&ac, &bc)
        } else {
            (&bc, &ac)
        };
        let cert = act.c11_at(x)?;
        let co = oth.c11_at(x);
        // Radius inside which the other branch cannot close the gap:
        // gap − Lη − Mη² > 0 with L the summed local slopes and M the
        // summed curvature constants.
        let l = geom::norm(&act.gradient(x, 1e-6)) + geom::norm(&oth.gradient(x, 1e-6));
        let m = cert.m + co.map(|c| c.m).unwrap_or(0.0);
        let eta_gap = if m > 0.0 {
            (-l + (l * l + 4.0 * m * gap).sqrt()) / (2.0 * m)
        } else if l > 0.0 {
            gap / l
        } else {
            f64::INFINITY
        };
        Some(C11 {
            m: cert.m,
            eta0: cert.eta0.min(eta_gap),
        })
    }))
}

/// Metadata of a blow-up rescaling.
#[derive(Debug, Clone, Serialize)]
pub struct RescaleInfo {
    pub lambda: f64,
    /// Amplitude factor λ^{1−2s}.
    pub factor: f64,
    /// The Hölder exponent preserved exactly by this normalization.
    pub preserved_exponent: f64,
}

/// The blow-up rescaling x ↦ λ^{1−2s}[u(x_c + λRx) − u(x_c)]. Preserves the
/// C^{0,2s−1} seminorm exactly.
pub fn blowup_rescale(
    u: &ScalarField,
    x_c: &[f64],
    lambda: f64,
    rot: &geom::Rotation,
    s: Exponent,
) -> Result<(ScalarField, RescaleInfo)> {
    if x_c.len() != u.dim || rot.dim != u.dim {
        return Err(Error::ParameterViolation(format!(
            "blow-up center/rotation dimension mismatch for a {}-d field",
            u.dim
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::ParameterViolation(format!(
            "blow-up scale must be positive, got {lambda}"
        )));
    }
    let factor = lambda.powf(1.0 - s.two_s());
    let u0 = u.eval(x_c);
    let center = x_c.to_vec();
    let map = {
        let rot = rot.clone();
        let center = center.clone();
        move |x: &[f64]| -> Vec<f64> {
            let rx = rot.apply(x);
            center
                .iter()
                .zip(&rx)
                .map(|(c, v)| c + lambda * v)
                .collect()
        }
    };
    let growth = match u.growth {
        Growth::Bounded { c0 } => Growth::Bounded {
            c0: 2.0 * factor * c0 + 1e-300,
        },
        Growth::Power { c, alpha } => Growth::Power {
            c: factor
                * (c * (1.0 + geom::norm(x_c)).powf(alpha) * (1.0 + lambda).powf(alpha)
                    + u0.abs())
                + 1e-300,
            alpha,
        },
    };
    let (ue, m1) = (u.clone(), map.clone());
    let (ug, m2, rot_inv) = (u.clone(), map.clone(), rot.inverse());
    let (uc, m3) = (u.clone(), map);
    let out = ScalarField::new(u.dim, growth, move |x| factor * (ue.eval(&m1(x)) - u0))
        .with_grad(move |x: &[f64]| {
            let gy = ug.gradient(&m2(x), 1e-7);
            // d/dx u(x_c + λRx) = λ Rᵀ ∇u(y); Rᵀ = R⁻¹ for rotations.
            geom::scale(&rot_inv.apply(&gy), factor * lambda)
        })
        .with_c11(move |x: &[f64]| {
            uc.c11_at(&m3(x)).map(|c| C11 {
                m: factor * lambda * lambda * c.m,
                eta0: c.eta0 / lambda,
            })
        });
    Ok((
        out,
        RescaleInfo {
            lambda,
            factor,
            preserved_exponent: s.two_s() - 1.0,
        },
    ))
}

/// Verdict of a quadratic-patch viscosity spot-check at one point.
#[derive(Debug, Clone, Serialize)]
pub struct SpotVerdict {
    pub point: Vec<f64>,
    /// Gradient of the fitted patch.
    pub grad_norm: f64,
    /// True when the patch gradient is below the dispatch threshold (the
    /// caller may skip such points for nonzero-gradient-only checks).
    pub zero_gradient: bool,
    /// Largest one-sided violation of the touching property on the sampled
    /// ball (≤ 0 means the patch genuinely touches from the required side).
    pub touch_defect: f64,
    pub residual: f64,
    pub err_est: f64,
    pub pass: bool,
}

/// Side of the viscosity inequality to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckSide {
    /// Subsolution: residual ≥ −tol with a patch touching from above.
    Sub,
    /// Supersolution: residual ≤ +tol with a patch touching from below.
    Super,
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in (r + 1)..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}

/// Least-squares quadratic model of `u` over the ball of radius `r` around
/// `x`: returns (constant, gradient, Hessian).
fn fit_quadratic(
    u: &ScalarField,
    x: &[f64],
    r: f64,
) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>)> {
    let dim = x.len();
    let mut offsets: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    for i in 0..dim {
        for sc in [1.0, -1.0, 0.5, -0.5] {
            let mut o = vec![0.0; dim];
            o[i] = sc * r;
            offsets.push(o);
        }
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut o = vec![0.0; dim];
                o[i] = si * r / 2.0_f64.sqrt();
                o[j] = sj * r / 2.0_f64.sqrt();
                offsets.push(o);
            }
        }
    }
    // Basis: 1, d_i, d_i d_j (i ≤ j).
    let n_basis = 1 + dim + dim * (dim + 1) / 2;
    let basis = |d: &[f64]| -> Vec<f64> {
        let mut phi = Vec::with_capacity(n_basis);
        phi.push(1.0);
        phi.extend_from_slice(d);
        for i in 0..dim {
            for j in i..dim {
                phi.push(d[i] * d[j]);
            }
        }
        phi
    };
    let mut ata = vec![vec![0.0; n_basis]; n_basis];
    let mut atb = vec![0.0; n_basis];
    for o in &offsets {
        let y: Vec<f64> = x.iter().zip(o).map(|(a, b)| a + b).collect();
        let v = u.eval(&y);
        let phi = basis(o);
        for i in 0..n_basis {
            atb[i] += phi[i] * v;
            for j in 0..n_basis {
                ata[i][j] += phi[i] * phi[j];
            }
        }
    }
    let coef = solve_dense(ata, atb).ok_or_else(|| {
        Error::ParameterViolation(format!("degenerate quadratic fit stencil at {x:?}"))
    })?;
    let c = coef[0];
    let g = coef[1..1 + dim].to_vec();
    let mut h = vec![vec![0.0; dim]; dim];
    let mut idx = 1 + dim;
    for i in 0..dim {
        for j in i..dim {
            if i == j {
                h[i][j] = 2.0 * coef[idx];
            } else {
                h[i][j] = coef[idx];
                h[j][i] = coef[idx];
            }
            idx += 1;
        }
    }
    Ok((c, g, h))
}

/// Quadratic-patch viscosity spot-check: fits a quadratic over radius
/// `r_patch`, bends it to touch `u` from the required side at `x` on the
/// sampled ball, patches it in via truncation, and evaluates the operator.
pub fn viscosity_spot_check(
    u: &ScalarField,
    x: &[f64],
    side: CheckSide,
    s: Exponent,
    quad: &QuadratureConfig,
    r_patch: f64,
    tol: f64,
) -> Result<SpotVerdict> {
    let dim = u.dim;
    if x.len() != dim {
        return Err(Error::ParameterViolation(format!(
            "spot-check point {x:?} does not match field dimension {dim}"
        )));
    }
    let (_, g, h) = fit_quadratic(u, x, r_patch)?;
    let ux = u.eval(x);
    let sign = match side {
        CheckSide::Sub => 1.0,
        CheckSide::Super => -1.0,
    };
    // Base patch q(y) = u(x) + g·d + ½ dᵀHd; bend by +κ|d|² (sub side) so
    // that φ ≥ u on the sampled ball (resp. −κ for the super side).
    let n_ring = if dim == 1 { 2 } else { 32 };
    let mut kappa = 0.0_f64;
    let mut ring_dirs: Vec<Vec<f64>> = Vec::new();
    if dim == 1 {
        ring_dirs.push(vec![1.0]);
        ring_dirs.push(vec![-1.0]);
    } else {
        for i in 0..n_ring {
            let a = 2.0 * std::f64::consts::PI * i as f64 / n_ring as f64;
            let mut d = vec![0.0; dim];
            d[0] = a.cos();
            d[1] = a.sin();
            ring_dirs.push(d);
        }
    }
    let q_at = |d: &[f64]| -> f64 {
        let mut v = ux;
        for i in 0..dim {
            v += g[i] * d[i];
            for j in 0..dim {
                v += 0.5 * h[i][j] * d[i] * d[j];
            }
        }
        v
    };
    // Dense radial calibration: piecewise-smooth fields (e.g. grid
    // interpolants) can spike between coarse knots, so the bend must be
    // measured on a ladder much finer than the later verification ring.
    for k in 1..=40 {
        let frac = k as f64 / 40.0;
        for dir in &ring_dirs {
            let d: Vec<f64> = dir.iter().map(|v| v * frac * r_patch).collect();
            let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
            let deficit = sign * (u.eval(&y) - q_at(&d));
            let r2 = (frac * r_patch) * (frac * r_patch);
            if deficit > kappa * r2 {
                kappa = deficit / r2;
            }
        }
    }
    kappa = kappa * 1.25 + 1e-9;

    // Assemble the bent patch as an analytic field.
    let (gx, hx, xc) = (g.clone(), h.clone(), x.to_vec());
    let h_norm: f64 = h
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let m_patch = 0.5 * h_norm + kappa;
    let cap = ux.abs() + geom::norm(&g) * r_patch + (0.5 * h_norm + kappa) * r_patch * r_patch;
    let phi = ScalarField::new(dim, Growth::Bounded { c0: cap + 1.0 }, move |y| {
        let d: Vec<f64> = y.iter().zip(&xc).map(|(a, b)| a - b).collect();
        let mut v = ux + sign * kappa * d.iter().map(|t| t * t).sum::<f64>();
        for i in 0..dim {
            v += gx[i] * d[i];
            for j in 0..dim {
                v += 0.5 * hx[i][j] * d[i] * d[j];
            }
        }
        v
    })
    .with_c11(move |_y: &[f64]| {
        Some(C11 {
            m: m_patch + 1e-9,
            eta0: f64::INFINITY,
        })
    });

    // Verify the touching side on a dense sample of the ball.
    let mut touch_defect = f64::NEG_INFINITY;
    for &frac in &[0.2, 0.4, 0.6, 0.8, 1.0] {
        for dir in &ring_dirs {
            let d: Vec<f64> = dir.iter().map(|v| v * frac * r_patch).collect();
            let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
            touch_defect = touch_defect.max(sign * (u.eval(&y) - phi.eval(&y)));
        }
    }

    let comp = compose_truncated(u, &phi, x, r_patch)?;
    let r = ifl_eval(&comp, x, s, quad)?;
    let grad_norm = geom::norm(&g);
    let tau = quad.tau_for(Some(m_patch));
    let pass_res = match side {
        CheckSide::Sub => r.value >= -(tol + r.err_est),
        CheckSide::Super => r.value <= tol + r.err_est,
    };
    Ok(SpotVerdict {
        point: x.to_vec(),
        grad_norm,
        zero_gradient: grad_norm <= tau,
        touch_defect,
        residual: r.value,
        err_est: r.err_est,
        pass: pass_res && touch_defect <= 1e-9,
    })
}

/// Report of the uniform-limit stability probe.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub members: usize,
    /// sup |u_n − u_limit| over the window grid, per member.
    pub sup_gaps: Vec<f64>,
    /// Common growth exponent of the family (must stay below 2s).
    pub alpha: f64,
    /// Common growth constant.
    pub envelope_constant: f64,
    /// ∫ envelope(r) r^{−1−2s} dr over [1, r_out]: the dominating tail mass.
    pub tail_integral: f64,
    /// Worst member residual at the checked points (nonzero-gradient only).
    pub member_worst: f64,
    /// Worst limit residual at the checked points.
    pub limit_worst: f64,
    pub checked: usize,
    pub skipped_zero_gradient: usize,
    pub pass: bool,
}

/// Probes stability of the subsolution property under uniform limits: the
/// members must converge uniformly on the window, share a growth envelope
/// below the operator order, and pass nonzero-gradient spot-checks; the
/// limit is then spot-checked at the same points.
#[allow(clippy::too_many_arguments)]
pub fn stability_probe(
    members: &[ScalarField],
    limit: &ScalarField,
    lo: &[f64],
    hi: &[f64],
    points: &[Vec<f64>],
    s: Exponent,
    quad: &QuadratureConfig,
    r_patch: f64,
    tol: f64,
    conv_tol: f64,
) -> Result<StabilityReport> {
    if members.is_empty() {
        return Err(Error::ParameterViolation(
            "stability probe needs at least one family member".into(),
        ));
    }
    // Growth envelope.
    let mut alpha = 0.0_f64;
    let mut cmax = 0.0_f64;
    for m in members.iter().chain(std::iter::once(limit)) {
        match m.growth {
            Growth::Bounded { c0 } => cmax = cmax.max(c0),
            Growth::Power { c, alpha: a } => {
                cmax = cmax.max(c);
                alpha = alpha.max(a);
            }
        }
    }
    if alpha >= s.two_s() - 1e-12 {
        return Err(Error::HypothesisUnverified(format!(
            "family growth exponent alpha = {alpha} is not below 2s = {}",
            s.two_s()
        )));
    }

    // Uniform convergence on the window grid.
    let dim = limit.dim;
    let n_axis: usize = if dim == 1 { 129 } else { 17 };
    let mut grid: Vec<Vec<f64>> = vec![vec![]];
    for i in 0..dim {
        let mut next = Vec::new();
        for base in &grid {
            for j in 0..n_axis {
                let mut v = base.clone();
                v.push(lo[i] + (hi[i] - lo[i]) * j as f64 / (n_axis - 1) as f64);
                next.push(v);
            }
        }
        grid = next;
    }
    let sup_gaps: Vec<f64> = members
        .iter()
        .map(|m| {
            grid.par_iter()
                .map(|x| (m.eval(x) - limit.eval(x)).abs())
                .reduce(|| 0.0, f64::max)
        })
        .collect();
    let last_gap = *sup_gaps.last().unwrap();
    if last_gap > conv_tol {
        return Err(Error::HypothesisUnverified(format!(
            "uniform convergence not established: final sup gap {last_gap:.3e} > {conv_tol:.3e}"
        )));
    }
    if sup_gaps.len() >= 2 && last_gap > sup_gaps[0] + 1e-12 {
        return Err(Error::HypothesisUnverified(format!(
            "sup gaps do not decrease along the family: first {:.3e}, last {last_gap:.3e}",
            sup_gaps[0]
        )));
    }

    // Member spot-checks (nonzero-gradient points only).
    let mut member_worst = f64::INFINITY;
    let mut checked = 0usize;
    let mut skipped = 0usize;
    for m in members {
        for x in points {
            let v = viscosity_spot_check(m, x, CheckSide::Sub, s, quad, r_patch, tol)?;
            if v.zero_gradient {
                skipped += 1;
                continue;
            }
            checked += 1;
            member_worst = member_worst.min(v.residual);
            if !v.pass {
                return Err(Error::HypothesisUnverified(format!(
                    "family member fails its subsolution spot-check at {x:?}: \
                     residual {:.3e}",
                    v.residual
                )));
            }
        }
    }

    // Limit spot-checks at the same points.
    let mut limit_worst = f64::INFINITY;
    let mut pass = true;
    for x in points {
        let v = viscosity_spot_check(limit, x, CheckSide::Sub, s, quad, r_patch, tol)?;
        if v.zero_gradient {
            skipped += 1;
            continue;
        }
        checked += 1;
        limit_worst = limit_worst.min(v.residual);
        if !v.pass {
            pass = false;
        }
    }

    // Dominated-convergence bookkeeping: the integrable tail envelope.
    let r_out = quad.r_out.max(10.0);
    let mut tail = 0.0;
    let n_panels = 512;
    for i in 0..n_panels {
        let t0 = (i as f64 / n_panels as f64) * (r_out.ln() - 0.0) + 0.0;
        let t1 = ((i + 1) as f64 / n_panels as f64) * (r_out.ln() - 0.0) + 0.0;
        let (r0, r1) = (t0.exp(), t1.exp());
        let f0 = cmax * (1.0 + r0).powf(alpha) * r0.powf(-1.0 - s.two_s());
        let f1 = cmax * (1.0 + r1).powf(alpha) * r1.powf(-1.0 - s.two_s());
        tail += 0.5 * (f0 + f1) * (r1 - r0);
    }

    Ok(StabilityReport {
        members: members.len(),
        sup_gaps,
        alpha,
        envelope_constant: cmax,
        tail_integral: tail,
        member_worst,
        limit_worst,
        checked,
        skipped_zero_gradient: skipped,
        pass,
    })
}
