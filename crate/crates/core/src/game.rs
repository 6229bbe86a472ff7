//! Nonlocal tug-of-war: symmetric 2s-stable increments, episode
//! simulation, and the dynamic-programming value iteration whose fixed
//! point is the game value.
//!
//! One step of the game from x: both players commit directions y (the
//! maximizer, used for positive draws) and z (the minimizer, used for
//! negative draws); a symmetric 2s-stable increment X over time ε moves
//! the token to x + X·y (X ≥ 0) or x + X·z (X < 0). The one-step
//! expectation over the discretized jump law gives the DPP operator
//!   V'(x) = sup_y inf_z ½ [ Σ_η ŵ(η) V(x+ηy) + Σ_η ŵ(η) V(x−ηz) ].
//! Because the two sums decouple, V' = ½ (max_d R(d) + min_d R(d)) with
//! R(d) = Σ ŵ(η) V(x+ηd) over a negation-closed direction set — computed
//! exactly that way, deterministically.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geom;
use crate::grid::{AxisKind, GridSpec, ValueTable};
use crate::operator::Exponent;
use crate::quad;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;

// ---------------------------------------------------------------------
// stable sampler
// ---------------------------------------------------------------------

/// Generator of symmetric 2s-stable increments, X_ε =d ε^{1/(2s)} X_1,
/// with characteristic function E e^{iξX_ε} = e^{−ε|ξ|^{2s}}.
/// Counter-based streams give reproducible parallel episodes.
#[derive(Debug, Clone)]
pub struct StableSampler {
    s: Exponent,
    pub seed: u64,
    pub stream: u64,
    rng: ChaCha8Rng,
    mirror: bool,
}

impl StableSampler {
    pub fn new(s: Exponent, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        StableSampler {
            s,
            seed,
            stream,
            rng,
            mirror: false,
        }
    }

    /// Same stream with every draw negated (antithetic partner; valid
    /// because the law is symmetric).
    pub fn mirrored(mut self) -> Self {
        self.mirror = !self.mirror;
        self
    }

    /// One draw of X_ε by the polar/auxiliary-exponential construction
    /// for symmetric alpha-stable laws (alpha = 2s).
    pub fn sample_stable_increment(&mut self, eps: f64) -> f64 {
        debug_assert!(eps > 0.0);
        let alpha = self.s.two_s();
        let u1: f64 = self.rng.gen();
        let u2: f64 = self.rng.gen();
        let theta = std::f64::consts::PI * (u1 - 0.5);
        let w = -(1.0 - u2).ln(); // Exp(1), strictly positive a.s.
        let x = (alpha * theta).sin() / theta.cos().powf(1.0 / alpha)
            * (((1.0 - alpha) * theta).cos() / w).powf((1.0 - alpha) / alpha);
        let v = eps.powf(1.0 / alpha) * x;
        if self.mirror {
            -v
        } else {
            v
        }
    }
}

// ---------------------------------------------------------------------
// jump kernel discretization
// ---------------------------------------------------------------------

/// How the jump density is binned.
#[derive(Debug, Clone)]
pub struct KernelConfig {
    /// Radius up to which cells have uniform width `fine_width`.
    pub fine_span: f64,
    /// Width of the fine cells (usually the grid spacing h).
    pub fine_width: f64,
    /// Geometric growth factor of cell widths beyond `fine_span`.
    pub growth: f64,
    /// Target tail mass fraction left beyond the last cell.
    pub tail_frac: f64,
    /// Force a truncation radius (for mass-error diagnostics).
    pub eta_max_override: Option<f64>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            fine_span: 4.0,
            fine_width: 1.0 / 64.0,
            growth: 1.25,
            tail_frac: 1e-7,
            eta_max_override: None,
        }
    }
}

/// Discretized half-line jump law: nodes are cell mass-centroids and
/// weights sum to exactly 1.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub eps: f64,
    pub eta_max: f64,
    /// |discrete mass − half-line mass| / half-line mass, pre-safeguard.
    pub mass_deviation: f64,
}

/// Unnormalized envelope density ε/(ε^{1/s}+η²)^{(2s+1)/2}; its half-line
/// integral is independent of ε.
fn envelope(s: Exponent, eps: f64, eta: f64) -> f64 {
    eps * (eps.powf(1.0 / s.s()) + eta * eta).powf(-(s.two_s() + 1.0) / 2.0)
}

/// Half-line mass of the envelope: ∫_0^∞ (1+τ²)^{−(2s+1)/2} dτ computed
/// as ∫_0^{π/2} cos^{2s−1}φ dφ (substitution τ = tan φ).
pub fn envelope_half_mass(s: Exponent) -> f64 {
    let p = s.two_s() - 1.0;
    quad::adaptive(&|phi: f64| phi.cos().powf(p), 0.0, std::f64::consts::FRAC_PI_2, 1e-12, 4000)
        .value
}

impl Kernel {
    pub fn build(s: Exponent, eps: f64, cfg: &KernelConfig) -> Result<Kernel> {
        if !(eps > 0.0) || !(cfg.fine_width > 0.0) || cfg.growth <= 1.0 {
            return Err(Error::ParameterViolation(format!(
                "kernel needs eps > 0, fine_width > 0, growth > 1 (got {}, {}, {})",
                eps, cfg.fine_width, cfg.growth
            )));
        }
        let two_s = s.two_s();
        let half_mass = envelope_half_mass(s);
        // tail of the envelope above b is at most ε b^{−2s} / (2s)
        let tail_ok = |b: f64| eps * b.powf(-two_s) / two_s <= cfg.tail_frac * half_mass;

        // cell boundaries: uniform then geometric
        let mut bounds = vec![0.0];
        let mut b = 0.0;
        while b < cfg.fine_span {
            b += cfg.fine_width;
            bounds.push(b);
        }
        let stop = |b: f64| match cfg.eta_max_override {
            Some(cap) => b >= cap,
            None => tail_ok(b),
        };
        let mut w = cfg.fine_width;
        while !stop(b) && b < 1e15 {
            w *= cfg.growth;
            b += w;
            bounds.push(b);
        }
        if let Some(cap) = cfg.eta_max_override {
            // truncate exactly at the cap
            while bounds.last().copied().unwrap_or(0.0) > cap {
                bounds.pop();
            }
            if bounds.last().copied().unwrap_or(0.0) < cap {
                bounds.push(cap);
            }
        }

        let mut nodes = Vec::with_capacity(bounds.len() - 1);
        let mut weights = Vec::with_capacity(bounds.len() - 1);
        let mut mass = 0.0;
        for win in bounds.windows(2) {
            let (a, b) = (win[0], win[1]);
            let (m, _) = quad::gk15(&|eta| envelope(s, eps, eta), a, b);
            let (m1, _) = quad::gk15(&|eta| eta * envelope(s, eps, eta), a, b);
            if m > 0.0 {
                nodes.push(m1 / m);
                weights.push(m);
                mass += m;
            }
        }
        let eta_max = *bounds.last().unwrap();
        let mass_deviation = (mass - half_mass).abs() / half_mass;
        if mass_deviation > 1e-6 {
            return Err(Error::KernelMassError {
                mass: mass / half_mass,
                deviation: mass_deviation,
            });
        }
        // renormalize to total mass exactly 1
        for w in weights.iter_mut() {
            *w /= mass;
        }
        let sum: f64 = weights.iter().sum();
        let imax = weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        weights[imax] += 1.0 - sum;
        Ok(Kernel {
            nodes,
            weights,
            eps,
            eta_max,
            mass_deviation,
        })
    }
}

/// Negation-closed quasi-uniform direction set for the DPP extrema.
pub fn dpp_directions(dim: usize, k_dir: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let k = (k_dir.max(8) + 1) & !1usize; // even, >= 8
            geom::sphere_directions(2, k)
        }
        _ => {
            let half = geom::sphere_directions(dim, k_dir.max(16) / 2);
            let mut out = half.clone();
            out.extend(half.iter().map(|d| geom::scale(d, -1.0)));
            out
        }
    }
}

// ---------------------------------------------------------------------
// game configuration and episodes
// ---------------------------------------------------------------------

type DomainFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum Variant {
    /// Exit game: stops on leaving the domain with payoff f there.
    Dirichlet { domain: DomainFn, payoff: ScalarField },
    /// Double-obstacle stopping game; `exterior` extends values beyond
    /// the computational window (the coinciding obstacle at infinity).
    Obstacle {
        gamma_minus: ScalarField,
        gamma_plus: ScalarField,
        exterior: ScalarField,
    },
}

impl std::fmt::Debug for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Dirichlet { .. } => write!(f, "Dirichlet"),
            Variant::Obstacle { .. } => write!(f, "Obstacle"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GameConfig {
    pub variant: Variant,
    pub s: Exponent,
    /// Observation time of the stable process per turn.
    pub eps: f64,
    pub max_turns: usize,
    pub dim: usize,
    /// Direction count for DPP extrema.
    pub k_dir: usize,
}

impl GameConfig {
    pub fn validate(&self, probes: &[Vec<f64>]) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::ParameterViolation(format!(
                "observation time must be positive, got {}",
                self.eps
            )));
        }
        if let Variant::Obstacle {
            gamma_minus,
            gamma_plus,
            ..
        } = &self.variant
        {
            for p in probes {
                if gamma_minus.eval(p) > gamma_plus.eval(p) {
                    return Err(Error::ParameterViolation(format!(
                        "obstacles out of order at {p:?}: lower {} > upper {}",
                        gamma_minus.eval(p),
                        gamma_plus.eval(p)
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Running,
    Exited(f64),
    StoppedByOne(f64),
    StoppedByTwo(f64),
    Truncated,
}

impl Status {
    pub fn payoff(&self) -> Option<f64> {
        match self {
            Status::Exited(p) | Status::StoppedByOne(p) | Status::StoppedByTwo(p) => Some(*p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GameState {
    pub x: Vec<f64>,
    pub n: usize,
    pub status: Status,
}

type DirFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type StopFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A player's strategy: a direction rule plus (obstacle variant) an
/// optional stopping rule.
#[derive(Clone)]
pub struct PlayerPolicy {
    pub direction: DirFn,
    pub stop: Option<StopFn>,
}

impl PlayerPolicy {
    pub fn fixed_direction(d: Vec<f64>) -> Self {
        PlayerPolicy {
            direction: Arc::new(move |_| d.clone()),
            stop: None,
        }
    }
}

/// One row of an exported episode trace.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub turn: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub increment: f64,
    pub status: String,
}

fn unit_or_err(d: &[f64], who: &str) -> Result<()> {
    let n = geom::norm(d);
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::PolicyError(format!(
            "{who} returned a non-unit direction (|d| = {n})"
        )));
    }
    Ok(())
}

/// Play one episode to termination (or truncation at max_turns).
pub fn play_episode(
    cfg: &GameConfig,
    policy_one: &PlayerPolicy,
    policy_two: &PlayerPolicy,
    sampler: &mut StableSampler,
    x0: &[f64],
    mut trace: Option<&mut Vec<TraceRow>>,
) -> Result<GameState> {
    let mut x = x0.to_vec();
    if let Variant::Dirichlet { domain, .. } = &cfg.variant {
        if !(domain)(&x) {
            return Err(Error::ParameterViolation(format!(
                "episode must start inside the domain, got {x:?}"
            )));
        }
    }
    for n in 0..cfg.max_turns {
        match &cfg.variant {
            Variant::Dirichlet { domain, payoff } => {
                if !(domain)(&x) {
                    let status = Status::Exited(payoff.eval(&x));
                    return Ok(GameState { x, n, status });
                }
            }
            Variant::Obstacle {
                gamma_minus,
                gamma_plus,
                ..
            } => {
                let lo = gamma_minus.eval(&x);
                let hi = gamma_plus.eval(&x);
                // pinched obstacles leave no room: the game ends now
                if lo >= hi {
                    return Ok(GameState {
                        x,
                        n,
                        status: Status::StoppedByOne(lo),
                    });
                }
                if let Some(stop) = &policy_one.stop {
                    if stop(&x) {
                        return Ok(GameState {
                            x,
                            n,
                            status: Status::StoppedByOne(lo),
                        });
                    }
                }
                if let Some(stop) = &policy_two.stop {
                    if stop(&x) {
                        return Ok(GameState {
                            x,
                            n,
                            status: Status::StoppedByTwo(hi),
                        });
                    }
                }
            }
        }
        let y = (policy_one.direction)(&x);
        let z = (policy_two.direction)(&x);
        unit_or_err(&y, "policy one")?;
        unit_or_err(&z, "policy two")?;
        let inc = sampler.sample_stable_increment(cfg.eps);
        let dir = if inc >= 0.0 { &y } else { &z };
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceRow {
                turn: n,
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
                increment: inc,
                status: "running".into(),
            });
        }
        for k in 0..cfg.dim {
            x[k] += inc * dir[k];
        }
    }
    Ok(GameState {
        x,
        n: cfg.max_turns,
        status: Status::Truncated,
    })
}

// ---------------------------------------------------------------------
// DPP sweeps and value iteration
// ---------------------------------------------------------------------

/// One Jacobi sweep of the DPP operator over the table's interior.
/// Returns the new values and the sup-norm residual.
pub fn dpp_sweep(
    table: &ValueTable,
    kernel: &Kernel,
    dirs: &[Vec<f64>],
    obstacles: Option<(&ScalarField, &ScalarField)>,
) -> (Vec<f64>, f64) {
    let spec = &table.spec;
    let dim = spec.dim();
    let new_values: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map(|f| {
            if !table.interior[f] {
                return table.values[f];
            }
            let x = spec.point_of_flat(f);
            let mut probe = vec![0.0; dim];
            let mut r_max = f64::NEG_INFINITY;
            let mut r_min = f64::INFINITY;
            for d in dirs {
                let mut r = 0.0;
                for (eta, w) in kernel.nodes.iter().zip(&kernel.weights) {
                    for k in 0..dim {
                        probe[k] = x[k] + eta * d[k];
                    }
                    r += w * table.eval(&probe);
                }
                if r > r_max {
                    r_max = r;
                }
                if r < r_min {
                    r_min = r;
                }
            }
            let mut v = 0.5 * (r_max + r_min);
            if let Some((lo, hi)) = obstacles {
                v = v.max(lo.eval(&x)).min(hi.eval(&x));
            }
            v
        })
        .collect();
    let residual = new_values
        .iter()
        .zip(&table.values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    (new_values, residual)
}

/// Default kernel binning for a table: fine cells of the grid spacing
/// out to the box size (capped), then geometric cells.
pub fn kernel_config_for(spec: &GridSpec) -> KernelConfig {
    let h_min = spec.h.iter().cloned().fold(f64::INFINITY, f64::min);
    let extent = (0..spec.dim())
        .map(|k| spec.hi(k) - spec.lo[k])
        .fold(0.0f64, f64::max);
    KernelConfig {
        fine_span: extent.min(4.0).max(8.0 * h_min),
        fine_width: h_min,
        growth: 1.25,
        tail_frac: 1e-7,
        eta_max_override: None,
    }
}

/// One application of the DPP operator, building the default kernel for
/// the table's grid.
pub fn dpp_update(
    table: &ValueTable,
    s: Exponent,
    eps: f64,
    obstacles: Option<(&ScalarField, &ScalarField)>,
) -> Result<ValueTable> {
    let kernel = Kernel::build(s, eps, &kernel_config_for(&table.spec))?;
    let dirs = dpp_directions(table.spec.dim(), 16);
    let (values, residual) = dpp_sweep(table, &kernel, &dirs, obstacles);
    let mut out = table.clone();
    out.values = values;
    out.eps = eps;
    out.residuals.push(residual);
    Ok(out)
}

/// Build the starting table for a game configuration.
pub fn initial_table(cfg: &GameConfig, spec: GridSpec) -> ValueTable {
    match &cfg.variant {
        Variant::Dirichlet { domain, payoff } => {
            let pay = payoff.clone();
            let ext: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> =
                Arc::new(move |x: &[f64]| pay.eval(x));
            let dom = domain.clone();
            let payoff2 = payoff.clone();
            ValueTable::build(
                spec,
                move |x| dom(x),
                move |x| payoff2.eval(x),
                ext,
                cfg.eps,
            )
        }
        Variant::Obstacle {
            gamma_minus,
            exterior,
            ..
        } => {
            let extf = exterior.clone();
            let ext: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> =
                Arc::new(move |x: &[f64]| extf.eval(x));
            let gm = gamma_minus.clone();
            ValueTable::build(spec, |_| true, move |x| gm.eval(x), ext, cfg.eps)
        }
    }
}

/// Iterate the DPP to its fixed point (sup-norm residual < tol).
pub fn value_iterate(
    cfg: &GameConfig,
    spec: GridSpec,
    tol: f64,
    max_sweeps: usize,
) -> Result<ValueTable> {
    if !(tol > 0.0) {
        return Err(Error::ParameterViolation(format!(
            "iteration tolerance must be positive, got {tol}"
        )));
    }
    let probes: Vec<Vec<f64>> = (0..spec.len().min(64))
        .map(|f| spec.point_of_flat(f * (spec.len() / spec.len().min(64)).max(1)))
        .collect();
    cfg.validate(&probes)?;
    let mut table = initial_table(cfg, spec);
    iterate_table(cfg, &mut table, tol, max_sweeps)?;
    Ok(table)
}

/// Drive an existing table to the fixed point in place.
pub fn iterate_table(
    cfg: &GameConfig,
    table: &mut ValueTable,
    tol: f64,
    max_sweeps: usize,
) -> Result<()> {
    let kernel = Kernel::build(cfg.s, cfg.eps, &kernel_config_for(&table.spec))?;
    let dirs = dpp_directions(table.spec.dim(), cfg.k_dir);
    let obstacles = match &cfg.variant {
        Variant::Obstacle {
            gamma_minus,
            gamma_plus,
            ..
        } => Some((gamma_minus.clone(), gamma_plus.clone())),
        _ => None,
    };
    let mut residual = f64::INFINITY;
    for _ in 0..max_sweeps {
        let ob = obstacles.as_ref().map(|(a, b)| (a, b));
        let (values, r) = dpp_sweep(table, &kernel, &dirs, ob);
        table.values = values;
        table.residuals.push(r);
        residual = r;
        if r < tol {
            return Ok(());
        }
    }
    Err(Error::NoConvergence {
        residual,
        tol,
        sweeps: max_sweeps,
    })
}

// ---------------------------------------------------------------------
// greedy policies and Monte-Carlo estimation
// ---------------------------------------------------------------------

/// Value-greedy policies read off a table: at each node pick the
/// direction maximizing / minimizing R(d); obstacle stopping compares
/// the obstacle value with the one-step continuation (ties continue).
pub fn greedy_policies(
    cfg: &GameConfig,
    table: &ValueTable,
) -> Result<(PlayerPolicy, PlayerPolicy)> {
    let kernel = Kernel::build(cfg.s, cfg.eps, &kernel_config_for(&table.spec))?;
    let dirs = dpp_directions(table.spec.dim(), cfg.k_dir);
    let spec = table.spec.clone();
    let dim = spec.dim();
    let n_pts = spec.len();
    // precompute per-node argmax/argmin direction and continuation value
    let rows: Vec<(u32, u32, f64)> = (0..n_pts)
        .into_par_iter()
        .map(|f| {
            let x = spec.point_of_flat(f);
            let mut probe = vec![0.0; dim];
            let mut best_hi = (0u32, f64::NEG_INFINITY);
            let mut best_lo = (0u32, f64::INFINITY);
            for (di, d) in dirs.iter().enumerate() {
                let mut r = 0.0;
                for (eta, w) in kernel.nodes.iter().zip(&kernel.weights) {
                    for k in 0..dim {
                        probe[k] = x[k] + eta * d[k];
                    }
                    r += w * table.eval(&probe);
                }
                if r > best_hi.1 {
                    best_hi = (di as u32, r);
                }
                if r < best_lo.1 {
                    best_lo = (di as u32, r);
                }
            }
            (best_hi.0, best_lo.0, 0.5 * (best_hi.1 + best_lo.1))
        })
        .collect();
    let arg_hi: Arc<Vec<u32>> = Arc::new(rows.iter().map(|r| r.0).collect());
    let arg_lo: Arc<Vec<u32>> = Arc::new(rows.iter().map(|r| r.1).collect());
    let cont: Arc<Vec<f64>> = Arc::new(rows.iter().map(|r| r.2).collect());
    let dirs = Arc::new(dirs);

    let nearest = {
        let spec = spec.clone();
        move |x: &[f64]| -> Option<usize> {
            let mut idx = vec![0usize; spec.dim()];
            for k in 0..spec.dim() {
                let t = (x[k] - spec.lo[k]) / spec.h[k];
                match spec.axis[k] {
                    AxisKind::Bounded => {
                        if t < -0.5 || t > (spec.n[k] - 1) as f64 + 0.5 {
                            return None;
                        }
                        idx[k] = t.round().clamp(0.0, (spec.n[k] - 1) as f64) as usize;
                    }
                    AxisKind::Periodic => {
                        let m = spec.n[k] as f64;
                        let mut r = t.round() % m;
                        if r < 0.0 {
                            r += m;
                        }
                        idx[k] = (r as usize).min(spec.n[k] - 1);
                    }
                }
            }
            Some(spec.flat(&idx))
        }
    };

    let e1 = geom::basis(dim, 0);
    let mk_dir = |table_arg: Arc<Vec<u32>>, fallback_sign: f64| -> DirFn {
        let dirs = dirs.clone();
        let nearest = nearest.clone();
        let e1 = e1.clone();
        Arc::new(move |x: &[f64]| match nearest(x) {
            Some(f) => dirs[table_arg[f] as usize].clone(),
            None => geom::scale(&e1, fallback_sign),
        })
    };
    let dir_one = mk_dir(arg_hi, 1.0);
    // the minimizer's z is the negation of the minimizing R-direction
    let dir_two: DirFn = {
        let dirs = dirs.clone();
        let nearest = nearest.clone();
        let arg_lo = arg_lo.clone();
        let e1 = e1.clone();
        Arc::new(move |x: &[f64]| match nearest(x) {
            Some(f) => geom::scale(&dirs[arg_lo[f] as usize], -1.0),
            None => e1.clone(),
        })
    };

    let (stop_one, stop_two) = match &cfg.variant {
        Variant::Obstacle {
            gamma_minus,
            gamma_plus,
            exterior,
        } => {
            let mk_stop = |obst: ScalarField, is_upper: bool| -> StopFn {
                let cont = cont.clone();
                let nearest = nearest.clone();
                let ext = exterior.clone();
                Arc::new(move |x: &[f64]| {
                    let c = match nearest(x) {
                        Some(f) => cont[f],
                        None => ext.eval(x),
                    };
                    if is_upper {
                        obst.eval(x) < c
                    } else {
                        obst.eval(x) > c
                    }
                })
            };
            (
                Some(mk_stop(gamma_minus.clone(), false)),
                Some(mk_stop(gamma_plus.clone(), true)),
            )
        }
        _ => (None, None),
    };

    Ok((
        PlayerPolicy {
            direction: dir_one,
            stop: stop_one,
        },
        PlayerPolicy {
            direction: dir_two,
            stop: stop_two,
        },
    ))
}

/// Monte-Carlo value estimate.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    /// 2.58·stdev/√n (99% normal half-width).
    pub half_width: f64,
    pub n: usize,
    pub truncated: usize,
}

/// Average episode payoffs over n seed-derived streams. With
/// `antithetic`, episodes come in mirrored pairs sharing a stream.
pub fn mc_value(
    cfg: &GameConfig,
    x0: &[f64],
    n_episodes: usize,
    policy_one: &PlayerPolicy,
    policy_two: &PlayerPolicy,
    seed: u64,
    antithetic: bool,
) -> Result<McEstimate> {
    if n_episodes < 2 {
        return Err(Error::ParameterViolation(
            "need at least 2 episodes".into(),
        ));
    }
    let results: Vec<Result<(f64, bool)>> = (0..n_episodes)
        .into_par_iter()
        .map(|k| {
            let mut sampler = if antithetic {
                let base = StableSampler::new(cfg.s, seed, (k / 2) as u64);
                if k % 2 == 1 {
                    base.mirrored()
                } else {
                    base
                }
            } else {
                StableSampler::new(cfg.s, seed, k as u64)
            };
            let end = play_episode(cfg, policy_one, policy_two, &mut sampler, x0, None)?;
            let (pay, trunc) = match end.status {
                Status::Truncated => {
                    let p = match &cfg.variant {
                        Variant::Dirichlet { payoff, .. } => payoff.eval(&end.x),
                        Variant::Obstacle {
                            gamma_minus,
                            gamma_plus,
                            ..
                        } => 0.5 * (gamma_minus.eval(&end.x) + gamma_plus.eval(&end.x)),
                    };
                    (p, true)
                }
                ref st => (st.payoff().expect("terminal state has a payoff"), false),
            };
            Ok((pay, trunc))
        })
        .collect();
    let mut payoffs = Vec::with_capacity(n_episodes);
    let mut truncated = 0usize;
    for r in results {
        let (p, t) = r?;
        payoffs.push(p);
        if t {
            truncated += 1;
        }
    }
    let n = payoffs.len() as f64;
    let mean = payoffs.iter().sum::<f64>() / n;
    let var = payoffs.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate {
        mean,
        half_width: 2.58 * var.sqrt() / n.sqrt(),
        n: n_episodes,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s34() -> Exponent {
        Exponent::new(0.75).unwrap()
    }

    #[test]
    fn sampler_is_deterministic_per_stream() {
        let mut a = StableSampler::new(s34(), 7, 3);
        let mut b = StableSampler::new(s34(), 7, 3);
        for _ in 0..100 {
            assert_eq!(
                a.sample_stable_increment(0.01),
                b.sample_stable_increment(0.01)
            );
        }
        let mut c = StableSampler::new(s34(), 7, 4);
        let x: Vec<f64> = (0..10).map(|_| c.sample_stable_increment(0.01)).collect();
        let mut a2 = StableSampler::new(s34(), 7, 3);
        let y: Vec<f64> = (0..10).map(|_| a2.sample_stable_increment(0.01)).collect();
        assert_ne!(x, y);
    }

    #[test]
    fn mirrored_sampler_negates() {
        let mut a = StableSampler::new(s34(), 11, 0);
        let mut b = StableSampler::new(s34(), 11, 0).mirrored();
        for _ in 0..50 {
            let u = a.sample_stable_increment(1.0);
            let v = b.sample_stable_increment(1.0);
            assert_eq!(u, -v);
        }
    }

    #[test]
    fn kernel_mass_is_one() {
        let k = Kernel::build(s34(), 0.01, &KernelConfig::default()).unwrap();
        let sum: f64 = k.weights.iter().sum();
        assert_eq!(sum, 1.0);
        assert!(k.mass_deviation < 1e-6);
        assert!(k.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn kernel_reports_mass_error_when_truncated_early() {
        let cfg = KernelConfig {
            eta_max_override: Some(0.5),
            ..KernelConfig::default()
        };
        let got = Kernel::build(s34(), 0.01, &cfg);
        assert!(
            matches!(got, Err(Error::KernelMassError { .. })),
            "{got:?}"
        );
    }

    #[test]
    fn directions_are_negation_closed() {
        for dim in [1usize, 2, 3] {
            let dirs = dpp_directions(dim, 16);
            for d in &dirs {
                let nd = geom::scale(d, -1.0);
                let found = dirs
                    .iter()
                    .any(|e| geom::dist(e, &nd) < 1e-12);
                assert!(found, "missing negation in dim {dim}");
            }
        }
    }
}
