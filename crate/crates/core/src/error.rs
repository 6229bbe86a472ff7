use thiserror::Error;

/// Library-wide error type. Variant names follow the failure modes of the
/// individual operations; each carries enough context to act on.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The field's declared growth class makes the tail integral divergent.
    #[error("growth violation: {0}")]
    GrowthViolation(String),

    /// No second-order (C^{1,1}) control is available at the evaluation
    /// point and a probe suggests the integrand is not summable near 0.
    #[error("missing regularity at {0:?}: {1}")]
    MissingRegularity(Vec<f64>, String),

    /// A one-sided integral was requested at a point with nonzero gradient;
    /// it diverges for s > 1/2.
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    /// The finite-difference gradient magnitude falls inside the ambiguity
    /// band [tau/2, 2*tau]; the caller must refine h_grad or supply an
    /// analytic gradient.
    #[error("ambiguous gradient at {point:?}: |grad| = {magnitude:.3e}, band = [{lo:.3e}, {hi:.3e}]")]
    AmbiguousGradient {
        point: Vec<f64>,
        magnitude: f64,
        lo: f64,
        hi: f64,
    },

    /// A game policy returned a direction that is not a unit vector.
    #[error("policy error: {0}")]
    PolicyError(String),

    /// The discrete jump kernel's mass deviated from 1 by more than the
    /// allowed 1e-6 before the renormalization safeguard.
    #[error("kernel mass error: discrete mass {mass:.12} deviates from 1 by {deviation:.3e}")]
    KernelMassError { mass: f64, deviation: f64 },

    /// Fixed-point iteration exhausted max_sweeps with residual >= tol.
    #[error("no convergence: residual {residual:.3e} >= tol {tol:.3e} after {sweeps} sweeps")]
    NoConvergence {
        residual: f64,
        tol: f64,
        sweeps: usize,
    },

    /// A converged solution failed its residual post-verification.
    #[error("post-check failure: {summary} (worst at {worst_point:?}, residual {worst_residual:.3e})")]
    PostCheckFailure {
        summary: String,
        worst_point: Vec<f64>,
        worst_residual: f64,
    },

    /// A constructor precondition on numeric parameters failed.
    #[error("parameter violation: {0}")]
    ParameterViolation(String),

    /// A domain/obstacle assumption failed its audit.
    #[error("assumption violation: {0}")]
    AssumptionViolation(String),

    /// Too little usable data to fit (e.g. fewer than 4 dyadic bands).
    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    /// Comparison verdict withheld: hypotheses could not be verified.
    #[error("hypothesis unverified: {0}")]
    HypothesisUnverified(String),

    /// No tangential arc configuration (or feasible data placement) exists
    /// for the requested counterexample parameters.
    #[error("geometry infeasible: {0}")]
    GeometryInfeasible(String),

    /// A geometric audit (line-intersection property, tangency) failed.
    #[error("audit failure: {0}")]
    AuditFailure(String),

    /// Sampled second differences exceed the C^{1,1} budget.
    #[error("regularity failure: {0}")]
    RegularityFailure(String),

    /// Certification failed at listed samples even after refinement.
    #[error("certification failure: {failed} of {total} samples uncertified; first failure at {witness:?}")]
    CertificationFailure {
        failed: usize,
        total: usize,
        witness: Vec<f64>,
    },

    /// Even the smallest bisection epsilon failed the subsolution check.
    #[error("no positive epsilon: {0}")]
    NoPositiveEpsilon(String),

    /// sup/inf convolution of a field whose growth admits no bounded search.
    #[error("unbounded search: {0}")]
    UnboundedSearch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
