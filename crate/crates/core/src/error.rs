use thiserror::Error;

/// Failure modes of the engine.
///
/// Several variants are numerical witnesses rather than bugs: `FrameSingular`
/// and `SingularSystem` signal that the spectral parameter is (numerically)
/// an eigenvalue of the operator under study.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("factorization failed: {0}")]
    FactorizationFailure(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("spectrum touches the branch cut (-inf, 0]: eigenvalue {re:+.3e}{im:+.3e}i")]
    SpectrumOnCut { re: f64, im: f64 },
    #[error("spectral parameter too close to the spectrum (condition estimate {cond:.3e})")]
    NearSpectrum { cond: f64 },
    #[error("I - T is singular or ill-conditioned (condition estimate {cond:.3e})")]
    SingularOrIllConditioned { cond: f64 },
    #[error("probe sample {re:+.3e}{im:+.3e}i lies on the spectrum")]
    SampleOnSpectrum { re: f64, im: f64 },
    #[error("-lambda - k^2/4 = {re:+.3e}{im:+.3e}i lies on the branch cut (-inf, 0]")]
    BranchCut { re: f64, im: f64 },
    #[error("frame operator {which} is not invertible (condition estimate {cond:.3e}); lambda may be an eigenvalue")]
    FrameSingular { which: &'static str, cond: f64 },
    #[error("quadrature breakdown: {0}")]
    QuadratureBreakdown(String),
    #[error("lambda = {re:+.3e}{im:+.3e}i is not in the resolvent set: {reason}")]
    NotInResolventSet { re: f64, im: f64, reason: String },
    #[error("collocation system is singular (condition estimate {cond:.3e})")]
    SingularSystem { cond: f64 },
    #[error("characteristic roots are degenerate (P = Q)")]
    DegenerateRoots,
    #[error("dense size {size} exceeds cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("contour passes too close to the spectrum: {0}")]
    ContourTooClose(String),
    #[error("contour quadrature did not converge (self error {self_error:.3e})")]
    QuadratureNotConverged { self_error: f64 },
    #[error("time step rejected: {0}")]
    StepRejected(String),
    #[error("theta_A = {theta:.4} >= pi/4: the operator does not generate an analytic semigroup")]
    NotAnalytic { theta: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
