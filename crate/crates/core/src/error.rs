use thiserror::Error;

/// Errors raised by the linear algebra, geometry, solver and Newton layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular to working precision: {0}")]
    SingularInput(String),

    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("iteration did not converge within {iterations} iterations: {what}")]
    ConvergenceFailure { what: String, iterations: usize },

    #[error("rank m = {m} is not in (0, {n})")]
    BadRank { n: usize, m: usize },

    #[error("matrix is not a rank-{m} projector (residual {residual:e})")]
    NotAProjector { m: usize, residual: f64 },

    #[error("matrix is not symmetric (residual {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("frame is not orthogonal (residual {residual:e})")]
    NotOrthogonal { residual: f64 },

    #[error("frame is not symplectic (residual {residual:e})")]
    NotSymplectic { residual: f64 },

    #[error("projector is not Lagrangian (|PJP| = {residual:e})")]
    NotLagrangian { residual: f64 },

    #[error("coefficient spectra overlap (min gap {min_gap:e}, threshold {threshold:e})")]
    SpectralOverlap { min_gap: f64, threshold: f64 },

    #[error("linear operator is singular or ill-conditioned (estimate {estimate:e})")]
    SingularOperator { estimate: f64 },

    #[error("recursive solver did not converge after {sweeps} sweeps (last relative change {last_change:e})")]
    NoConvergence { sweeps: usize, last_change: f64 },

    #[error("not enough usable error entries for a rate estimate (have {have}, need {need})")]
    InsufficientData { have: usize, need: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::DimensionMismatch(msg.into()))
}
