//! Crate-wide error type.

/// Errors surfaced by kernel evaluation, assembly, integration, and analysis.
///
/// Scalar payloads are stored as `f64` so the error type stays independent of
/// the generic scalar parameter.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("mass arguments must be positive, got ({x:e}, {y:e})")]
    NonpositiveMass { x: f64, y: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected} cells, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quadrature failed to converge near {sample:e}: {detail}")]
    QuadratureNonConvergence { sample: f64, detail: String },

    #[error(
        "integration stalled at t = {t:e}: step size {dt:e} fell below the floor {floor:e}; \
         the system is too stiff for the explicit pair"
    )]
    Stiffness { t: f64, dt: f64, floor: f64 },

    #[error("kernel verification failed:\n{0}")]
    VerificationFailed(String),

    #[error("uniqueness exponents infeasible: {0}")]
    InfeasibleExponents(String),

    #[error("tabulated density is negative at x = {x:e}")]
    NegativeDensity { x: f64 },

    #[error("table error: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
