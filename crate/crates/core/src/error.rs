use thiserror::Error;

/// Errors produced by the model builders, solvers and the pulse analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Hilbert-space dimension {dim} exceeds the configured cap of {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("singular denominator in {context} (|denominator| = {magnitude:e})")]
    SingularDenominator { context: &'static str, magnitude: f64 },

    #[error("outside the regime of validity: {0}")]
    Regime(String),

    #[error("no bistability turning points: cooperativity {cooperativity} does not exceed 2")]
    NoTurningPoints { cooperativity: f64 },

    #[error("steady-state solve did not converge (relative residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("sparse factorization failed: {0}")]
    Factorization(String),

    #[error("truncation did not converge before reaching dimension {dim} (cap {cap})")]
    TruncationCap { dim: usize, cap: usize },

    #[error("adaptive quadrature did not converge (estimated error {error:e}, value {value:e})")]
    Quadrature { value: f64, error: f64 },

    #[error("time window of {window} us exceeds the frequency-grid limit of {limit} us")]
    GridResolution { window: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
