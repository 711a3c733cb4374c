use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expected Hermitian matrix (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("eigendecomposition did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("temperature must be positive (got kT = {0})")]
    NonPositiveTemperature(f64),

    #[error("no level crossing found in [{lo}, {hi}]")]
    NoLevelCrossing { lo: f64, hi: f64 },

    #[error("measurement outcome must be in 1..=4 (got {0})")]
    InvalidOutcome(usize),

    #[error("degenerate conditional average (postselection probability {0:.3e})")]
    DegenerateConditionalAverage(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("convention reconciliation unresolved; use the oracle engine")]
    UnresolvedReconciliation,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
