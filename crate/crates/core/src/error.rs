use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid truncation dimension {dim} (need at least {min})")]
    InvalidDimension { dim: usize, min: usize },

    #[error("slot {slot} out of range for a space with {factors} factors")]
    SlotOutOfRange { slot: usize, factors: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("regime not modeled: {0}")]
    Domain(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("numerical tolerance exceeded: {what} = {value:e} > {limit:e}")]
    Tolerance { what: String, value: f64, limit: f64 },

    #[error("branch tracking failed: {0}")]
    Tracking(String),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
