use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum RisError {
    #[error("grid mismatch")]
    GridMismatch,

    #[error("quadrature density count mismatch: got {got}, expected {expected}")]
    DensityCountMismatch { got: usize, expected: usize },

    #[error("non-orientation-preserving state: det F = {det}")]
    NonOrientationPreserving { det: f64 },

    #[error("degenerate cell {cell}: negative Jacobian")]
    DegenerateCell { cell: usize },

    #[error("infeasible state: {0}")]
    Infeasible(String),

    #[error("invalid parameter `{key}`: {message}")]
    InvalidParameter { key: String, message: String },

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("solver failure at step {step}: {reason}")]
    SolverFailure { step: usize, reason: String },

    #[error("malformed field file: {0}")]
    FieldFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, RisError>;

impl RisError {
    pub fn invalid(key: &str, message: impl Into<String>) -> Self {
        RisError::InvalidParameter {
            key: key.to_string(),
            message: message.into(),
        }
    }
}
