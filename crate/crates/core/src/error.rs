use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("empty set: {0}")]
    EmptySet(&'static str),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("internal consistency violation: {0}")]
    Internal(String),
    #[error("output {0} already exists (pass overwrite to replace)")]
    OutputExists(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
