use thiserror::Error;

/// Errors raised by the algebra kernel and the analyzers built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, got n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree mismatch: expected degree {expected}, got degree {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("degree {degree} exceeds ambient dimension {n}")]
    DegreeOverflow { degree: usize, n: usize },

    #[error("invalid multi-index {indices:?} for n = {n}")]
    InvalidIndex { indices: Vec<usize>, n: usize },

    #[error("coefficient vector has length {found}, expected {expected}")]
    CoefficientLength { expected: usize, found: usize },

    #[error("operation requires {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("iteration budget of {0} exhausted")]
    BudgetExhausted(usize),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed JSON: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
