use thiserror::Error;

/// Errors raised by the streaming algorithms and their oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("stream length bound {bound} exceeded")]
    StreamBoundExceeded { bound: usize },

    #[error("condition number undefined for an all-zero matrix")]
    UndefinedCondition,

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
