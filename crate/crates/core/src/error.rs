use thiserror::Error;

/// Errors raised by the library.
///
/// `InvariantViolation` is special: it is only produced when a postcondition
/// backed by a theorem fails, which means either a bug or a false theorem.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coordinate {index} is outside dimension {dim}")]
    DimensionMismatch { index: u64, dim: u64 },

    #[error("unsupported approximation function: {0}")]
    UnsupportedFunction(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("size cap exceeded: {needed} bits needed, cap is {cap} bits")]
    SizeCap { needed: u64, cap: u64 },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::InvariantViolation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
