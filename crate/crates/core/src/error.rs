use thiserror::Error;

/// Errors raised by constructions, criteria, and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RqmcError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),

    #[error("no prime N with ceil(M/2) < N <= M for M = {0}")]
    EmptyPrimeRange(u64),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for RqmcError {
    fn from(e: std::io::Error) -> Self {
        RqmcError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for RqmcError {
    fn from(e: serde_json::Error) -> Self {
        RqmcError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, RqmcError>;
