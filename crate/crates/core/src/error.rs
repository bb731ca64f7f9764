use thiserror::Error;

/// Errors raised by the generalized-function engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("derivative order {order} exceeds cap {cap}")]
    OrderTooHigh { order: u32, cap: u32 },
    #[error("invalid seminorm query: {0}")]
    InvalidQuery(String),
    #[error("function does not decay near the window edges (edge magnitude {0:e})")]
    NonDecaying(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("epsilon {0} is not in (0, 1]")]
    InvalidEpsilon(f64),
    #[error("domain tag mismatch: {0}")]
    DomainMismatch(String),
    #[error("mollifier under-resolved: {0}")]
    UnderResolved(String),
    #[error("not enough usable points for an order fit ({0} < 4)")]
    TooFewPoints(usize),
    #[error("expression depth {0} exceeds cap 16")]
    TooDeep(usize),
    #[error("zero-test-object check failed: {0}")]
    ZeroNetRejected(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
