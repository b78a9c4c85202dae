use thiserror::Error;

/// Errors raised by constructors and operations of the engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("operands live over different bases")]
    BasisMismatch,
    #[error("degree violation: {0}")]
    Degree(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not a Maurer-Cartan element: equation fails at order {order}")]
    NotMaurerCartan { order: usize },
    #[error("scope out of range: {0}")]
    Scope(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
