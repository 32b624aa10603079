use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("singular evaluation: {0}")]
    Singular(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("memory cap exceeded: {0}")]
    Memory(String),
    #[error("solver aborted: {0}")]
    Aborted(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
