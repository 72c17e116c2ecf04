use thiserror::Error;

/// Errors raised anywhere in the pipeline. The CLI maps the variant to an exit code.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("root solve failed: {0}")]
    RootSolve(String),
    #[error("trace failed: {0}")]
    Trace(String),
    #[error("decomposition failed: {0}")]
    Decompose(String),
    #[error("invariant computation failed: {0}")]
    Invariant(String),
    #[error("realization failed: {0}")]
    Realize(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
