use thiserror::Error;

/// Errors raised by the library. Each variant names the contract that was violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
