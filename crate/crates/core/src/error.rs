use thiserror::Error;

/// Errors raised by the matrix model and the factorizations built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("structural mismatch: {0}")]
    Structure(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("dense kernel failed: {0}")]
    Kernel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn structure(msg: impl Into<String>) -> Error {
    Error::Structure(msg.into())
}
