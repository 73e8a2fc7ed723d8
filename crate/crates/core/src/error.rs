use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("construction failure: {0}")]
    Construction(String),
    #[error("tail error: {0}")]
    Tail(String),
    #[error("support error: {0}")]
    Support(String),
}

pub type Result<T> = std::result::Result<T, HypError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(HypError::Domain(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(HypError::InvalidParameter(msg.into()))
}
