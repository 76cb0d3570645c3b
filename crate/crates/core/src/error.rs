use thiserror::Error;

/// Errors produced by the core linear algebra and operator layer.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl CoreError {
    pub fn dim(msg: impl Into<String>) -> Self {
        CoreError::DimMismatch(msg.into())
    }
    pub fn invariant(msg: impl Into<String>) -> Self {
        CoreError::Invariant(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        CoreError::Numerical(msg.into())
    }
    pub fn arg(msg: impl Into<String>) -> Self {
        CoreError::InvalidArgument(msg.into())
    }
}
