use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum TwinError {
    /// A physical or numerical parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    /// Two objects that must share a grid (field pair, mask, detector) do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    /// An operation was applied in the wrong propagation plane
    /// (e.g. pixelizing a source-plane field).
    #[error("wrong plane: {0}")]
    WrongPlane(String),
    /// A requested estimate cannot be formed from the supplied ensemble.
    #[error("estimation failed: {0}")]
    Estimation(String),
    /// A numerical computation produced non-finite values.
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TwinError>;

pub(crate) fn invalid(msg: impl Into<String>) -> TwinError {
    TwinError::InvalidParam(msg.into())
}
