use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data violates a structural invariant (non-finite entries,
    /// non-Hermitian matrix, bad weights, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    /// An argument is out of its admissible range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A formula is evaluated outside its domain of definition.
    #[error("outside domain: {0}")]
    Domain(String),

    /// A theorem precondition does not hold for the supplied input.
    #[error("precondition not met: {0}")]
    Precondition(String),

    /// Requested computation exceeds a resource guard.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
