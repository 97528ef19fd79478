use thiserror::Error;

/// Errors raised by the numerical toolkit.
///
/// The variants map one-to-one onto the failure classes the command-line
/// front-end turns into exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("degenerate ridgelet pair: scalar product {value:e} is too small to normalize by")]
    DegeneratePair { value: f64 },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
