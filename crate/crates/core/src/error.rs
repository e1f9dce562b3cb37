use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input: shape mismatch, index out of range, bad parameter.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Input outside the domain where the operation is defined (singular
    /// matrix, singular metric, missing bisection bracket, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative kernel failed to converge or produced unusable output.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
