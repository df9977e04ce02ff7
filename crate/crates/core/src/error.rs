use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or out-of-range input data.
    #[error("input error: {0}")]
    Input(String),
    /// The input is well formed but violates an operation's precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Supported in principle but outside what this crate models.
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// A configured resource cap would be exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// A post-condition check failed. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
