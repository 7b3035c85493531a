use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("arity mismatch for {rel}: expected {expected}, found {found}")]
    Arity { rel: String, expected: usize, found: usize },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("interpretation is not model-defining at {0}")]
    NotModelDefining(String),
    #[error("flavor mismatch: {0}")]
    Flavor(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
