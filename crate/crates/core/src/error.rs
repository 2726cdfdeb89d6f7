use thiserror::Error;

/// Failure modes shared by all modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error for `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("positivity violated at grid index {index}: {detail}")]
    Positivity { index: usize, detail: String },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("geometric precondition violated: {0}")]
    Geometric(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("flow blow-up: {0}")]
    FlowBlowup(String),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { key: key.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
