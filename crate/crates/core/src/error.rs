use thiserror::Error;

/// Errors raised by the engine, the model parser and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated an operation's precondition (context mismatch,
    /// missing valuation entry, unknown location, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// The model itself is unusable, e.g. its initial invariant is unsatisfiable.
    #[error("model error: {0}")]
    Model(String),
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// An exploration exceeded its state budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }
}
