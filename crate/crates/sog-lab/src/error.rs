use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    #[error("assumption violated: {0}")]
    Assumption(String),

    /// Statistically degenerate run (e.g. no interior regeneration points);
    /// callers should retry with larger n or smaller c.
    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid path: ({0},{1}) is not an edge")]
    InvalidPath(usize, usize),

    #[error("span {0} exceeds the brute-force guard of {1}")]
    SpanGuard(usize, usize),

    #[error("ball with {0} vertices exceeds the exhaustive-matching guard of {1}")]
    BallGuard(usize, usize),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parameter(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter { name: name.into(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
