use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid-parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed-cover: {0}")]
    MalformedCover(String),

    #[error("malformed-file: {0}")]
    MalformedFile(String),

    #[error("unsupported-input: {0}")]
    UnsupportedInput(String),

    #[error("invalid-witness: {0}")]
    InvalidWitness(String),

    /// The operation budget ran out. `lo..=hi` is what was established before stopping.
    #[error("resource-limit: {reason} (bracket [{lo}, {}])", hi.map_or("?".to_string(), |h| h.to_string()))]
    ResourceLimit {
        reason: String,
        lo: usize,
        hi: Option<usize>,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed-file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
