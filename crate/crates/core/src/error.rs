use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("factorization is incomplete (unfactored cofactor {cofactor})")]
    IncompleteFactorization { cofactor: String },

    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),

    #[error("comparison could not be decided up to {max_precision} bits of precision")]
    Undecided { max_precision: u32 },

    #[error("cache {path}:{line}: {reason}")]
    CacheFormat {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("cache entry for index {n} rejected: {reason}")]
    CacheEntry { n: u64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
