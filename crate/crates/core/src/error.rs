//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    Model(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("stability failure: {0}")]
    Stability(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("empty semistable locus: no fixed-point subsets carry the stability character")]
    EmptySemistableLocus,

    #[error("verification failed: {0}")]
    Check(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
