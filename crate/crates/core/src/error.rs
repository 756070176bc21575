//! Error type shared by all modules.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("empty sample vector")]
    EmptySamples,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("model schema error at {field}: {reason}")]
    Schema { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
