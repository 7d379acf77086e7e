//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("function is not mean-zero (defect {defect:e}, scale {scale:e})")]
    NotMeanZero { defect: f64, scale: f64 },

    #[error("measure is not balanced (total mass {total:e}, total variation {variation:e})")]
    Unbalanced { total: f64, variation: f64 },

    #[error("engine {engine} cannot handle this input: {reason}")]
    EngineMismatch {
        engine: &'static str,
        reason: String,
    },

    #[error("size limit exceeded: {what} is {got}, limit {limit}")]
    SizeLimit {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("index {index} out of range (length {len})")]
    OutOfRange { index: usize, len: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("missing {0}")]
    Missing(&'static str),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
