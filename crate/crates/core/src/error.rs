use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {file} line {line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("validation failed for `{id}`: {reason}")]
    Validation { id: String, reason: String },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("training error: {0}")]
    Training(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("comparison error: {0}")]
    Comparison(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn validation(id: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            id: id.into(),
            reason: reason.into(),
        }
    }
}
