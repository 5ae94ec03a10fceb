use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("cannot read corpus root {path}: {reason}")]
    UnreadableRoot { path: PathBuf, reason: String },

    #[error("invalid rule on line {line}: {reason}")]
    Rule { line: usize, reason: String },

    #[error("invalid pattern for {category}: {source}")]
    Pattern {
        category: String,
        #[source]
        source: regex::Error,
    },

    #[error("invalid config on line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("malformed input at line {line}: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("invalid language data: {0}")]
    LangData(String),

    #[error("invalid model file: {0}")]
    Model(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
