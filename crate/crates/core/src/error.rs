use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {what}: {source}")]
    Io {
        what: String,
        #[source]
        source: std::io::Error,
    },

    #[error("missing knowledge-base file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{file}: score out of range line {line}")]
    ScoreOutOfRange { file: String, line: usize },

    #[error("{file}: parse error line {line}: {reason}")]
    Parse {
        file: String,
        line: usize,
        reason: String,
    },

    #[error("invalid corpus: {0}")]
    InvalidCorpus(String),

    #[error("invalid topic config: {0}")]
    InvalidConfig(String),

    #[error("insufficient support: {}", .0.join(", "))]
    InsufficientSupport(Vec<String>),

    #[error("insufficient class support: {0}")]
    InsufficientClassSupport(String),

    #[error("config mismatch: model trained on {model}, got {config}")]
    ConfigMismatch { model: String, config: String },

    #[error("feature dimension mismatch: model expects {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{kind} not found: {id}")]
    NotFound { kind: &'static str, id: String },

    #[error("empty confusion matrix")]
    EmptyConfusionMatrix,

    #[error("unsupported model artifact version {0}")]
    UnsupportedVersion(u32),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(what: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            what: what.into(),
            source,
        }
    }

    pub fn not_found(kind: &'static str, id: impl Into<String>) -> Self {
        Error::NotFound {
            kind,
            id: id.into(),
        }
    }

    /// Errors caused by bad user input rather than an environment failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::MissingFile(_))
    }
}
