use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("heterogeneity parameter undefined: network has no links")]
    UndefinedK,

    #[error("unknown experiment preset `{0}`")]
    UnknownPreset(String),

    #[error("parse error in {path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("all runs failed in sweep cell {cell}: {message}")]
    CellFailed { cell: usize, message: String },
}

impl Error {
    /// True for errors caused by the user's configuration rather than by
    /// the run itself.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::UnknownPreset(_))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
