use std::io;
use std::path::PathBuf;

use aksara_core::graph::GraphError;
use aksara_core::normalizer::UnknownRule;
use aksara_core::{ParamError, SimilarityError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read manifest {}: {source}", path.display())]
    ManifestIo { path: PathBuf, source: io::Error },

    #[error("malformed manifest {}: {source}", path.display())]
    ManifestParse {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("unknown document `{0}`")]
    UnknownDocument(String),

    #[error("corpus has no documents")]
    EmptyCorpus,

    #[error(transparent)]
    Params(#[from] ParamError),

    #[error(transparent)]
    Rule(#[from] UnknownRule),

    #[error(transparent)]
    Similarity(#[from] SimilarityError),

    #[error(transparent)]
    Graph(#[from] GraphError),

    #[error("unknown format `{0}`")]
    UnknownFormat(String),

    #[error("malformed graph document: {0}")]
    GraphImport(String),

    #[error("cache file {}: {message}", path.display())]
    Cache { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by how the tool was invoked rather than by the
    /// data it was pointed at.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Params(_)
                | Error::Rule(_)
                | Error::UnknownFormat(_)
                | Error::Similarity(SimilarityError::UnknownMetric(_))
        )
    }
}
