use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dataset unusable: {0}")]
    EmptyDataset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("cannot fit a score function on an empty column")]
    EmptyColumn,

    #[error("every score column has zero entropy")]
    AllZeroEntropy,

    #[error("dependency weights undefined: every column determines the joint ranking")]
    DegenerateDependency,

    #[error("entropy and dependency weights have no overlapping support")]
    ZeroProduct,

    #[error("input contains NaN or infinite values")]
    NonFiniteInput,

    #[error("approach requires a response column but the dataset has none")]
    MissingResponse,

    #[error("arity mismatch: model expects {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("no dataset could be loaded")]
    NoUsableDatasets,

    #[error("report contains no evaluated cells")]
    EmptyReport,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid model file: {0}")]
    Model(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }
}
