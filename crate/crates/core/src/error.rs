use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus is empty after stop-word filtering")]
    EmptyCorpus,

    #[error("requested {requested} strings but the corpus holds {available}")]
    SampleSize { requested: usize, available: usize },

    #[error("knowledge ratio {0} is outside (0, 1]")]
    KnowledgeRatio(f64),

    #[error("alphabet of {0} symbols exceeds the 900 available three-digit tokens")]
    AlphabetTooLarge(usize),

    #[error("character {0:?} is not in the key domain")]
    UnknownCharacter(char),

    #[error("token {0} is not in the token universe")]
    UnknownToken(u32),

    #[error("node {0} is not a leaf")]
    NotALeaf(usize),

    #[error("matrix has {found} rows but the extension target is {target}")]
    ExtensionTarget { found: usize, target: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("logistic fit failed after {iterations} iterations: {reason} (sse={sse:.6})")]
    FitFailure {
        iterations: usize,
        reason: String,
        sse: f64,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
