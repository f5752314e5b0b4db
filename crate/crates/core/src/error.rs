use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid generator or experiment settings.
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller-supplied argument violates an operation's precondition.
    #[error("argument error: {0}")]
    Argument(String),

    /// Problem size exceeds what exhaustive enumeration or dense simulation supports.
    #[error("resource error: {0}")]
    Resource(String),

    /// Randomized construction gave up after its retry budget.
    #[error("generation error: {0}")]
    Generation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The objective produced NaN or infinity; `iterate` holds the offending point.
    #[error("numerical error: {message} at iterate {iterate:?}")]
    Numerical { message: String, iterate: Vec<f64> },

    /// A training phase failed; the phases finished before it are attached.
    #[error("phase {phase} failed: {source}")]
    PhaseFailed {
        phase: usize,
        #[source]
        source: Box<Error>,
        completed: Vec<crate::trainer::PhaseResult>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
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

pub type Result<T> = std::result::Result<T, Error>;
