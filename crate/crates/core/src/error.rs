use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("placement failed: {0}")]
    PlacementFailed(String),

    #[error("link probability is zero; prune the link instead of scoring it")]
    ZeroProbability,

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("relay path has no links")]
    EmptyPath,

    #[error("no relay candidates to choose from")]
    NoCandidates,

    #[error("invalid flow estimate: {0}")]
    InvalidEstimate(String),

    #[error("delivery trace is empty")]
    EmptyTrace,

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error{}: {message}", location(.line, .key))]
    Parse {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("policy snapshot line {line}: {message}")]
    Snapshot { line: usize, message: String },

    #[error("sweep point {axis}={value} mode={mode} seed={seed} failed: {source}")]
    SweepPoint {
        axis: String,
        value: u32,
        mode: String,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn location(line: &Option<usize>, key: &Option<String>) -> String {
    match (line, key) {
        (Some(l), Some(k)) => format!(" at line {l} (key `{k}`)"),
        (Some(l), None) => format!(" at line {l}"),
        (None, Some(k)) => format!(" (key `{k}`)"),
        (None, None) => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
