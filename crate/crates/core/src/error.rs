use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage, used to tag errors surfacing from [`crate::aligner::align_pipeline`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Parse,
    Factory,
    Train,
    Extract,
    Similarity,
    Match,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Parse => "parse",
            Stage::Factory => "factory",
            Stage::Train => "train",
            Stage::Extract => "extract",
            Stage::Similarity => "similarity",
            Stage::Match => "match",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unsupported construct: {construct}")]
    Unsupported { line: usize, construct: String },

    #[error("row {row}: malformed alignment row: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("malformed alignment xml: {0}")]
    MalformedXml(String),

    #[error("empty factory: both ontologies contain no statements")]
    EmptyFactory,

    #[error("cannot corrupt: the factory has a single entity")]
    CannotCorrupt,

    #[error("invalid dimension {dim} for {model}: must be a positive multiple of {multiple}")]
    Dimension {
        model: String,
        dim: usize,
        multiple: usize,
    },

    #[error("{what} id {id} out of range (size {size})")]
    IdOutOfRange {
        what: &'static str,
        id: usize,
        size: usize,
    },

    #[error("unknown model '{name}'; supported models: {supported}")]
    UnknownModel { name: String, supported: String },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("divergence: non-finite loss at epoch {epoch}, batch {batch}")]
    Divergence { epoch: usize, batch: usize },

    #[error("size mismatch: checkpoint has {checkpoint} {what}, factory has {factory}")]
    SizeMismatch {
        what: &'static str,
        checkpoint: usize,
        factory: usize,
    },

    #[error("zero-norm embedding row for entity '{label}'")]
    ZeroNorm { label: String },

    #[error("no {side} entities left to align")]
    EmptySide { side: String },

    #[error("dimension mismatch: source rows have {source_dim} columns, target rows have {target_dim}")]
    DimMismatch { source_dim: usize, target_dim: usize },

    #[error("reference alignment is empty")]
    EmptyReference,

    #[error("invalid threshold grid: {0}")]
    InvalidGrid(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("invalid benchmark spec: {0}")]
    InvalidBench(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at(self, stage: Stage) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
