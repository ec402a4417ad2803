use thiserror::Error;

/// Errors produced by the analysis library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("label count mismatch: graph has {graph} labels, system has {system} modes")]
    LabelMismatch { graph: usize, system: usize },

    #[error("label count mismatch: premise graph has {premise} labels, conclusion graph has {conclusion}")]
    GraphLabelMismatch { premise: usize, conclusion: usize },

    #[error("invalid label {label} (valid labels are 1..={max})")]
    InvalidLabel { label: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("graph is not path-complete")]
    NotPathComplete,

    #[error("certificate failed verification: {0}")]
    Unverified(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
