use thiserror::Error;

/// Errors raised by the localization pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate direction: candidate coincides with the receiver position")]
    DegenerateDirection,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("shape mismatch: expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("empty batch")]
    EmptyBatch,

    #[error("candidate set has no truth index")]
    MissingTruth,

    #[error("all candidates lie outside the prior support")]
    NoSupport,

    #[error("invalid probability vector: {0}")]
    Probability(String),

    #[error("checkpoint version error: {0}")]
    CheckpointVersion(String),

    #[error("checkpoint shape error: {0}")]
    CheckpointShape(String),

    #[error("dataset line {line}: {msg}")]
    DatasetLine { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
