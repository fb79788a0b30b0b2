use std::io;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("malformed class label {0:?}")]
    MalformedLabel(String),

    #[error("class label {0:?} is not one of the 40 banknote classes")]
    UnknownClass(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite loss {loss} at episode {episode}")]
    NonFiniteLoss { episode: usize, loss: f64 },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),

    #[error("truncated {what}: expected {expected} bytes, found {found}")]
    Truncated {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("label {label} out of range 0..={n_classes} at record {record}")]
    LabelOutOfRange {
        record: usize,
        label: i64,
        n_classes: usize,
    },

    #[error("invalid record {record}: {reason}")]
    InvalidRecord { record: usize, reason: String },

    #[error("class {class} has {count} samples; at least 3 are required to split")]
    StratumTooSmall { class: String, count: usize },
}
