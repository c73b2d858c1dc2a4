use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("row {row}: expected {expected} values, found {found}")]
    RaggedRows { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    UnparseableField { row: usize, column: usize, value: String },
    #[error("expected at most 2 distinct labels, found {found}")]
    UnknownLabelArity { found: usize },
    #[error("row {row}: label {label} is not one of the training labels")]
    UnknownLabel { row: usize, label: f64 },
    #[error("file contains no series")]
    EmptyFile,
    #[error("model schema version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch { found: u64, expected: u64 },
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error("invalid plot spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Core(#[from] frfx_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;

pub(crate) fn io_at(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> IoError {
    let path = path.into();
    move |source| IoError::Io { path, source }
}
