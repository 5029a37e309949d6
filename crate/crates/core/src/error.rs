use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: csv error: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: header mismatch, expected `{expected}`, found `{found}`")]
    Header { path: String, expected: String, found: String },

    #[error("{path}: line {line}, column `{column}`: {message}")]
    Field { path: String, line: u64, column: String, message: String },

    #[error("{path}: duplicate cell id `{id}`")]
    DuplicateCell { path: String, id: String },

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
