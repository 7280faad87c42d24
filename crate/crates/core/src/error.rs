use std::io;

use thiserror::Error;

pub type Result<T, E = MiningError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset has no transactions")]
    EmptyDataset,

    #[error("line {line}: unknown item id {item}")]
    UnknownItem { line: usize, item: u64 },

    #[error("missing minimum support for item {0}")]
    MissingItem(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("brute-force guard exceeded: {what} is {actual}, limit {limit}")]
    GuardExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}
