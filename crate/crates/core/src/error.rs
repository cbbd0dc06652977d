use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = GrpError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GrpError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A likelihood term left the finite range. Indices are zero-based.
    #[error("numeric overflow at item {item}, event {event}")]
    NumericOverflow { item: usize, event: usize },

    #[error("degenerate objective: no finite evaluation in iteration {iteration}")]
    DegenerateObjective { iteration: usize },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl GrpError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        GrpError::InvalidInput(msg.into())
    }
}
