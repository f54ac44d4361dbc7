use thiserror::Error;

/// Errors produced by the library.
///
/// `InvalidInput` covers every violated precondition (bad ranges, invalid
/// blocks, size limits). The CLI maps it to a usage error.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("alphabet mismatch: k={left} vs k={right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("no natural constant block of length {len} found after {attempts} attempts")]
    NaturalBlockNotFound { len: usize, attempts: usize },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidInput(msg.into())
    }

    /// True for errors caused by the caller's arguments rather than by the run.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            LabError::InvalidInput(_) | LabError::AlphabetMismatch { .. }
        )
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
