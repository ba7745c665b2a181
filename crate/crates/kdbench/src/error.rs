use thiserror::Error;

/// Errors raised by builders and the workbench.
#[derive(Debug, Error)]
pub enum KdError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("k-d tree verification failed: {0}")]
    Verification(String),

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl KdError {
    /// Process exit code used by the `kdbench` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            KdError::InvalidInput(_) => 1,
            KdError::Verification(_) => 2,
            KdError::InternalConsistency(_) => 3,
            KdError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, KdError>;
