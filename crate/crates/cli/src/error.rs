use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// Unreadable or malformed input file.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Lib(#[from] qsw::Error),
    /// Some invariant group failed.
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(qsw::Error::Solver(_)) | CliError::Internal(_) => 2,
            _ => 1,
        }
    }
}
