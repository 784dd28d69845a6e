use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] zeeman_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    /// 1 usage or validation, 2 solver or domain, 3 failed verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Core(_) | CliError::Io(_) => 2,
            CliError::Verify(_) => 3,
        }
    }
}
