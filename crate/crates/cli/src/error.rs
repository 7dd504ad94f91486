use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag values, caught before any input is read.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] embeval_core::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 2 for argument errors, 3 for input and parse errors, 4 for internal
    /// invariant violations.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(embeval_core::Error::Invariant(_)) | CliError::Internal(_) => 4,
            CliError::Core(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
