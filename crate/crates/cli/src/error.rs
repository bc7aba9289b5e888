use qnd_core::QndError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or parameters outside the physical domain.
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Runtime(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<QndError> for CliError {
    fn from(e: QndError) -> Self {
        match e {
            QndError::InvalidInput(_) | QndError::NoDistinguishability { .. } => {
                CliError::Usage(e.to_string())
            }
            QndError::DegenerateOutcome { .. } | QndError::Unreachable { .. } => {
                CliError::Runtime(e.to_string())
            }
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(format!("json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
