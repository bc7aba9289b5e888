use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QndError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("probe cannot distinguish the branches (alpha = {alpha}, theta = {theta})")]
    NoDistinguishability { alpha: f64, theta: f64 },

    #[error("homodyne outcome x = {x} has vanishing likelihood under every branch")]
    DegenerateOutcome { x: f64 },

    #[error("target failure {target} is unreachable with p = {p} for c <= {max_c}")]
    Unreachable { target: f64, p: f64, max_c: u64 },
}

pub type Result<T> = std::result::Result<T, QndError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(QndError::InvalidInput(msg.into()))
}
