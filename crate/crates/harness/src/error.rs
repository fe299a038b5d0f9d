use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] rcm_core::Error),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Configuration mistakes are usage errors.
    pub fn is_usage(&self) -> bool {
        matches!(self, HarnessError::UnknownMethod(_) | HarnessError::Config(_))
    }
}
