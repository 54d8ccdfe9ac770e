use lplab_core::LabError;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("field file: {0}")]
    Format(String),
    #[error("{0}")]
    Parse(String),
}

pub type AppResult<T> = Result<T, AppError>;

pub(crate) fn parse_err<T>(msg: impl Into<String>) -> AppResult<T> {
    Err(AppError::Parse(msg.into()))
}

impl AppError {
    /// Exit status for a failed command.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Parse(_) => 64,
            _ => 2,
        }
    }
}
