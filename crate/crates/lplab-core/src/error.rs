use alloc::string::String;

/// Errors raised by the laboratory operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LabError {
    #[error("band {j} outside resolvable window [{lo}, {hi}]")]
    BandRange { j: i32, lo: i32, hi: i32 },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("aliasing risk: inputs must stay at or below band {ceiling}")]
    Aliasing { ceiling: i32 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("degenerate set: distance field is empty")]
    DegenerateSet,
    #[error("range error: {0}")]
    Range(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, LabError>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Argument(msg.into()))
}
