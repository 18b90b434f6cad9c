use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("not enough {sign} samples: need {needed}, have {available}")]
    Imbalance {
        sign: &'static str,
        needed: usize,
        available: usize,
    },
    #[error("forward tape does not match these parameters or this upstream gradient")]
    TapeMismatch,
    #[error("optimizer fault: {0}")]
    OptimizerFault(String),
    #[error("inference fault: {0}")]
    InferenceFault(String),
    #[error("no surface visible from any camera")]
    EmptyShell,
    #[error("depth map has no hit pixels")]
    EmptyObservation,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for faults raised by non-finite numbers during optimization.
    pub fn is_numeric_fault(&self) -> bool {
        matches!(self, Error::OptimizerFault(_) | Error::InferenceFault(_))
    }
}
