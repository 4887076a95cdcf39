use thiserror::Error;

/// Errors raised by the workbench library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum PolarError {
    #[error("block length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("block exponent {0} exceeds the supported maximum of {max}", max = crate::transform::MAX_EXPONENT)]
    ExponentTooLarge(u32),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("observations are inconsistent with every codeword")]
    Inconsistent,

    #[error("information set of size {k} exceeds the exhaustive search limit of {max}")]
    TooManyInformationBits { k: usize, max: usize },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, PolarError>;

pub(crate) fn invalid(msg: impl Into<String>) -> PolarError {
    PolarError::InvalidInput(msg.into())
}
