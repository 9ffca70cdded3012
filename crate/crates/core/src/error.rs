use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("frequency basis mismatch")]
    BasisMismatch,

    #[error("frequency has {got} rational coordinates, expected {expected}")]
    FrequencyShape { expected: usize, got: usize },

    #[error("value is not representable exactly: {0}")]
    NotExact(String),

    #[error("denominator vanishes at x={x:?}, xi={xi:?}")]
    Domain { x: Vec<f64>, xi: Vec<f64> },

    #[error("frequency {xi:?} lies below the validity radius {radius}")]
    BelowValidityRadius { xi: Vec<f64>, radius: f64 },

    #[error("non-finite sample at {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not enough usable data: {0}")]
    InsufficientData(String),

    #[error("operation requires a {0}")]
    Unsupported(String),

    #[error("expression is structurally zero")]
    ZeroSymbol,

    #[error("term count limit exceeded: {0}")]
    TooManyTerms(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
