use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),
    /// Caller-side contract violation (length mismatch, non-monotone input, ...).
    #[error("contract violation: {0}")]
    Contract(String),
    /// Bad input data (NaN p-values, malformed rows).
    #[error("data error: {0}")]
    Data(String),
    #[error("conditional probability undefined: {0}")]
    UndefinedConditional(String),
    #[error("power undefined: {0}")]
    UndefinedPower(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("m = {m} exceeds the {backend} backend cap of {cap}")]
    TooLarge {
        m: usize,
        cap: usize,
        backend: &'static str,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
