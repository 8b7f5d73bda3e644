use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("character is not primitive: modulus {modulus}, conductor {conductor}")]
    NotPrimitive { modulus: u64, conductor: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not integral: {0}")]
    NotIntegral(String),
    #[error("zero divisor: {0}")]
    ZeroDivisor(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }
}
