use thiserror::Error;

/// Errors raised by every fallible operation in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("parity error: {0}")]
    Parity(String),

    /// `count` saturates at `u128::MAX`.
    #[error("exact enumeration needs {count} outcomes but the cap is {cap}; use monte carlo mode")]
    CapExceeded { count: u128, cap: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no loss entry for prediction {prediction} and label {label}")]
    MissingLossEntry { prediction: i64, label: i64 },

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
