use thiserror::Error;

use crate::arith::PartialFactorization;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value exceeds the supported 64-bit width: {0}")]
    WidthOverflow(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("factorization budget of {budget} iterations exceeded (unfactored cofactors: {:?})", partial.unfactored)]
    BudgetExceeded {
        budget: u64,
        partial: PartialFactorization,
    },

    #[error("{what} = {value} exceeds the brute-force cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("construction too thin: #Q = {achieved} but nu = {needed}")]
    ConstructionTooThin { achieved: usize, needed: usize },

    #[error("empty sweep: no primes <= {0}")]
    EmptySweep(f64),

    #[error("i/o or format error: {0}")]
    Io(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
