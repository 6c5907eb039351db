use thiserror::Error;

/// Errors produced by the tailsum library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("atom probability {0} is negative or not finite")]
    NegativeProb(f64),
    #[error("atom value {0} is not finite")]
    NonFiniteValue(f64),
    #[error("total probability mass {0} exceeds one")]
    TotalMassExceedsOne(f64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("argument out of domain: {0}")]
    DomainError(String),
    #[error("bisection did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("enumeration needs {0} outcomes, above the limit")]
    EnumTooLarge(f64),
    #[error("quantile level {level} is below the Monte Carlo resolution {resolution}")]
    QuantileUnavailable { level: f64, resolution: f64 },
    #[error("curves are not equivalent at grid resolution (constant above {0})")]
    NoFit(f64),
    #[error("sequence has no components")]
    EmptySequence,
    #[error("flag mismatch: {0}")]
    FlagMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
