use thiserror::Error;

/// Errors raised by the laboratory modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("index {index} out of range (available: {available})")]
    OutOfRange { index: usize, available: usize },
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("construction failed at level {level}: {reason}")]
    Construction { level: usize, reason: String },
    #[error("resource budget exceeded: {0}")]
    Resource(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! input_err {
    ($($arg:tt)*) => {
        $crate::error::Error::Input(format!($($arg)*))
    };
}
pub(crate) use input_err;
