//! Error type shared across the crate.

/// Errors produced by library operations.
///
/// `Config`, `Argument` and `Parse` indicate bad inputs and are reported
/// before any expensive work starts; `Io` wraps filesystem failures.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("undefined significance: {0}")]
    UndefinedSignificance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by invalid user input rather than runtime failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[macro_export]
macro_rules! argument_error {
    ($($arg:tt)*) => { $crate::Error::Argument(format!($($arg)*)) };
}

#[macro_export]
macro_rules! config_error {
    ($($arg:tt)*) => { $crate::Error::Config(format!($($arg)*)) };
}
