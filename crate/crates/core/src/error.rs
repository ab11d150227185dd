use thiserror::Error;

/// Errors raised by the simulator and its building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A vessel sits exactly at the position of a zero-height node.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid input `{name}`: {reason}")]
    InvalidInput { name: &'static str, reason: String },

    /// One or more configuration keys failed validation.
    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    /// A bookkeeping invariant (non-negativity, conservation) broke mid-run.
    #[error("invariant violated at slot {slot}: {detail}")]
    Invariant { slot: u64, detail: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn input(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            name,
            reason: reason.into(),
        }
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

pub type Result<T> = std::result::Result<T, Error>;
