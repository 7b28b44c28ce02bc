use thiserror::Error;

/// Errors raised across the library. Validation routines report
/// [`Diagnostic`](crate::Diagnostic)s instead of failing.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("input error: {0}")]
    Input(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("mode error: {0}")]
    Mode(String),
    #[error("exact-fallback-exceeded: {0}")]
    ExactFallbackExceeded(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Outcome of a structural check: `Ok(())` or the first violated invariant.
pub type Diagnostic = std::result::Result<(), String>;
