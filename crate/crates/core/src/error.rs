use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical core.
///
/// `Validation` covers malformed inputs and violated preconditions;
/// `NonConvergence` is reserved for iterative solvers that ran out of budget
/// without an acceptable answer.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Validation(String),
    Domain(String),
    NonConvergence(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn non_convergence(msg: impl Into<String>) -> Self {
        Error::NonConvergence(msg.into())
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation(m) => write!(f, "validation error: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::NonConvergence(m) => write!(f, "numerical non-convergence: {m}"),
        }
    }
}

impl core::error::Error for Error {}
