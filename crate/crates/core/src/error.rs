//! Error type shared by every module of the crate.

use std::fmt;

/// Errors from numerical evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the documented domain of the operation.
    Domain(String),
    /// Evaluation requested at (or within the guard radius of) a pole.
    Pole(String),
    /// A series, continued fraction, or tail fit failed to certify the
    /// requested tolerance.
    Convergence(String),
    /// A 2x2 matrix argument is singular.
    SingularMatrix(String),
    /// A transformed bump support would leave its fundamental domain.
    SupportViolation(String),
    /// Integer inputs exceed the representable range.
    Overflow(String),
    /// A quadrature routine could not reach its target accuracy.
    Quadrature(String),
    /// An operation produced a non-finite value.
    NonFinite(String),
    /// Cache I/O failure (the JSON-lines L-value cache).
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Pole(m) => write!(f, "pole error: {m}"),
            Error::Convergence(m) => write!(f, "convergence error: {m}"),
            Error::SingularMatrix(m) => write!(f, "singular matrix: {m}"),
            Error::SupportViolation(m) => write!(f, "support violation: {m}"),
            Error::Overflow(m) => write!(f, "overflow: {m}"),
            Error::Quadrature(m) => write!(f, "quadrature failure: {m}"),
            Error::NonFinite(m) => write!(f, "non-finite result: {m}"),
            Error::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
