use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the toolkit.
///
/// The variants mirror the failure classes of the numerical and algebraic
/// operations; the CLI maps them onto exit codes (see [`Error::exit_class`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {z} lies on the branch cut (-inf, 0]")]
    BranchCut { z: Complex64 },

    #[error("pole of {what} at {at}")]
    Pole { what: &'static str, at: Complex64 },

    #[error("Hurwitz zeta has a pole at a = 1")]
    PoleAtOne,

    #[error("{what} did not converge (error estimate {estimate:e})")]
    ConvergenceFailure { what: &'static str, estimate: f64 },

    #[error("series tail {tail:e} exceeds tolerance {tol:e}")]
    SlowConvergence { tail: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("relation {relation} is violated by the supplied character (sum {sum})")]
    RelationViolation { relation: String, sum: String },

    #[error("nu = {nu} lies in 1/2 + Z; the Bruggeman transform is not invertible there")]
    HalfIntegerNu { nu: Complex64 },

    #[error("m + 2 nu vanishes for m = {m}")]
    ResonantNu { m: usize },

    #[error("requested size {n} exceeds the limit {max}")]
    SizeLimit { n: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// A mathematical precondition or validation failed.
    Validation,
    /// A numerical procedure failed to converge.
    Numeric,
    /// Configuration, parsing or I/O.
    Config,
}

impl Error {
    pub fn exit_class(&self) -> ErrorClass {
        match self {
            Error::ConvergenceFailure { .. }
            | Error::SlowConvergence { .. }
            | Error::HalfIntegerNu { .. }
            | Error::ResonantNu { .. }
            | Error::Pole { .. }
            | Error::PoleAtOne
            | Error::BranchCut { .. } => ErrorClass::Numeric,
            Error::Parse(_) | Error::Io(_) | Error::SizeLimit { .. } => ErrorClass::Config,
            Error::DimensionMismatch { .. } | Error::RelationViolation { .. } | Error::Domain(_) => {
                ErrorClass::Validation
            }
        }
    }
}

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

pub type Result<T> = std::result::Result<T, Error>;
