use thiserror::Error;

/// Errors raised by constructions, solvers and I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("exact arithmetic requires an integer exponent, got {0}")]
    ExactNeedsIntegerExponent(f64),

    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("point ({0}, {1}) lies outside the square [-1, 1]^2")]
    OutsideSquare(String, String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("sigma must be nonnegative, got {0}")]
    NegativeSigma(String),

    #[error("marginal mismatch: {0}")]
    MarginalMismatch(String),

    #[error("instance too large for the vertex-enumeration oracle: {rows} x {cols} > {limit}")]
    InstanceTooLarge { rows: usize, cols: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operation requires exact arithmetic: {0}")]
    RequiresExact(&'static str),

    #[error("solver did not converge within {0} pivots")]
    NoConvergence(usize),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
