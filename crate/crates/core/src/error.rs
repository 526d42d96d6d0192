//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by parameter validation, signal processing and numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A `SchemeParams` invariant was violated.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An argument was outside its domain (negative variance, empty input, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A channel realization does not match the slot structure of a plan.
    #[error("channel mismatch: {slots} slot(s) in plan, {coefficients} coefficient(s) given")]
    ChannelMismatch { slots: usize, coefficients: usize },

    /// Adaptive quadrature ran out of subdivisions before reaching its tolerance.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error estimate {error:e})"
    )]
    QuadratureDiverged {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    /// Malformed run configuration or sweep definition.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed CSV content.
    #[error("csv parse error at line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
