use thiserror::Error;

use crate::numerics::LogScalar;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An arithmetic operation is undefined for its operands.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integral that must be finite diverges.
    #[error("divergent integral: {0}")]
    Divergence(String),

    /// The operation is not defined for this kind of input.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A query landed exactly on a breakpoint where only one-sided values exist.
    #[error("undefined at breakpoint t = {0}")]
    Breakpoint(f64),

    /// Adaptive quadrature did not reach its tolerance.
    #[error("quadrature did not converge: estimate {estimate}, relative error bound {error_bound:e}")]
    Accuracy {
        estimate: LogScalar,
        error_bound: f64,
    },

    /// A bound was requested outside the hypotheses that make it valid.
    #[error("hypothesis not satisfied: {0}")]
    Precondition(String),

    /// Exponent estimates contradict the inclusion ordering of the exponent sets.
    #[error("exponent ordering violated: {0}")]
    Ordering(String),
}

pub type Result<T> = std::result::Result<T, Error>;
