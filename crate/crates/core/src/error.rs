use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the set on which the quantity is defined.
    #[error("domain error in {operation}: {detail}")]
    Domain {
        operation: &'static str,
        detail: String,
    },

    /// A parameter record violates one of its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The bracketed root solver ran out of iterations.
    #[error(
        "root solver did not converge after {iterations} iterations; last bracket [{lower}, {upper}]"
    )]
    SolverNonConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    /// Adaptive quadrature hit its subdivision cap before meeting the tolerance.
    #[error(
        "quadrature did not reach tolerance {tolerance:e} after {subdivisions} subdivisions (error estimate {estimate:e})"
    )]
    QuadratureNonConvergence {
        tolerance: f64,
        estimate: f64,
        subdivisions: usize,
    },

    /// The parameters fall outside the regime in which a bound was proved.
    #[error("parameter regime: {0}")]
    ParameterRegime(String),

    /// A verification harness was handed a map that does not satisfy its normalization.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A polynomial map description is malformed.
    #[error("invalid map: {0}")]
    InvalidMap(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(operation: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        operation,
        detail: detail.into(),
    }
}
