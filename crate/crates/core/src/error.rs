use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    /// The unscaled result does not fit in an `f64`.
    #[error("overflow in {function} at x = {x}; use the exponentially scaled variant")]
    Overflow { function: &'static str, x: f64 },

    /// An integrand returned NaN or an infinity.
    #[error("integrand returned non-finite value {value} at {at}")]
    NonFiniteIntegrand { at: f64, value: f64 },

    /// An iterative solver ran out of iterations.
    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// A quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: value {value}, error estimate {error_estimate:e}")]
    QuadratureFailed { value: f64, error_estimate: f64 },

    /// Invalid construction parameters for a domain type.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
