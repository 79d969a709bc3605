use thiserror::Error;

/// Diagnostics attached to a failed numerical integration.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureFailure {
    pub routine: &'static str,
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub subintervals: usize,
    pub evaluations: usize,
    pub reason: String,
}

impl std::fmt::Display for QuadratureFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} on [{:e}, {:e}] (estimate {:e}, error {:e} > tolerance {:e}, {} subintervals, {} evaluations)",
            self.routine,
            self.reason,
            self.lower,
            self.upper,
            self.estimate,
            self.abs_error,
            self.tolerance,
            self.subintervals,
            self.evaluations
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: String, detail: String },

    #[error("{routine} failed to converge: {detail}")]
    NoConvergence {
        routine: &'static str,
        detail: String,
    },

    #[error("quadrature failed: {0}")]
    Quadrature(Box<QuadratureFailure>),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("configuration line {line}: {detail}")]
    Config { line: usize, detail: String },
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            detail: detail.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::Quadrature(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
