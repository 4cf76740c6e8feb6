use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("divergent integral: Re(lambda) = {re} is not below the convergence abscissa {abscissa}")]
    Divergent { re: f64, abscissa: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("nesting depth {depth} exceeds the brute-force limit of {max}")]
    CostGuard { depth: usize, max: usize },

    #[error("unsupported ordering: {0}")]
    UnsupportedOrdering(String),

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate:e}, error {error:e}")]
    Quadrature { a: f64, b: f64, estimate: f64, error: f64 },

    #[error(
        "inverse Laplace transform did not converge at t = {t}: value {value:e}, error {error:e} \
         (about {achieved_digits:.1} digits)"
    )]
    IltNonConvergence { t: f64, value: f64, error: f64, achieved_digits: f64 },

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("mixed poles {0} and {1} in one term sum")]
    MixedPoles(f64, f64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
