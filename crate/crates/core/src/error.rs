use thiserror::Error;

/// Errors raised by the measure, transform and family machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integral diverges: {0}")]
    DivergentIntegral(String),

    #[error("quadrature failed to reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },

    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: String },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("Stieltjes extrapolation unstable at x = {x} (spread {spread:e})")]
    ExtrapolationUnstable { x: f64, spread: f64 },

    #[error("generating measure has no mean, the variance function is undefined")]
    MeanUndefined,

    #[error("not a pseudo-variance function: {0}")]
    InvalidPv(String),

    #[error("invalid law specification: {0}")]
    InvalidSpec(String),

    #[error("convolution power {alpha} not allowed: {reason}")]
    AlphaOutOfRange { alpha: f64, reason: String },

    #[error("pseudo-variance leaves the algebraic class: {0}")]
    UnsupportedShape(String),

    #[error("invalid affine map: {0}")]
    InvalidMap(String),
}

impl Error {
    pub(crate) fn domain(value: f64, domain: impl Into<String>) -> Self {
        Error::Domain {
            value,
            domain: domain.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
