use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by densities, quadratures, means and the drivers built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("degenerate density: {0}")]
    DegenerateDensity(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("non-finite integrand value {value} at quadrature node {node}")]
    Integration { node: usize, value: Complex64 },

    #[error("field vanishes (|g| = {modulus:e}) near {at}")]
    ZeroCrossing { at: Complex64, modulus: f64 },

    #[error("only {successes} radii succeeded, at least {required} are needed")]
    InsufficientData { successes: usize, required: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
