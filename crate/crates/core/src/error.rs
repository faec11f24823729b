use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent {0}: expected a value in [1, inf]")]
    InvalidExponent(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("vector is not on the unit sphere (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("point lies on the zero set of factor {index}")]
    ZeroFactor { index: usize },

    #[error("point is off the torus at coordinate {index} (modulus {modulus})")]
    OffTorus { index: usize, modulus: f64 },

    #[error("resource guard: {0}")]
    ResourceLimit(String),

    #[error("quadrature did not reach tolerance {tolerance:e} (error estimate {estimate:e})")]
    QuadratureNonConvergence { tolerance: f64, estimate: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
