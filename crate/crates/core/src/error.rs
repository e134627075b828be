use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("generator count {m} exceeds the dense cap of {cap}")]
    TooManyGenerators { m: usize, cap: usize },

    #[error("element is not invertible (smallest pivot {pivot:e})")]
    NotInvertible { pivot: f64 },

    #[error("element is not in the quadratic cone")]
    NotInCone,

    #[error("components do not share a common slice")]
    NotInSlice,

    #[error("{0} is not a square root of -1")]
    NotImaginaryUnit(String),

    #[error("sampling failed after {0} attempts")]
    Sampling(usize),

    #[error("representation formula: {0}")]
    Representation(String),

    #[error("basis completion is not a module basis: {0}")]
    Basis(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("criterion undefined: {0}")]
    Criterion(String),

    #[error("gauge error: {0}")]
    Gauge(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
