use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Incompatible shapes, layouts or subspace tags.
    #[error("structural mismatch: {0}")]
    Structure(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("rotation vector {0:?} is not prime")]
    NotPrime(Vec<i64>),

    #[error("period {period} outside admissible interval (0, {delta}); choose T < {delta}")]
    PeriodOutsideInterval { period: f64, delta: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("trajectory escaped |z_I| > {limit} at t = {time}")]
    Divergence { limit: f64, time: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
