//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed its construction invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An argument fell outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A dataset or configuration failed validation.
    #[error("invalid data: {0}")]
    Data(String),

    /// A single observation made the likelihood unevaluable.
    #[error("observation {index}: {message}")]
    Observation { index: usize, message: String },

    /// Numerical quadrature failed to reach its tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// A CSV input violated the expected schema. `row` is the 1-based file line.
    #[error("row {row}: {message}")]
    Schema { row: usize, message: String },

    /// The Metropolis sampler hit a diagnostic failure.
    #[error("mcmc: {0}")]
    Mcmc(String),

    /// Sample generation could not produce a usable replicate.
    #[error("sample generation: {0}")]
    Generation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
