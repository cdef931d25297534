use thiserror::Error;

/// Errors raised by grid construction, state preparation and the transforms.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, parameter or argument combination.
    #[error("configuration error: {0}")]
    Config(String),
    /// A truncation guard (grid coverage or Fock cutoff) was violated.
    #[error("truncation error: {0}")]
    Truncation(String),
    /// An input failed a structural check (kernel constraint, density matrix).
    #[error("validation error: {0}")]
    Validation(String),
    /// The input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed file contents.
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
