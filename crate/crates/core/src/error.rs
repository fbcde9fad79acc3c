use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("model error: {0}")]
    Model(String),

    /// Norm drift of the fixed-step integrator exceeded its bound.
    #[error("accuracy error: norm drift {drift:.3e} at t = {time:.6e} exceeds {limit:.1e}")]
    Accuracy { drift: f64, time: f64, limit: f64 },

    /// Population reached the top Fock levels of the truncated space.
    #[error(
        "truncation error: top-level population {population:.3e} exceeds {limit:.1e}; \
         retry with shape at least {suggested_vib}x{suggested_cav}"
    )]
    Truncation {
        population: f64,
        limit: f64,
        suggested_vib: usize,
        suggested_cav: usize,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
