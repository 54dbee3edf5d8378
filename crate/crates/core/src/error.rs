use thiserror::Error;

/// Errors raised by the geometry, sampling and estimation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {0:?} is not strictly inside the domain")]
    NotInterior(Vec<f64>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sampler truncated after {steps} steps without reaching the boundary")]
    Truncated { steps: u64 },

    #[error("boundary data '{name}' returned {value}, exceeding its declared bound {bound}")]
    BoundViolation { name: String, value: f64, bound: f64 },

    #[error("quadrature tail bound {bound:.3e} exceeds tolerance {tolerance:.3e}; increase the truncation radius")]
    TailTooLarge { bound: f64, tolerance: f64 },

    #[error("tabulated boundary data: {0}")]
    Tabulated(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
