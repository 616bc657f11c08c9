use thiserror::Error;

/// Errors raised by the geometric primitives, optimizers and check suites.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tangent vector of norm {norm} exceeds the injectivity radius {limit}")]
    InjectivityRadius { norm: f64, limit: f64 },

    #[error("tangent vector is not based at the given point")]
    BaseMismatch,

    #[error("logarithm is singular: points are (nearly) antipodal, distance {distance} vs cut locus {limit}")]
    SingularLog { distance: f64, limit: f64 },

    #[error("point drifted off the manifold by {drift:e}")]
    OffManifold { drift: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite state at step {step}: {what}")]
    NonFinite { step: usize, what: String },

    #[error("monitor unsupported: {0}")]
    UnsupportedMonitor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
