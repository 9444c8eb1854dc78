use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid basis label: {0}")]
    InvalidLabel(String),

    #[error("operands live on different spaces")]
    SpaceMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("block is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("operator is not hermitian (max deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("phase {0} outside (0, 2pi)")]
    InvalidTheta(f64),

    #[error("truncation leak: SQUID {squid} has population {population:.3e} in |3> with the cavity at its top Fock level")]
    TruncationLeak { squid: usize, population: f64 },

    #[error("role conflict: {0}")]
    RoleConflict(String),

    #[error("constraint violated for SQUIDs {squids:?}: {message}")]
    ConstraintViolation { message: String, squids: Vec<usize> },

    #[error("grid refinement did not converge (relative drift {drift:.3e})")]
    NonConvergence { drift: f64 },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
