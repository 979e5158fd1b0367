use thiserror::Error;

use crate::lattice::GroupElement;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("observable does not belong to this system: {0}")]
    BackendMismatch(&'static str),

    #[error("state is not faithful (Gram matrix eigenvalue {min_eigenvalue:e})")]
    NotFaithful {
        min_eigenvalue: f64,
        /// Row-major entries of an operator spanning the (approximate) null space.
        null_vector: Vec<[f64; 2]>,
    },

    #[error("state is not tracial")]
    NotTracial,

    #[error("observable is not positive (minimum eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("empty return set on scan window; enlarge the scan")]
    EmptyReturnSet,

    #[error("relative density witness failed at {0}")]
    NotRelativelyDense(GroupElement),

    #[error("numerical invariant violated: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
