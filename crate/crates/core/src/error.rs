use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("subsystem index {0} is outside {{1,2,3}}")]
    InvalidSubsystem(usize),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("state is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("GHZ weights violate the simplex constraint (sum {0})")]
    SimplexViolation(f64),

    #[error("GHZ weights are not canonical (lambda0+ must dominate lambda0- and every lambda_j)")]
    NonCanonical,

    #[error("vector {0:?} is not a unit vector")]
    NotUnitVector([f64; 3]),

    #[error("rank {0} outside 1..=8")]
    InvalidRank(usize),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
