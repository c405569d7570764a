use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("matrix is not unitary (max |UU^* - I| = {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("eigenvalue iteration failed to converge")]
    NoConvergence,
    #[error("coefficient {index} lies outside the closed matrix unit ball")]
    OutsideBall { index: usize },
    #[error("moment sequence must start with the identity (deviation {deviation:e})")]
    BadNormalization { deviation: f64 },
    #[error("support exhausted: block Gram matrix of degree {degree} is singular")]
    SupportExhausted { degree: usize },
    #[error("boundary Verblunsky coefficient at index {index}: defect matrix is singular")]
    BoundaryCoefficient { index: usize },
    #[error("numerical conditioning failure at index {index}: {detail}")]
    Conditioning { index: usize, detail: String },
    #[error("numerically singular sample; draw again")]
    SingularSample,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("postcondition violated: {0}")]
    Postcondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
