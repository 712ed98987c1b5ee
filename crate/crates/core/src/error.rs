use thiserror::Error;

use crate::lp::LpStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measurement vector")]
    InvalidMeasurement,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero vector")]
    ZeroVector,

    #[error("sparsity {s} out of range for dimension {n}")]
    SparsityOutOfRange { s: f64, n: usize },

    #[error("degenerate sign pattern")]
    DegenerateSignPattern,

    #[error("normalization not tight (residual {residual:e})")]
    NormalizationNotTight { residual: f64 },

    #[error("linear program not solved to optimality: {0:?}")]
    NotOptimal(LpStatus),

    #[error("singular basis during refactorization")]
    SingularBasis,

    #[error("oracle guard violated: {0}")]
    OracleGuard(String),

    #[error("not in K")]
    NotInK,

    #[error("empty feasible cone sample")]
    EmptyFeasibleConeSample,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
