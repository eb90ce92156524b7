use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("row {row} has sum {sum}, expected {expected}")]
    RowSum { row: usize, sum: usize, expected: usize },

    #[error("column {col} has sum {sum}, expected {expected}")]
    ColumnSum { col: usize, sum: usize, expected: usize },

    #[error("row {row} is not a strictly increasing list of indices below {n}")]
    MalformedRow { row: usize, n: usize },

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("{what} = {value} exceeds the cap {cap}")]
    TooLarge { what: &'static str, value: u128, cap: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate parameter regime: {0}")]
    Degenerate(String),

    #[error("the zero vector has no class")]
    ZeroVector,

    #[error("vector is not unit: norm = {0}")]
    NotUnit(f64),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("class mismatch: vector classifies as {actual}, claimed {claimed}")]
    ClassMismatch { claimed: String, actual: String },

    #[error("iterative solver did not converge after {iters} iterations (best residual {residual:e})")]
    NotConverged { iters: usize, residual: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
