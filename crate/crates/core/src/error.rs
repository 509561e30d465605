use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sequence must have at least one entry")]
    EmptySequence,

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("parameter `{name}` = {value} is out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("index {index} exceeds available length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid index ordering: {0}")]
    IndexOrdering(String),

    #[error("dense materialization of dimension {dim} exceeds cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("grid has {points} points, at least {min} required")]
    GridTooCoarse { points: usize, min: usize },

    #[error("grid point {n} exceeds sequence length {len} / 16")]
    GridTooLong { n: usize, len: usize },

    #[error("|eta| is not non-increasing at index {index}")]
    NotMonotone { index: usize },

    #[error("input function has zero norm")]
    ZeroFunction,

    #[error("weight at index {index} is not positive")]
    NonPositiveWeight { index: usize },

    #[error("entry at index {index} is negative")]
    NegativeEntry { index: usize },
}
