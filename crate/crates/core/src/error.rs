use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has no rows or no columns")]
    EmptyMatrix,

    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow { row: usize, found: usize, expected: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum}, not 1")]
    RowSumError { row: usize, sum: f64 },

    #[error("probability vector sums to {sum}, not 1")]
    NotNormalized { sum: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("size overflow: {0}")]
    SizeOverflow(String),

    #[error("size limit exceeded: {what} needs {needed}, cap is {cap}")]
    SizeLimit { what: &'static str, needed: u128, cap: u128 },

    #[error("channel is not doubly stochastic")]
    NotDoublyStochastic,

    #[error("channel is not circulant")]
    NotCirculant,

    #[error("channel is not symmetric")]
    NotSymmetric,

    #[error("unsupported size {0}; only 3x3 and 4x4 are handled")]
    UnsupportedSize(usize),

    #[error("no row/column permutation makes the channel circulant")]
    NoCirculantForm,

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("no convergence after {iterations} iterations (gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("iteration limit {0} reached")]
    IterationLimit(usize),

    #[error("columns are linearly dependent")]
    RankDeficient,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cache file: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
