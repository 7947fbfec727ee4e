use thiserror::Error;

/// Errors produced anywhere in the crate.
///
/// Row and index fields hold 0-based indices; messages print them 1-based so
/// they match the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("non-finite entry at row {}, column {}", .row + 1, .col + 1)]
    NonFinite { row: usize, col: usize },
    #[error("selection is empty")]
    EmptySelection,
    #[error("index {} out of range for {n} rows", .index + 1)]
    IndexOutOfRange { index: usize, n: usize },
    #[error("index {} appears more than once in the selection", .index + 1)]
    DuplicateIndex { index: usize },
    #[error("row {} has near-zero norm", .row + 1)]
    ZeroRow { row: usize },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("selection is rank deficient")]
    RankDeficient,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("sensor count L={l} outside the admissible range [{min}, {max}]")]
    SensorCount { l: usize, min: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("C({n},{l}) subsets exceed the enumeration guard of {guard}")]
    EnumerationGuard { n: usize, l: usize, guard: u64 },
    #[error("MSE bound is vacuous: d = {d} does not exceed delta = {delta}")]
    VacuousBound { d: f64, delta: f64 },
    #[error("conditional variance of row {} is not positive", .row + 1)]
    Conditioning { row: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
