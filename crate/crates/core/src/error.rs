use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: max |h - h^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("negative eigenvalue {min_eigenvalue:e}")]
    NegativeEigenvalue { min_eigenvalue: f64 },
    #[error("non-finite matrix entry at index {index}")]
    NonFinite { index: usize },
    #[error("state is not normalized: squared norm {norm_sq}")]
    Unnormalized { norm_sq: f64 },
    #[error("{name} = {value} is out of range {allowed}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },
    #[error("spread G_d = {value:e} is degenerate (must exceed {threshold:e})")]
    DegenerateSpread { value: f64, threshold: f64 },
    #[error("solver failed: {0}")]
    Solver(String),
}
