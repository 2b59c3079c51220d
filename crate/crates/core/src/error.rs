use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix data has {len} entries, expected {rows}x{cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("{op}: incompatible shapes {lhs:?} and {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max asymmetry {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("eigensolver handles square matrices of order 2, 3 or 4, got {rows}x{cols}")]
    UnsupportedDimension { rows: usize, cols: usize },

    #[error("Jacobi iteration stopped after {sweeps} sweeps with off-diagonal norm {residual:e}")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("eigendecomposition reconstruction error {error:e} exceeds {tol:e}")]
    Reconstruction { error: f64, tol: f64 },

    #[error("expected a 4x4 two-qubit matrix, got {rows}x{cols}")]
    NotTwoQubit { rows: usize, cols: usize },

    #[error("trace {trace} deviates from 1 by more than {tol:e}")]
    TraceDeviation { trace: f64, tol: f64 },

    #[error("eigenvalue {value:e} is below the positivity floor {floor:e}")]
    NegativeEigenvalue { value: f64, floor: f64 },

    #[error("parameter {name} = {value} is outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("Kraus operator {index} of `{channel}` is {rows}x{cols}, expected 2x2")]
    KrausShape {
        channel: String,
        index: usize,
        rows: usize,
        cols: usize,
    },

    #[error("Kraus set `{channel}` is incomplete (max |sum E^dag E - I| = {defect:e})")]
    IncompleteKraus { channel: String, defect: f64 },

    #[error("state is not X-shaped (largest off-X entry {magnitude:e})")]
    NotXShaped { magnitude: f64 },

    #[error("direction must have unit norm, got {norm}")]
    NonUnitDirection { norm: f64 },

    #[error("{what} needs at least {min}, got {got}")]
    TooFewSamples {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("unknown scenario `{0}` (expected one of dephasing-werner, gad-q1, gad-q23, depolarizing, dephasing+gad)")]
    UnknownScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
