use thiserror::Error;

/// Errors produced by the channel, entropy and capacity routines.
#[derive(Debug, Error)]
pub enum QcapError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("subsystem dimensions multiply to {expected} but the matrix has {actual} rows")]
    Factorization { expected: usize, actual: usize },

    #[error("matrix is not Hermitian: max |h - h^dag| entry is {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("matrix data contains a non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("Kraus list is empty")]
    EmptyKraus,

    #[error("Kraus operator {index} is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    KrausShape {
        index: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("completeness violated: ||sum A^dag A - I||_F = {residual:e}")]
    NotTracePreserving { residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("spectrum has eigenvalue {0:e} below the positivity tolerance")]
    NegativeSpectrum(f64),

    #[error("Choi marginal deviates from I/d by {0:e}")]
    ChoiMarginal(f64),

    #[error("probability vector is not on the simplex: {0}")]
    Simplex(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("dimension guard: {0}")]
    Guard(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QcapError>;
