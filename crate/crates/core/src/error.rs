use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
///
/// Domain violations are always reported explicitly; no routine returns NaN
/// in place of an error.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },

    #[error("matrix is not invertible (minimum eigenvalue {min_eigenvalue:.3e})")]
    Singular { min_eigenvalue: f64 },

    #[error("{function} is undefined at {x}")]
    Domain { function: String, x: f64 },

    #[error("{function} is undefined at eigenvalue ratio mu_{k}/lambda_{j} = {ratio}")]
    RatioDomain {
        function: String,
        j: usize,
        k: usize,
        ratio: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
