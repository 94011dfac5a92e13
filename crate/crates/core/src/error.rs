use thiserror::Error;

/// Errors raised while loading vectors, factoring Gram matrices or building bases.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("vector set is rank deficient: smallest Gram eigenvalue {smallest:e} <= tolerance {tolerance:e}")]
    RankDeficient { smallest: f64, tolerance: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("S does not orthonormalize the set: ||S'MS - I||_F = {residual:e} > {tolerance:e}")]
    NotOrthonormalizing { residual: f64, tolerance: f64 },

    #[error("S is singular")]
    SingularS,

    #[error("triangular factor is numerically singular")]
    SingularT,

    #[error("bases do not share a source set: {0}")]
    BasisMismatch(String),

    #[error("matrix is not unitary: ||U'U - I||_F = {residual:e} > {tolerance:e}")]
    NotUnitary { residual: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
