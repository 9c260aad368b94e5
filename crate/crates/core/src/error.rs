use thiserror::Error;

use crate::linalg::BipartiteDims;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |M - M^dagger| = {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("eigenvalue {value:e} is below the clamp tolerance -{tol:e}")]
    NegativeEigenvalue { value: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {lhs:?} vs {rhs:?}")]
    ShapeMismatch {
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    #[error("matrix or vector contains a non-finite entry")]
    NonFinite,

    #[error("invalid subsystem dimension {0}; every subsystem needs dimension >= 1")]
    InvalidDimension(usize),

    #[error("vector is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("parameter {name} = {value} is out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("operation requires equal subsystem dimensions, got {0}")]
    NotSquareBipartition(BipartiteDims),

    #[error("rank {rank} is out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("operation requires a 2x2 (two-qubit) system, got {0}")]
    NotTwoQubit(BipartiteDims),

    #[error("operation requires min(dA, dB) >= 2, got {0}")]
    DegenerateDimension(BipartiteDims),

    #[error("matrix is not unitary: max |V^dagger V - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix columns are not orthonormal: max |T^dagger T - I| = {deviation:e}")]
    NotIsometry { deviation: f64 },

    #[error("isometry has {found} columns but the state has rank {expected}")]
    RankMismatch { expected: usize, found: usize },

    #[error("invalid optimizer configuration: {0}")]
    ConfigInvalid(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
