use thiserror::Error;

/// Errors raised by the linear-algebra, state and machine layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |M - M^H| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("wrong state dimension: expected {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("Gram matrices differ at ({i}, {j}) by {deviation:e}")]
    GramMismatch { i: usize, j: usize, deviation: f64 },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("state set is empty")]
    EmptySet,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "overlap between states {i} and {j} is zero; the probe phase criterion does not apply"
    )]
    ZeroOverlap { i: usize, j: usize },

    #[error("invalid probe Gram matrix: {0}")]
    InvalidProbeGram(String),

    #[error("invalid probe: {0}")]
    InvalidProbe(String),

    #[error("efficiencies must lie in (0, 1], got {0}")]
    InvalidEfficiency(f64),

    #[error("states are linearly dependent (min Gram eigenvalue {0:e})")]
    LinearlyDependent(f64),

    #[error("the first two states are linearly dependent")]
    LinearlyDependentPair,

    #[error("efficiencies infeasible: residual matrix has min eigenvalue {0:e}")]
    InfeasibleGamma(f64),

    #[error("success probability {0:e} too small to postselect")]
    ZeroSuccess(f64),

    #[error("degenerate Gram determinant (|a| = {0:e})")]
    DegenerateDeterminant(f64),

    #[error("no feasible efficiency point found")]
    NoFeasiblePoint,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
