use thiserror::Error;

/// Errors raised by the numerical core, the algebra layer and the checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: Vec<usize>, found: Vec<usize> },

    #[error("invalid algebra shape {0:?}")]
    InvalidShape(Vec<usize>),

    #[error("{function} is undefined at eigenvalue {value:e}")]
    DomainViolation { function: String, value: f64 },

    #[error("matrix is not strictly positive (min eigenvalue {min_eigenvalue:e}, threshold {threshold:e})")]
    SingularB { min_eigenvalue: f64, threshold: f64 },

    #[error("normalizer {what} is not strictly positive (min eigenvalue {min_eigenvalue:e})")]
    SingularNormalizer { what: String, min_eigenvalue: f64 },

    #[error("block {block} has trace {trace:e} below the density floor {floor:e}")]
    DegenerateBlock { block: usize, trace: f64, floor: f64 },

    #[error("map kind {found} not accepted here (expected {expected})")]
    WrongKind { expected: String, found: String },

    #[error("map {0} does not have a commutative range")]
    NonCommutativeRange(String),

    #[error("functions {f} and {g} are not same-monotone on the spectrum")]
    NotSameMonotone { f: String, g: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
