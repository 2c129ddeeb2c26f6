use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("qubit index {0} out of range (expected 1..=3)")]
    QubitIndex(usize),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("invalid trace {0}")]
    InvalidTrace(f64),

    #[error("state is not normalized (norm or trace {0})")]
    NotNormalized(f64),

    #[error("marginal is numerically singular (smallest eigenvalue {0:.3e})")]
    NearSingularMarginal(f64),

    #[error("operator is not unit-determinant (|det - 1| = {0:.3e})")]
    NotUnitDeterminant(f64),

    #[error("coordinates ({x}, {y}) lie outside the physical triangle")]
    UnphysicalCoords { x: f64, y: f64 },

    #[error("matrix is not GHZ-symmetric (forbidden entry {0:.3e})")]
    NotGhzSymmetric(f64),

    #[error("parameter {name} = {value} out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("no intersection with the GHZ/W line: {0}")]
    NoIntersection(String),

    #[error("states coincide; no error estimate needed")]
    StatesCoincide,

    #[error("state is not supported on the given subspace (leak {0:.3e})")]
    UnsupportedState(f64),

    #[error("missing Pauli labels: {}", .0.join(", "))]
    MissingLabels(Vec<String>),

    #[error("expectation value for {label} is out of range: {value}")]
    ValueOutOfRange { label: String, value: f64 },

    #[error("invalid Pauli label {0:?}")]
    InvalidLabel(String),

    #[error("duplicate Pauli label {0}")]
    DuplicateLabel(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}
