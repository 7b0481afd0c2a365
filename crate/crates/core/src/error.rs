use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("zero vector has no primitive representative")]
    ZeroVector,

    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("polytope is not full-dimensional")]
    NotFullDimensional,

    #[error("polytope is not a simplex")]
    NotSimplex,

    #[error("point {0:?} is not a vertex")]
    NotAVertex(Vec<i64>),

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid family spec: {0}")]
    InvalidFamily(String),

    #[error("integer overflow in lattice coordinates")]
    Overflow,

    /// A bounded search hit its budget without deciding the question.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    /// A search that is guaranteed to succeed on valid input came up empty.
    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
