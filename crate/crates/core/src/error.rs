use thiserror::Error;

/// Crate-wide error type. Variants map onto the failure modes of the
/// individual pipeline stages; the CLI folds them into exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is singular")]
    Singular,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("rank {found} below required {required}")]
    Rank { required: usize, found: usize },

    #[error("point is not a member of the polyhedron")]
    NotAMember,

    #[error("no generic vector separates the edge directions: {0}")]
    Genericity(String),

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("enumeration budget exceeded: needs {needed} points, budget {budget}")]
    Budget { needed: String, budget: u64 },

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
