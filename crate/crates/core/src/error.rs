use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dense representation of {qubits} qubits exceeds the limit of {limit}")]
    DenseLimitExceeded { qubits: usize, limit: usize },

    #[error("site {site} is outside a cluster of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("site pair ({i}, {j}) must satisfy i < j")]
    SiteOrder { i: usize, j: usize },

    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("two-qubit gate on non-adjacent qubits {a} and {b}")]
    NonAdjacent { a: usize, b: usize },

    #[error("invalid geometry `{0}`")]
    InvalidGeometry(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
