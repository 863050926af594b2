use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sparsity {s} for a {n}-bit index space")]
    InvalidSparsity { n: u32, s: usize },

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("n = {n} exceeds the dense limit of {limit} bits")]
    Capacity { n: u32, limit: u32 },

    #[error("cannot draw {requested} distinct quadruplets from {n} bits ({available} available)")]
    Exhausted {
        n: u32,
        requested: usize,
        available: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("hamiltonian is not a nearest-neighbour chain: term on qubits {0:?}")]
    NotChain(Vec<u32>),

    #[error("selected column {0} has no matching pattern")]
    DegenerateColumn(u64),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
