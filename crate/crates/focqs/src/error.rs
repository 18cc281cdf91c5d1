//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("register size {0} outside supported range [{1}, {2}]")]
    RegisterSize(usize, usize, usize),
    #[error("qubit index {index} out of range for register of {n} qubits")]
    QubitIndex { index: usize, n: usize },
    #[error("duplicate qubit {0} in Pauli string")]
    DuplicateQubit(usize),
    #[error("operator is not diagonal")]
    NotDiagonal,
    #[error("dense realization limited to {max} qubits, got {n}")]
    DenseTooLarge { n: usize, max: usize },
    #[error("expectation value has imaginary residue {0:e}; observable is not Hermitian")]
    NonHermitian(f64),
    #[error("register size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("invalid evolution scheme: {0}")]
    InvalidScheme(String),
    #[error("could not sample a connected graph after {0} attempts")]
    DisconnectedGraph(usize),
    #[error("ground-state energy is zero; approximation ratio undefined")]
    ZeroGroundEnergy,
    #[error("schedule of length {got} shorter than requested depth {need}")]
    ScheduleTooShort { got: usize, need: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
