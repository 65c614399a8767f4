use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate references qubit {0} more than once")]
    DuplicateQubit(usize),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("noise events need a random source; use apply_circuit")]
    NoiseWithoutRng,

    #[error("gate {0} has no inverse")]
    NotInvertible(&'static str),

    #[error("two-qubit gate error rate {0} outside [0, 0.8)")]
    ErrorRateOutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("projection has zero probability: state fully discarded")]
    FullyDiscarded,

    #[error("objective returned a non-finite value at {0:?}")]
    NonFinite(Vec<f64>),

    #[error("exhaustive search over {n} variables exceeds the cap of {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("compressed-space Hamiltonian still degenerate after {0} redraws")]
    DegenerateSpectrum(usize),

    #[error("compressor training failed at stage {stage}: {msg}")]
    Training { stage: usize, msg: String },

    #[error("no gate form available: {0}")]
    GateFormUnavailable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_qubit(index: usize, n_qubits: usize) -> Result<()> {
    if index >= n_qubits {
        Err(Error::QubitOutOfRange { index, n_qubits })
    } else {
        Ok(())
    }
}
