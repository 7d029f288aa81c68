use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("block capacity exceeded: {requested} qubits (limit {limit})")]
    BlockCapacity { requested: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state vector is not normalized: |norm^2 - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("matrix is not unitary: max |U!U - I| entry = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("qubit index {index} out of range for {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("duplicate qubit index {index} in target list")]
    DuplicateTarget { index: usize },

    #[error("gate arity {arity} does not match {targets} target qubits")]
    ArityMismatch { arity: usize, targets: usize },

    #[error("measurement basis does not span the target subsystem: {detail}")]
    IncompleteBasis { detail: String },

    #[error("basis vectors are not orthonormal: {detail}")]
    NotOrthonormal { detail: String },

    #[error("channel condition violated: {0}")]
    ConditionViolation(String),

    #[error("unsupported channel family for this operation: {0}")]
    UnsupportedFamily(String),

    #[error("invalid channel spec: {0}")]
    InvalidChannel(String),

    #[error("invalid session configuration: {0}")]
    InvalidConfig(String),

    #[error("message length mismatch: expected {expected} bits, got {got}")]
    MessageLength { expected: usize, got: usize },

    #[error("decoy check mode mismatch: expected {expected}, got {got}")]
    CheckModeMismatch { expected: String, got: String },

    #[error("decoy pairing is not a perfect matching: {0}")]
    BadPairing(String),

    #[error("pairing disclosure before authenticated acknowledgment")]
    AcknowledgmentMissing,

    #[error("disclosure not available: {0}")]
    DisclosureMissing(String),

    #[error("transcript incomplete: {0}")]
    IncompleteTranscript(String),

    #[error("transcript parse error at line {line}: {detail}")]
    ParseError { line: usize, detail: String },

    #[error("transcript version mismatch: expected {expected}, got {got}")]
    VersionMismatch { expected: String, got: String },

    #[error("division by zero in efficiency ratio: {0}")]
    ZeroDenominator(String),

    #[error("unknown qubit id {0}")]
    UnknownQubit(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
