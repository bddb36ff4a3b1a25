use thiserror::Error;

/// Errors raised by the decision-diagram engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DdError {
    #[error("non-finite amplitude ({re}, {im})")]
    NonFinite { re: f64, im: f64 },
    #[error("level {level} out of range for {num_qubits} qubits")]
    LevelOutOfRange { level: usize, num_qubits: usize },
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("basis index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: u64, num_qubits: usize },
    #[error("vector length {0} is not a power of two (or is smaller than 2)")]
    NotPowerOfTwo(usize),
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },
    #[error("dense read-back limited to {limit} qubits, got {num_qubits}")]
    DenseLimit { limit: usize, num_qubits: usize },
    #[error("release of an edge whose node has no outstanding references")]
    ReleaseUnderflow,
    #[error("control and target qubits overlap on qubit {0}")]
    ControlTargetOverlap(usize),
    #[error("duplicate qubit {0} in operand list")]
    DuplicateQubit(usize),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("gate matrix must be {expected}x{expected}, got {got} entries")]
    BadGateShape { expected: usize, got: usize },
    #[error("circuit contains a measurement; {0}")]
    MeasurementPresent(&'static str),
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("invalid Kraus channel: {0}")]
    InvalidChannel(String),
    #[error("invalid stimulus count {requested} for {num_qubits} qubits")]
    BadStimulusCount { requested: u64, num_qubits: usize },
    #[error("shot count must be at least 1")]
    NoShots,
}

pub type Result<T> = std::result::Result<T, DdError>;
