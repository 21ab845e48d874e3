use thiserror::Error;

/// Errors raised while building, simulating, or exporting circuits.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} is out of range for a {total}-qubit circuit")]
    QubitOutOfRange { qubit: usize, total: usize },
    #[error("qubit {0} appears more than once in a gate")]
    DuplicateQubit(usize),
    #[error("{gate} takes {expected}, got {controls} control(s) and {targets} target(s)")]
    Arity {
        gate: &'static str,
        expected: &'static str,
        controls: usize,
        targets: usize,
    },
    #[error("rotation angle {0} is not finite")]
    NonFiniteAngle(f64),
    #[error("control pattern has {pattern} entries but the gate has {controls} controls")]
    PatternLength { pattern: usize, controls: usize },
    #[error("amplitude {0} is outside [0, 1)")]
    AmplitudeOutOfRange(f64),
    #[error("invalid amplitude spec: {0}")]
    InvalidSpec(String),
    #[error("invalid precision: {0}")]
    InvalidPrecision(String),
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("state has {found} qubits but the circuit needs {expected}")]
    StateSizeMismatch { expected: usize, found: usize },
    #[error("unsupported qubit count {count} (supported: 1..={max})")]
    UnsupportedQubitCount { count: usize, max: usize },
    #[error("lowering needs {needed} clean ancilla(s) but only {available} are available")]
    InsufficientAncillas { needed: usize, available: usize },
    #[error("invalid coefficient {0}: LCU coefficients must be positive and finite")]
    InvalidCoefficient(f64),
    #[error("success probability is zero")]
    ZeroProbability,
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("qasm line {line}: {message}")]
    Qasm { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
