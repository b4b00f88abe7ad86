use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("unsupported qubit count {0} (supported: 1..={max})", max = crate::statevec::MAX_QUBITS)]
    QubitCount(usize),

    #[error("bitstring {bits:?} does not describe {expected} qubits")]
    Bitstring { bits: String, expected: usize },

    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("qubit {0} is both a control and a target")]
    ControlTargetOverlap(usize),

    #[error("gate of arity {arity} applied to {targets} targets")]
    ArityMismatch { arity: usize, targets: usize },

    #[error("gate {name} is not unitary (max deviation {deviation:e})")]
    NonUnitary { name: String, deviation: f64 },

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state norm drifted to {norm} (tolerance {tolerance:e})")]
    NormDrift { norm: f64, tolerance: f64 },

    #[error("measurement outcome {outcome:+} of {observable} has zero probability")]
    ZeroProbabilityBranch { observable: String, outcome: i8 },

    #[error("malformed pauli string {0:?}")]
    MalformedPauli(String),

    #[error("unknown code {0:?} (expected three_bit or seven_bit)")]
    UnknownCode(String),

    #[error("logical amplitudes are not normalized (|alpha|^2 + |beta|^2 = {0})")]
    NotNormalized(f64),

    #[error("syndrome {syndrome} remains after correction")]
    ResidualSyndrome { syndrome: String },

    #[error("no correction known for syndrome {0}")]
    UnknownSyndrome(String),

    #[error("column {column} leaks {leakage:e} of its weight out of the code space")]
    Leakage { column: usize, leakage: f64 },

    #[error("invalid block layout: {0}")]
    Layout(String),

    #[error("{gate} requires the {expected} code, got {got}")]
    IncompatibleCode {
        gate: String,
        expected: String,
        got: String,
    },

    #[error("fault {fault} yields a payload-dependent syndrome")]
    NondeterministicSyndrome { fault: String },

    #[error("faults {first} and {second} share syndrome {syndrome} but need incompatible corrections")]
    AmbiguousSyndrome {
        syndrome: String,
        first: String,
        second: String,
    },

    #[error("fault {fault} cannot be undone by any correction in the search group")]
    Uncorrectable { fault: String },

    #[error("internal check failed: {0}")]
    Internal(String),
}
