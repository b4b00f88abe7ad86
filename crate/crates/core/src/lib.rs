//! Dense state-vector simulation of encoded CNOT and Toffoli gates on the
//! three-qubit phase-flip code and the seven-qubit Steane code, with
//! single-fault injection and recovery.

pub mod circuit;
pub mod codes;
pub mod error;
pub mod gates;
pub mod logical;
pub mod pauli;
pub mod recovery;
pub mod statevec;

pub use circuit::{Block, BlockLayout, Checkpoint, Circuit, Op, Step};
pub use codes::{code_registry, CodeName, CodeSpec, Syndrome};
pub use error::{Error, Result};
pub use gates::{build, v_gate, GateKind, QubyteControl, VGate, VVariant};
pub use logical::{ComplexMatrix, LogicalAction, LogicalBasis};
pub use pauli::{Pauli, PauliString, PhysicalPauli};
pub use recovery::{PauliError, RecoveryOutcome, RecoveryTable};
pub use statevec::{GateMatrix, StateVector};
