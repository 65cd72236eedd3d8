//! Sparse Fock-space simulation of interaction-free measurement gates on
//! dual-rail qubits, with a dense state-vector oracle for cross-checks.
//!
//! The layers build on each other:
//!
//! * [`fock`]: modes, occupation configurations and the sparse state.
//! * [`gates`]: beam splitters, Paulis and the IFM gate (ideal or `N` stages).
//! * [`measurement`]: Born-rule detection with reproducible per-shot streams.
//! * [`circuits`]: Bell generation and measurement, `|χ>`, teleported CNOT.
//! * [`oracle`]: textbook qubit simulator used to check everything above.

pub mod circuits;
pub mod error;
pub mod fock;
pub mod gates;
pub mod measurement;
pub mod oracle;

pub use error::{Result, SimError};
pub use fock::{DualRailQubit, ModeDescriptor, ModeId, OccupationConfig, QuantumState, Species};
pub use gates::{IfmGate, Stages};
pub use measurement::{Sampler, ShotRecord, ShotRng};
