use thiserror::Error;

use crate::fock::{ModeId, Species};

/// Errors raised by state construction, gates, measurement and the circuits.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("mode id {0} registered twice")]
    DuplicateMode(ModeId),
    #[error("unknown mode id {0}")]
    UnknownMode(ModeId),
    #[error("occupation config has {got} entries, register has {expected} modes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("occupancy {0} is not 0 or 1")]
    MalformedOccupancy(u8),
    #[error("register is limited to {max} modes")]
    TooManyModes { max: usize },
    #[error("mode {0} passed twice where distinct modes are required")]
    IdenticalModes(ModeId),
    #[error("mixer is not unitary (deviation {deviation:e})")]
    NonUnitary { deviation: f64 },
    #[error("species {control:?} and {target:?} do not annihilate")]
    NonAnnihilating { control: Species, target: Species },
    #[error("mode map is not a bijection over the register")]
    NotBijective,
    #[error("outcome {bit} on mode {mode} has zero probability")]
    ZeroProbability { mode: ModeId, bit: u8 },
    #[error("no surviving amplitude left to detect")]
    AllMassLost,
    #[error("mode {0} is still in superposition and cannot be discarded")]
    ModeNotDefinite(ModeId),
    #[error("state is not dual-rail valid on qubit ({a}, {b})")]
    NotDualRail { a: ModeId, b: ModeId },
    #[error("finite IFM gate needs at least one stage")]
    NoStages,
    #[error("IFM gate modes must be three distinct modes")]
    OverlappingModes,
    #[error("ancilla qubit is not in the |0> state")]
    AncillaNotZero,
    #[error("qubits of species {0:?} and {1:?} cannot be paired here")]
    SpeciesMismatch(Species, Species),
    #[error("state carries loss probability {0:e}; expected a lossless state")]
    Lossy(f64),
    #[error("dense state norm deviates from 1 by {0:e}")]
    NotNormalized(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("qubit index {index} out of range for {qubits} qubits")]
    QubitOutOfRange { index: usize, qubits: usize },
    #[error("path mode {0} still holds amplitude after the Bell network")]
    PathNotEmpty(ModeId),
    #[error("no consistent correction for branch {0:04b}")]
    NoConsistentCorrection(u8),
    #[error("correction table fails on branch {branch:04b} (fidelity {fidelity})")]
    BadCorrectionTable { branch: u8, fidelity: f64 },
}

pub type Result<T> = std::result::Result<T, SimError>;
