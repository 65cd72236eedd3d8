//! Dual-rail circuits assembled from the gate layer.

pub mod bell;
pub mod chi;
pub mod teleport;

use num_complex::Complex64;

pub use bell::{
    bell_distribution, bell_generate, bell_measure, bell_measure_forced, BellBits,
    BellDistribution, BellNetwork, BellOutcome, BellPaths,
};
pub use chi::{append_chi, chi_generate, ChiPreparation};
pub use teleport::{
    branch_bits, branch_index, cnot_between_electrons, derive_correction_table, gc_cnot,
    gc_cnot_wired, swap_via_cnot, verify_correction_table, CorrectionTable, GcCnotOutcome,
    GcReadout, GcWiring, Pauli,
};

use crate::error::{Result, SimError};
use crate::fock::{DualRailQubit, ModeDescriptor, OccupationConfig, QuantumState, Species};

/// Fresh register holding `Σ amps[i] |i>` on one dual-rail qubit per entry of
/// `species`. Qubit 0 is the most significant bit of `i`; a set bit puts the
/// particle on `mode_a`.
pub fn prepare_dual_rail(
    species: &[Species],
    amps: &[Complex64],
) -> Result<(QuantumState, Vec<DualRailQubit>)> {
    let n = species.len();
    if amps.len() != 1 << n {
        return Err(SimError::DimensionMismatch(amps.len(), 1 << n));
    }
    let mut modes = Vec::with_capacity(2 * n);
    let mut qubits = Vec::with_capacity(n);
    for (k, &s) in species.iter().enumerate() {
        let a = 2 * k as u32;
        modes.push(ModeDescriptor::new(a, s, format!("q{k}.1")));
        modes.push(ModeDescriptor::new(a + 1, s, format!("q{k}.0")));
        qubits.push(DualRailQubit::new(modes[2 * k].id, modes[2 * k + 1].id));
    }
    let mut terms = Vec::new();
    for (i, &amp) in amps.iter().enumerate() {
        if amp == Complex64::default() {
            continue;
        }
        let occupancy: Vec<u8> = (0..n)
            .flat_map(|k| {
                let bit = (i >> (n - 1 - k) & 1) as u8;
                [bit, 1 - bit]
            })
            .collect();
        terms.push((OccupationConfig::new(&occupancy)?, amp));
    }
    Ok((QuantumState::from_terms(modes, &terms)?, qubits))
}
