//! CNOT by gate teleportation through `|χ>`, and the circuits built on it.
//!
//! The control input is Bell-measured against `χ4` and the target input
//! against `χ1`; the CNOT then appears on `(χ3, χ2)` up to Pauli corrections
//! chosen from a [`CorrectionTable`] by the four measured bits.

use std::sync::Once;

use num_complex::Complex64;

use super::bell::{bell_measure, bell_measure_forced, BellBits, BellOutcome};
use super::chi::append_chi;
use super::prepare_dual_rail;
use crate::error::{Result, SimError};
use crate::fock::{DualRailQubit, QuantumState, Species};
use crate::gates::{pauli_x, pauli_z, Stages};
use crate::measurement::Sampler;
use crate::oracle::{self, DenseState, Matrix2};

/// Single-qubit correction. `XZ` is the product `X·Z` (apply `Z` first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Z,
    XZ,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Z, Pauli::XZ];

    pub fn apply(self, state: &mut QuantumState, qubit: DualRailQubit) -> Result<()> {
        match self {
            Pauli::I => Ok(()),
            Pauli::X => pauli_x(state, qubit),
            Pauli::Z => pauli_z(state, qubit),
            Pauli::XZ => {
                pauli_z(state, qubit)?;
                pauli_x(state, qubit)
            }
        }
    }

    pub fn matrix(self) -> Matrix2 {
        let c = |x: f64| Complex64::new(x, 0.0);
        match self {
            Pauli::I => [[c(1.0), c(0.0)], [c(0.0), c(1.0)]],
            Pauli::X => oracle::x_matrix(),
            Pauli::Z => oracle::z_matrix(),
            Pauli::XZ => [[c(0.0), c(-1.0)], [c(1.0), c(0.0)]],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Z => "Z",
            Pauli::XZ => "XZ",
        }
    }
}

/// Branch index `x1 z1 x2 z2` read as a 4-bit number.
pub fn branch_index(b1: BellBits, b2: BellBits) -> u8 {
    b1.x << 3 | b1.z << 2 | b2.x << 1 | b2.z
}

pub fn branch_bits(index: u8) -> (BellBits, BellBits) {
    (
        BellBits::new(index >> 3 & 1, index >> 2 & 1),
        BellBits::new(index >> 1 & 1, index & 1),
    )
}

/// Corrections `(on control output, on target output)` per measurement branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrectionTable {
    entries: [[Pauli; 2]; 16],
}

use Pauli::{I, X, XZ, Z};

/// Found by [`derive_correction_table`] for the default wiring; equivalent to
/// control ← `X^x1 Z^(z1⊕z2)`, target ← `X^(x1⊕x2) Z^z2`.
const STANDARD_ENTRIES: [[Pauli; 2]; 16] = [
    [I, I],
    [Z, Z],
    [I, X],
    [Z, XZ],
    [Z, I],
    [I, Z],
    [Z, X],
    [I, XZ],
    [X, X],
    [XZ, XZ],
    [X, I],
    [XZ, Z],
    [XZ, X],
    [X, XZ],
    [XZ, I],
    [X, Z],
];

static VERIFY_STANDARD: Once = Once::new();

impl CorrectionTable {
    pub const fn from_entries(entries: [[Pauli; 2]; 16]) -> Self {
        Self { entries }
    }

    /// The persisted table. Debug builds re-check it against the oracle once.
    pub fn standard() -> Self {
        let table = Self::from_entries(STANDARD_ENTRIES);
        if cfg!(debug_assertions) {
            VERIFY_STANDARD.call_once(|| {
                if let Err(e) = verify_correction_table(&table, GcWiring::default()) {
                    panic!("persisted correction table failed verification: {e}");
                }
            });
        }
        table
    }

    pub fn get(&self, b1: BellBits, b2: BellBits) -> (Pauli, Pauli) {
        let [c, t] = self.entries[branch_index(b1, b2) as usize];
        (c, t)
    }

    pub fn set(&mut self, branch: u8, control: Pauli, target: Pauli) {
        self.entries[branch as usize & 15] = [control, target];
    }

    pub fn entries(&self) -> &[[Pauli; 2]; 16] {
        &self.entries
    }
}

/// Which `χ` slots (0-based) pair with the inputs and carry the outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GcWiring {
    pub control_partner: usize,
    pub target_partner: usize,
    pub control_out: usize,
    pub target_out: usize,
}

impl Default for GcWiring {
    fn default() -> Self {
        Self {
            control_partner: 3,
            target_partner: 0,
            control_out: 2,
            target_out: 1,
        }
    }
}

/// How the two Bell measurements obtain their results.
pub enum GcReadout<'a> {
    Sample(&'a mut Sampler),
    /// Post-select the given `(B1, B2)` outcomes.
    Force([BellBits; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcCnotOutcome {
    pub b1: BellOutcome,
    pub b2: Option<BellOutcome>,
    /// `(control, target)` outputs; `None` if a measurement was inconclusive.
    pub outputs: Option<(DualRailQubit, DualRailQubit)>,
}

impl GcCnotOutcome {
    pub fn branch(&self) -> Option<u8> {
        Some(branch_index(self.b1.bits()?, self.b2?.bits()?))
    }

    pub fn inconclusive(&self) -> bool {
        self.outputs.is_none()
    }

    /// Joint probability of the two readouts.
    pub fn probability(&self) -> f64 {
        self.b1.probability * self.b2.map_or(1.0, |b| b.probability)
    }
}

fn measure(
    state: &mut QuantumState,
    steer: DualRailQubit,
    probe: DualRailQubit,
    stages: Stages,
    readout: &mut GcReadout<'_>,
    which: usize,
) -> Result<BellOutcome> {
    match readout {
        GcReadout::Sample(sampler) => bell_measure(state, steer, probe, stages, sampler),
        GcReadout::Force(bits) => {
            let b = bits[which];
            let probability = bell_measure_forced(state, steer, probe, stages, b)?;
            Ok(BellOutcome {
                x_bit: b.x,
                z_bit: b.z,
                inconclusive: false,
                probability,
            })
        }
    }
}

/// CNOT from `control` onto `target` by teleportation through a fresh `|χ>`.
///
/// The two inputs must be an annihilating pair (electron and positron, either
/// way round). The inputs' modes are consumed; the returned outputs are new
/// qubits of the same species as the corresponding inputs.
pub fn gc_cnot(
    state: &mut QuantumState,
    control: DualRailQubit,
    target: DualRailQubit,
    readout: GcReadout<'_>,
    table: &CorrectionTable,
    stages: Stages,
) -> Result<GcCnotOutcome> {
    gc_cnot_wired(state, control, target, readout, table, stages, GcWiring::default())
}

pub fn gc_cnot_wired(
    state: &mut QuantumState,
    control: DualRailQubit,
    target: DualRailQubit,
    mut readout: GcReadout<'_>,
    table: &CorrectionTable,
    stages: Stages,
    wiring: GcWiring,
) -> Result<GcCnotOutcome> {
    state.check_dual_rail(control)?;
    state.check_dual_rail(target)?;
    let cs = state.mode(control.mode_a)?.species;
    let ts = state.mode(target.mode_a)?.species;
    if !cs.annihilates(ts) {
        return Err(SimError::SpeciesMismatch(cs, ts));
    }
    let chi = append_chi(state, cs, stages)?;

    let b1 = measure(state, control, chi[wiring.control_partner], stages, &mut readout, 0)?;
    if b1.inconclusive {
        return Ok(GcCnotOutcome {
            b1,
            b2: None,
            outputs: None,
        });
    }
    let b2 = measure(state, target, chi[wiring.target_partner], stages, &mut readout, 1)?;
    if b2.inconclusive {
        return Ok(GcCnotOutcome {
            b1,
            b2: Some(b2),
            outputs: None,
        });
    }
    let control_out = chi[wiring.control_out];
    let target_out = chi[wiring.target_out];
    let (pc, pt) = table.get(BellBits::new(b1.x_bit, b1.z_bit), BellBits::new(b2.x_bit, b2.z_bit));
    pc.apply(state, control_out)?;
    pt.apply(state, target_out)?;
    Ok(GcCnotOutcome {
        b1,
        b2: Some(b2),
        outputs: Some((control_out, target_out)),
    })
}

/// `|Σ_k <e_k|v_k>|² / (4 Σ_k ‖v_k‖²)`: one exactly when `v_k = λ e_k` for a
/// single `λ`.
fn process_fidelity(columns: &[DenseState], expected: &[DenseState]) -> f64 {
    let overlap: Complex64 = columns
        .iter()
        .zip(expected)
        .map(|(v, e)| oracle::inner(e, v).unwrap_or_default())
        .sum();
    let weight: f64 = columns.iter().map(DenseState::norm_sqr).sum();
    if weight == 0.0 {
        return 0.0;
    }
    overlap.norm_sqr() / (expected.len() as f64 * weight)
}

/// The unnormalized output column of one forced branch for basis input `k`
/// (control bit `k >> 1`, target bit `k & 1`).
fn branch_column(
    branch: u8,
    k: usize,
    table: &CorrectionTable,
    wiring: GcWiring,
) -> Result<DenseState> {
    let mut amps = vec![Complex64::default(); 4];
    amps[k] = Complex64::new(1.0, 0.0);
    let (mut state, q) = prepare_dual_rail(&[Species::Positron, Species::Electron], &amps)?;
    let (b1, b2) = branch_bits(branch);
    let out = gc_cnot_wired(
        &mut state,
        q[0],
        q[1],
        GcReadout::Force([b1, b2]),
        table,
        Stages::Ideal,
        wiring,
    )?;
    let (c, t) = out.outputs.ok_or(SimError::AllMassLost)?;
    let dense = oracle::embed(&state, &[c, t])?;
    Ok(dense.scaled(out.probability().sqrt()))
}

fn cnot_columns() -> Result<Vec<DenseState>> {
    (0..4)
        .map(|k| oracle::dense_cnot(&DenseState::basis(2, k), 0, 1))
        .collect()
}

/// Search all 16 Pauli pairs per branch for the one that turns the
/// teleported map into the oracle CNOT.
pub fn derive_correction_table(wiring: GcWiring) -> Result<CorrectionTable> {
    let identity = CorrectionTable::from_entries([[Pauli::I, Pauli::I]; 16]);
    let expected = cnot_columns()?;
    let mut table = identity;
    for branch in 0..16u8 {
        let raw = (0..4)
            .map(|k| branch_column(branch, k, &identity, wiring))
            .collect::<Result<Vec<_>>>()?;
        let mut found = Vec::new();
        for pc in Pauli::ALL {
            for pt in Pauli::ALL {
                let corrected = raw
                    .iter()
                    .map(|v| v.apply_single(0, &pc.matrix())?.apply_single(1, &pt.matrix()))
                    .collect::<Result<Vec<_>>>()?;
                if process_fidelity(&corrected, &expected) >= 1.0 - 1e-10 {
                    found.push((pc, pt));
                }
            }
        }
        match found.as_slice() {
            [(pc, pt)] => table.set(branch, *pc, *pt),
            _ => return Err(SimError::NoConsistentCorrection(branch)),
        }
    }
    Ok(table)
}

/// Run every branch on every basis input with `table` applied and compare
/// the resulting map to the oracle CNOT.
pub fn verify_correction_table(table: &CorrectionTable, wiring: GcWiring) -> Result<()> {
    let expected = cnot_columns()?;
    for branch in 0..16u8 {
        let columns = (0..4)
            .map(|k| branch_column(branch, k, table, wiring))
            .collect::<Result<Vec<_>>>()?;
        let fidelity = process_fidelity(&columns, &expected);
        if fidelity < 1.0 - 1e-10 {
            return Err(SimError::BadCorrectionTable { branch, fidelity });
        }
    }
    Ok(())
}

const ZERO_MASS: f64 = 1e-18;

/// Move `source`'s state into `ancilla` (which must hold `|0̄>` and be of the
/// partner species) with two teleported CNOTs: source→ancilla, then back.
///
/// Returns `(emptied, filled)`: the source-species qubit now in `|0̄>` and the
/// ancilla-species qubit now holding the state. `None` if a measurement was
/// inconclusive.
pub fn swap_via_cnot(
    state: &mut QuantumState,
    source: DualRailQubit,
    ancilla: DualRailQubit,
    sampler: &mut Sampler,
    table: &CorrectionTable,
    stages: Stages,
) -> Result<Option<(DualRailQubit, DualRailQubit)>> {
    state.check_dual_rail(ancilla)?;
    if state.mass_where(ancilla.mode_a, 1)? > ZERO_MASS {
        return Err(SimError::AncillaNotZero);
    }
    let first = gc_cnot(state, source, ancilla, GcReadout::Sample(sampler), table, stages)?;
    let Some((s1, a1)) = first.outputs else {
        return Ok(None);
    };
    let second = gc_cnot(state, a1, s1, GcReadout::Sample(sampler), table, stages)?;
    Ok(second.outputs.map(|(filled, emptied)| (emptied, filled)))
}

/// Measure `qubit` and flip it if it reads `|1̄>`. Ideal swaps already leave
/// their emptied qubit in `|0̄>`; finite ones only approximately.
fn reset_to_zero(state: &mut QuantumState, qubit: DualRailQubit, sampler: &mut Sampler) -> Result<()> {
    if sampler.detect(state, qubit.mode_a)? == 1 {
        pauli_x(state, qubit)?;
    }
    Ok(())
}

/// CNOT between two electrons: park the target in a positron ancilla, apply
/// the teleported CNOT, and move it back.
pub fn cnot_between_electrons(
    state: &mut QuantumState,
    control: DualRailQubit,
    target: DualRailQubit,
    sampler: &mut Sampler,
    table: &CorrectionTable,
    stages: Stages,
) -> Result<Option<(DualRailQubit, DualRailQubit)>> {
    for q in [control, target] {
        let s = state.mode(q.mode_a)?.species;
        if s != Species::Electron {
            return Err(SimError::SpeciesMismatch(s, Species::Electron));
        }
    }
    let parking = state.add_qubit(Species::Positron, "park", false)?;
    let Some((spare, parked)) = swap_via_cnot(state, target, parking, sampler, table, stages)?
    else {
        return Ok(None);
    };
    let cnot = gc_cnot(state, control, parked, GcReadout::Sample(sampler), table, stages)?;
    let Some((control_out, parked_out)) = cnot.outputs else {
        return Ok(None);
    };
    reset_to_zero(state, spare, sampler)?;
    let Some((freed, target_out)) = swap_via_cnot(state, parked_out, spare, sampler, table, stages)?
    else {
        return Ok(None);
    };
    reset_to_zero(state, freed, sampler)?;
    state.discard_mode(freed.mode_a)?;
    state.discard_mode(freed.mode_b)?;
    Ok(Some((control_out, target_out)))
}
