//! Preparation of the four-qubit resource state
//! `|χ> = ½[(|00> + |11>)|00> + (|01> + |10>)|11>]`.
//!
//! Chain: `H` on qubit 1, IFM 1→2, IFM 2→3, `H` on qubits 1..3, IFM 3→4,
//! starting from `|0̄0̄0̄0̄>` with alternating species.

use crate::error::Result;
use crate::fock::{DualRailQubit, QuantumState, Species};
use crate::gates::{hadamard, ifm_dual_rail, Stages};

/// Four freshly added qubits and the stage count used for their IFM gates.
#[derive(Debug, Clone, Copy)]
pub struct ChiPreparation {
    pub qubits: [DualRailQubit; 4],
    pub stages: Stages,
}

impl ChiPreparation {
    /// Append four `|0̄>` qubits of species `first, partner, first, partner`.
    pub fn append(state: &mut QuantumState, first: Species, stages: Stages) -> Result<Self> {
        let second = first.partner();
        let qubits = [
            state.add_qubit(first, "chi1", false)?,
            state.add_qubit(second, "chi2", false)?,
            state.add_qubit(first, "chi3", false)?,
            state.add_qubit(second, "chi4", false)?,
        ];
        Ok(Self { qubits, stages })
    }

    pub fn hadamard_first(&self, state: &mut QuantumState) -> Result<()> {
        hadamard(state, self.qubits[0])
    }

    pub fn ifm1(&self, state: &mut QuantumState) -> Result<()> {
        ifm_dual_rail(state, self.qubits[0], self.qubits[1], self.stages)
    }

    pub fn ifm2(&self, state: &mut QuantumState) -> Result<()> {
        ifm_dual_rail(state, self.qubits[1], self.qubits[2], self.stages)
    }

    pub fn hadamard_three(&self, state: &mut QuantumState) -> Result<()> {
        for q in &self.qubits[..3] {
            hadamard(state, *q)?;
        }
        Ok(())
    }

    pub fn ifm3(&self, state: &mut QuantumState) -> Result<()> {
        ifm_dual_rail(state, self.qubits[2], self.qubits[3], self.stages)
    }

    pub fn run(&self, state: &mut QuantumState) -> Result<()> {
        self.hadamard_first(state)?;
        self.ifm1(state)?;
        self.ifm2(state)?;
        self.hadamard_three(state)?;
        self.ifm3(state)
    }
}

/// Add a `|χ>` register to `state` and return its qubits.
pub fn append_chi(
    state: &mut QuantumState,
    first: Species,
    stages: Stages,
) -> Result<[DualRailQubit; 4]> {
    let prep = ChiPreparation::append(state, first, stages)?;
    prep.run(state)?;
    Ok(prep.qubits)
}

/// Fresh `|χ>` register with positron, electron, positron, electron qubits.
pub fn chi_generate(stages: Stages) -> Result<(QuantumState, [DualRailQubit; 4])> {
    let mut state = QuantumState::vacuum();
    let qubits = append_chi(&mut state, Species::Positron, stages)?;
    Ok((state, qubits))
}
