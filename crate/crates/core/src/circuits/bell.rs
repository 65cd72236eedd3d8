//! Bell-state generation and the IFM Bell-basis measurement.
//!
//! The measurement fans the probe particle over four paths `C, D, E, F`
//! conditioned on the steering particle's rails `A, B`:
//!
//! ```text
//! t = 0      t = T1               t = T2
//! |0̄0̄>  →   |0 1> F           →   |0 1> F
//! |0̄1̄>  →   |0 1> C           →  −|0 1> E
//! |1̄0̄>  →   |1 0> E           →   |1 0> E
//! |1̄1̄>  →   |1 0> D           →  −|1 0> F
//! ```
//!
//! (`|A B>` shown for the steering rails.) The probe's own `|1̄>, |0̄>` rails
//! serve as `D, E`; `C` and `F` are fresh empty paths. At `T2` paths `C, D`
//! are always empty. A probe found on `E` means `Ψ±`, on `F` means `Φ±`;
//! a balanced splitter on `A, B` followed by finding the steering particle on
//! `B` gives the sign bit.

use crate::error::{Result, SimError};
use crate::fock::{DualRailQubit, ModeId, QuantumState};
use crate::gates::{hadamard, ifm_dual_rail, hadamard_bs, IfmGate, Stages};
use crate::measurement::{born_probabilities, postselect, Sampler};

/// Below this squared mass a path counts as empty at `T2`.
const EMPTY_PATH_MASS: f64 = 1e-18;

/// The two classical bits of a Bell measurement:
/// `(0,0) Φ+`, `(0,1) Φ−`, `(1,0) Ψ+`, `(1,1) Ψ−`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BellBits {
    pub x: u8,
    pub z: u8,
}

impl BellBits {
    pub const PHI_PLUS: BellBits = BellBits { x: 0, z: 0 };
    pub const PHI_MINUS: BellBits = BellBits { x: 0, z: 1 };
    pub const PSI_PLUS: BellBits = BellBits { x: 1, z: 0 };
    pub const PSI_MINUS: BellBits = BellBits { x: 1, z: 1 };

    pub const ALL: [BellBits; 4] = [
        Self::PHI_PLUS,
        Self::PHI_MINUS,
        Self::PSI_PLUS,
        Self::PSI_MINUS,
    ];

    pub fn new(x: u8, z: u8) -> Self {
        Self { x: x & 1, z: z & 1 }
    }

    pub fn index(self) -> usize {
        (self.x as usize) << 1 | self.z as usize
    }

    pub fn name(self) -> &'static str {
        match (self.x, self.z) {
            (0, 0) => "phi+",
            (0, _) => "phi-",
            (_, 0) => "psi+",
            _ => "psi-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellOutcome {
    pub x_bit: u8,
    pub z_bit: u8,
    /// The probe was absorbed inside the network (finite stages only).
    pub inconclusive: bool,
    /// Probability of this outcome, conditioned on the pair being intact when
    /// the measurement started.
    pub probability: f64,
}

impl BellOutcome {
    pub fn bits(&self) -> Option<BellBits> {
        (!self.inconclusive).then(|| BellBits::new(self.x_bit, self.z_bit))
    }
}

/// Outcome probabilities of a Bell measurement, indexed by [`BellBits::index`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDistribution {
    pub outcomes: [f64; 4],
    pub inconclusive: f64,
}

impl BellDistribution {
    pub fn probability(&self, bits: BellBits) -> f64 {
        self.outcomes[bits.index()]
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().sum::<f64>() + self.inconclusive
    }
}

/// `H` on the steering qubit, then the IFM gate with it as control: maps
/// `|0̄0̄>` to `(|0̄0̄> + |1̄1̄>)/√2`.
pub fn bell_generate(
    state: &mut QuantumState,
    qubit_plus: DualRailQubit,
    qubit_minus: DualRailQubit,
    stages: Stages,
) -> Result<()> {
    hadamard(state, qubit_plus)?;
    ifm_dual_rail(state, qubit_plus, qubit_minus, stages)
}

/// Mode ids of the six paths of the measurement network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BellPaths {
    pub a: ModeId,
    pub b: ModeId,
    pub c: ModeId,
    pub d: ModeId,
    pub e: ModeId,
    pub f: ModeId,
}

/// The measurement network attached to a register, runnable step by step.
#[derive(Debug, Clone, Copy)]
pub struct BellNetwork {
    paths: BellPaths,
    stages: Stages,
}

impl BellNetwork {
    /// Validate the pair and add the two empty paths `C` and `F`.
    pub fn attach(
        state: &mut QuantumState,
        steer: DualRailQubit,
        probe: DualRailQubit,
        stages: Stages,
    ) -> Result<Self> {
        state.check_dual_rail(steer)?;
        state.check_dual_rail(probe)?;
        let steer_species = state.mode(steer.mode_a)?.species;
        let probe_species = state.mode(probe.mode_a)?.species;
        if !steer_species.annihilates(probe_species) {
            return Err(SimError::SpeciesMismatch(steer_species, probe_species));
        }
        let c = state.add_mode(probe_species, "C", false)?;
        let f = state.add_mode(probe_species, "F", false)?;
        Ok(Self {
            paths: BellPaths {
                a: steer.mode_a,
                b: steer.mode_b,
                c,
                d: probe.mode_a,
                e: probe.mode_b,
                f,
            },
            stages,
        })
    }

    pub fn paths(&self) -> BellPaths {
        self.paths
    }

    fn ifm(&self, state: &mut QuantumState, control: ModeId, a: ModeId, b: ModeId) -> Result<()> {
        IfmGate::new(control, a, b, self.stages)?.apply(state)
    }

    /// `t = 0 → T1`: fan the probe out according to the steering rail `A`.
    pub fn to_t1(&self, state: &mut QuantumState) -> Result<()> {
        let p = self.paths;
        self.ifm(state, p.a, p.f, p.e)?;
        self.ifm(state, p.a, p.c, p.d)
    }

    /// `T1 → T2`: after the `D`/`E` crossing, a second pass steered by `A`
    /// on `(C, E)` and by `B` on `(D, F)`.
    pub fn to_t2(&self, state: &mut QuantumState) -> Result<()> {
        let p = self.paths;
        self.ifm(state, p.a, p.c, p.e)?;
        self.ifm(state, p.b, p.d, p.f)
    }

    /// Check that `C` and `D` are empty at `T2` and project them out.
    pub fn clear_idle_paths(&self, state: &mut QuantumState) -> Result<()> {
        for mode in [self.paths.c, self.paths.d] {
            if state.mass_where(mode, 1)? > EMPTY_PATH_MASS {
                return Err(SimError::PathNotEmpty(mode));
            }
            if state.kept_probability() > 0.0 {
                state.project(mode, 0)?;
            }
        }
        Ok(())
    }

    /// `T2 → T3`: balanced splitter on the steering rails.
    pub fn to_t3(&self, state: &mut QuantumState) -> Result<()> {
        hadamard_bs(state, self.paths.a, self.paths.b)
    }

    /// Absolute probability of each `(x, z)` readout at `T3`.
    pub fn readout(&self, state: &QuantumState) -> Result<[f64; 4]> {
        let dist = born_probabilities(state, &[self.paths.e, self.paths.b])?;
        let mut out = [0.0; 4];
        for bits in BellBits::ALL {
            out[bits.index()] = dist.probability(&[bits.x, bits.z]);
        }
        Ok(out)
    }

    /// Run `t = 0 → T3`.
    pub fn run(&self, state: &mut QuantumState) -> Result<()> {
        self.to_t1(state)?;
        self.to_t2(state)?;
        self.clear_idle_paths(state)?;
        self.to_t3(state)
    }

    /// Drop all six paths once every one of them is definite.
    pub fn release(&self, state: &mut QuantumState) -> Result<()> {
        let p = self.paths;
        for mode in [p.a, p.b, p.c, p.d, p.e, p.f] {
            state.discard_mode(mode)?;
        }
        Ok(())
    }
}

/// Outcome distribution of measuring `(steer, probe)` in the Bell basis,
/// computed on a copy of the state. Includes mass lost before the call.
pub fn bell_distribution(
    state: &QuantumState,
    steer: DualRailQubit,
    probe: DualRailQubit,
    stages: Stages,
) -> Result<BellDistribution> {
    let mut work = state.clone();
    let net = BellNetwork::attach(&mut work, steer, probe, stages)?;
    net.run(&mut work)?;
    Ok(BellDistribution {
        outcomes: net.readout(&work)?,
        inconclusive: work.loss_probability(),
    })
}

/// Measure `(steer, probe)` in the Bell basis with Born-rule sampling.
///
/// The pair's six path modes are removed from the register afterwards. An
/// inconclusive outcome (probe absorbed in the network) collapses the state to
/// the lost branch.
pub fn bell_measure(
    state: &mut QuantumState,
    steer: DualRailQubit,
    probe: DualRailQubit,
    stages: Stages,
    sampler: &mut Sampler,
) -> Result<BellOutcome> {
    let intact = 1.0 - state.loss_probability();
    if intact <= 0.0 || state.kept_probability() <= 0.0 {
        return Err(SimError::AllMassLost);
    }
    let net = BellNetwork::attach(state, steer, probe, stages)?;
    net.run(state)?;
    let probs = net.readout(state)?;

    let u = sampler.uniform() * intact;
    let mut acc = 0.0;
    let mut chosen = None;
    for bits in BellBits::ALL {
        acc += probs[bits.index()];
        if u < acc {
            chosen = Some(bits);
            break;
        }
    }
    let outcome = match chosen {
        Some(bits) => {
            state.project(net.paths.e, bits.x)?;
            state.project(net.paths.b, bits.z)?;
            let p = net.paths;
            for (mode, bit) in [(p.e, bits.x), (p.f, 1 - bits.x), (p.a, 1 - bits.z), (p.b, bits.z)] {
                sampler.note(mode, bit);
            }
            BellOutcome {
                x_bit: bits.x,
                z_bit: bits.z,
                inconclusive: false,
                probability: probs[bits.index()] / intact,
            }
        }
        None => {
            let kept: f64 = probs.iter().sum();
            state.mark_lost();
            BellOutcome {
                x_bit: 0,
                z_bit: 0,
                inconclusive: true,
                probability: (intact - kept).max(0.0) / intact,
            }
        }
    };
    net.release(state)?;
    Ok(outcome)
}

/// Force the readout `bits`; returns its probability conditioned on the pair
/// being intact at the start.
pub fn bell_measure_forced(
    state: &mut QuantumState,
    steer: DualRailQubit,
    probe: DualRailQubit,
    stages: Stages,
    bits: BellBits,
) -> Result<f64> {
    let intact = 1.0 - state.loss_probability();
    let net = BellNetwork::attach(state, steer, probe, stages)?;
    net.run(state)?;
    let p = net.readout(state)?[bits.index()];
    postselect(state, net.paths.e, bits.x)?;
    postselect(state, net.paths.b, bits.z)?;
    net.release(state)?;
    Ok(p / intact)
}
