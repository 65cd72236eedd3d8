//! Shot-by-shot execution of a configured circuit.
//!
//! Each shot runs on its own copy of the input with its own random stream
//! `(seed, shot)`, so shots parallelize freely and the aggregated report is
//! identical for any thread count.

use std::collections::BTreeMap;

use ifm_core::circuits::{
    bell_distribution, bell_generate, bell_measure, chi_generate, cnot_between_electrons, gc_cnot,
    prepare_dual_rail, swap_via_cnot, BellBits, CorrectionTable, GcReadout,
};
use ifm_core::measurement::born_probabilities;
use ifm_core::oracle::{self, DenseState};
use ifm_core::{
    DualRailQubit, IfmGate, ModeDescriptor, ModeId, OccupationConfig, QuantumState, Sampler,
    Species, Stages,
};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{Circuit, Mode, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::input::{parse_ifm_input, parse_input};
use crate::report::{rows_from, sig12, tally, Report, Summary, INCONCLUSIVE, LOST};

const PE: [Species; 2] = [Species::Positron, Species::Electron];

/// What one shot observed.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotResult {
    pub outcome: String,
    /// Born probability of every possible outcome for this shot.
    pub born: Vec<(String, f64)>,
    /// Surviving probability just before the final readout.
    pub kept: f64,
    pub fidelity: Option<f64>,
    pub drift: f64,
}

/// Parsed input of a scenario.
#[derive(Debug, Clone)]
pub enum Prepared {
    Qubits(Vec<Complex64>),
    Occupancy([u8; 3]),
    Nothing,
}

fn qubit_count(circuit: Circuit) -> usize {
    match circuit {
        Circuit::Swap => 1,
        Circuit::ChiGen | Circuit::IfmGate => 0,
        _ => 2,
    }
}

pub fn prepare(config: &ScenarioConfig) -> Result<Prepared> {
    match config.circuit {
        Circuit::IfmGate => Ok(Prepared::Occupancy(parse_ifm_input(
            &config.input,
            config.object == crate::config::Object::Present,
        )?)),
        Circuit::ChiGen => match config.input.trim() {
            "" | "none" | "0000" => Ok(Prepared::Nothing),
            other => Err(CliError::Config(format!(
                "chi_gen starts from |0000>; input {other:?} not accepted"
            ))),
        },
        c => Ok(Prepared::Qubits(parse_input(&config.input, qubit_count(c))?)),
    }
}

fn bits_label(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

/// Sample lost-versus-kept, then detect `modes` one after another.
fn read_out(
    state: &mut QuantumState,
    modes: &[ModeId],
    sampler: &mut Sampler,
    fidelity: Option<f64>,
) -> Result<ShotResult> {
    let loss = state.loss_probability();
    let dist = born_probabilities(state, modes)?;
    let mut born: Vec<(String, f64)> = dist
        .outcomes
        .iter()
        .map(|(bits, p)| (bits_label(bits), *p))
        .collect();
    if loss > 0.0 {
        born.push((LOST.to_string(), loss));
    }
    let kept = state.kept_probability();
    let outcome = if sampler.uniform() < loss || kept <= 0.0 {
        LOST.to_string()
    } else {
        let bits = modes
            .iter()
            .map(|&m| sampler.detect(state, m))
            .collect::<std::result::Result<Vec<u8>, _>>()?;
        bits_label(&bits)
    };
    Ok(ShotResult {
        outcome,
        born,
        kept,
        fidelity,
        drift: state.max_conservation_drift(),
    })
}

fn inconclusive(state: &QuantumState) -> ShotResult {
    ShotResult {
        outcome: INCONCLUSIVE.to_string(),
        born: vec![(INCONCLUSIVE.to_string(), 1.0)],
        kept: 0.0,
        fidelity: None,
        drift: state.max_conservation_drift(),
    }
}

fn rails(qubits: &[DualRailQubit]) -> Vec<ModeId> {
    qubits.iter().map(|q| q.mode_a).collect()
}

fn fidelity_with(state: &QuantumState, qubits: &[DualRailQubit], expected: &DenseState) -> Result<f64> {
    let got = oracle::embed_conditional(state, qubits)?;
    Ok(oracle::fidelity(&got, expected)?)
}

fn dense(amps: &[Complex64]) -> Result<DenseState> {
    Ok(DenseState::new(amps.to_vec())?)
}

/// `H` on qubit 0, then the IFM map `00→00, 01→−01, 10→11, 11→absorbed`,
/// renormalized; `None` if everything is absorbed.
fn bell_gen_oracle(amps: &[Complex64]) -> Result<Option<DenseState>> {
    let h = oracle::dense_h(&dense(amps)?, 0)?;
    let a = h.amplitudes();
    let mapped = [a[0], -a[1], Complex64::default(), a[2]];
    let norm = mapped.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Ok(None);
    }
    Ok(Some(DenseState::new(mapped.iter().map(|x| x / norm).collect())?))
}

fn chi_oracle() -> DenseState {
    let mut amps = vec![Complex64::default(); 16];
    for i in [0b0000, 0b1100, 0b0111, 0b1011] {
        amps[i] = Complex64::new(0.5, 0.0);
    }
    DenseState::new(amps).expect("unit norm")
}

fn ifm_register(occ: [u8; 3]) -> Result<QuantumState> {
    Ok(QuantumState::new_register(
        vec![
            ModeDescriptor::new(0, Species::Object, "x"),
            ModeDescriptor::new(1, Species::Photon, "a"),
            ModeDescriptor::new(2, Species::Photon, "b"),
        ],
        &OccupationConfig::new(&occ)?,
    )?)
}

pub fn run_shot(
    config: &ScenarioConfig,
    prepared: &Prepared,
    table: &CorrectionTable,
    shot: u64,
) -> Result<ShotResult> {
    let stages: Stages = config.stage_setting();
    let mut sampler = Sampler::new(config.seed, shot);
    let amps = match prepared {
        Prepared::Qubits(a) => a.as_slice(),
        _ => &[],
    };
    match (config.circuit, prepared) {
        (Circuit::IfmGate, Prepared::Occupancy(occ)) => {
            let mut s = ifm_register(*occ)?;
            let (x, a, b) = (ModeId(0), ModeId(1), ModeId(2));
            IfmGate::new(x, a, b, stages)?.apply(&mut s)?;
            read_out(&mut s, &[x, a, b], &mut sampler, None)
        }
        (Circuit::ChiGen, _) => {
            let (mut s, q) = chi_generate(stages)?;
            let f = fidelity_with(&s, &q, &chi_oracle())?;
            read_out(&mut s, &rails(&q), &mut sampler, Some(f))
        }
        (Circuit::BellGen, _) => {
            let (mut s, q) = prepare_dual_rail(&PE, amps)?;
            bell_generate(&mut s, q[0], q[1], stages)?;
            let f = match bell_gen_oracle(amps)? {
                Some(e) if s.kept_probability() > 0.0 => Some(fidelity_with(&s, &q, &e)?),
                _ => None,
            };
            read_out(&mut s, &rails(&q), &mut sampler, f)
        }
        (Circuit::BellMeasure, _) => {
            let (mut s, q) = prepare_dual_rail(&PE, amps)?;
            let dist = bell_distribution(&s, q[0], q[1], stages)?;
            let mut born: Vec<(String, f64)> = BellBits::ALL
                .iter()
                .map(|b| (bits_label(&[b.x, b.z]), dist.probability(*b)))
                .collect();
            born.push((INCONCLUSIVE.to_string(), dist.inconclusive));
            let out = bell_measure(&mut s, q[0], q[1], stages, &mut sampler)?;
            let outcome = match out.bits() {
                Some(b) => bits_label(&[b.x, b.z]),
                None => INCONCLUSIVE.to_string(),
            };
            Ok(ShotResult {
                outcome,
                born,
                kept: if out.inconclusive { 0.0 } else { 1.0 },
                fidelity: None,
                drift: s.max_conservation_drift(),
            })
        }
        (Circuit::GcCnot, _) => {
            let (mut s, q) = prepare_dual_rail(&PE, amps)?;
            let expected = oracle::dense_cnot(&dense(amps)?, 0, 1)?;
            let out = gc_cnot(&mut s, q[0], q[1], GcReadout::Sample(&mut sampler), table, stages)?;
            match out.outputs {
                None => Ok(inconclusive(&s)),
                Some((c, t)) => {
                    let f = fidelity_with(&s, &[c, t], &expected)?;
                    read_out(&mut s, &[c.mode_a, t.mode_a], &mut sampler, Some(f))
                }
            }
        }
        (Circuit::Swap, _) => {
            let (mut s, q) = prepare_dual_rail(&[Species::Electron], amps)?;
            let ancilla = s.add_qubit(Species::Positron, "ancilla", false)?;
            let expected = DenseState::basis(1, 0).tensor(&dense(amps)?);
            match swap_via_cnot(&mut s, q[0], ancilla, &mut sampler, table, stages)? {
                None => Ok(inconclusive(&s)),
                Some((emptied, filled)) => {
                    let f = fidelity_with(&s, &[emptied, filled], &expected)?;
                    read_out(&mut s, &[emptied.mode_a, filled.mode_a], &mut sampler, Some(f))
                }
            }
        }
        (Circuit::EeCnot, _) => {
            let (mut s, q) = prepare_dual_rail(&[Species::Electron, Species::Electron], amps)?;
            let expected = oracle::dense_cnot(&dense(amps)?, 0, 1)?;
            match cnot_between_electrons(&mut s, q[0], q[1], &mut sampler, table, stages)? {
                None => Ok(inconclusive(&s)),
                Some((c, t)) => {
                    let f = fidelity_with(&s, &[c, t], &expected)?;
                    read_out(&mut s, &[c.mode_a, t.mode_a], &mut sampler, Some(f))
                }
            }
        }
        (Circuit::IfmGate, _) => unreachable!("prepare yields occupancy for ifm_gate"),
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Ideal => "ideal",
        Mode::Finite => "finite",
    }
}

/// Run every shot and aggregate the report.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Report> {
    config.validate()?;
    let prepared = prepare(config)?;
    let table = CorrectionTable::standard();
    let shots: Vec<ShotResult> = (0..config.shots)
        .into_par_iter()
        .map(|shot| run_shot(config, &prepared, &table, shot))
        .collect::<Result<_>>()?;
    Ok(aggregate(config, &shots))
}

pub fn aggregate(config: &ScenarioConfig, shots: &[ShotResult]) -> Report {
    let n = shots.len() as u64;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut sums: BTreeMap<String, f64> = BTreeMap::new();
    let mut kept = 0.0;
    let mut drift = 0.0f64;
    let mut fidelities = Vec::new();
    for r in shots {
        *counts.entry(r.outcome.clone()).or_default() += 1;
        for (label, p) in &r.born {
            *sums.entry(label.clone()).or_default() += p;
        }
        kept += r.kept;
        drift = drift.max(r.drift);
        fidelities.extend(r.fidelity);
    }
    let rows = rows_from(&counts, &sums, n);
    let t = tally(&rows);
    let kept_probability = sig12(kept / n as f64);
    let fidelity_mean = (!fidelities.is_empty())
        .then(|| sig12(fidelities.iter().sum::<f64>() / fidelities.len() as f64));
    let fidelity_min = fidelities.iter().copied().reduce(f64::min).map(sig12);
    Report {
        summary: Summary {
            circuit: config.circuit.name().to_string(),
            mode: mode_name(config.mode).to_string(),
            stages: config.stages,
            input: config.input.clone(),
            seed: config.seed,
            shots: t.shots,
            conclusive_shots: t.conclusive_shots,
            inconclusive_frequency: t.inconclusive_frequency,
            lost_frequency: t.lost_frequency,
            kept_probability,
            loss_probability: sig12(1.0 - kept / n as f64),
            p_success: (config.circuit == Circuit::IfmGate).then_some(kept_probability),
            fidelity_mean,
            fidelity_min,
            max_conservation_drift: sig12(drift),
        },
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Format, Object};

    fn config(circuit: Circuit, input: &str, shots: u64) -> ScenarioConfig {
        ScenarioConfig {
            circuit,
            mode: Mode::Ideal,
            stages: None,
            input: input.to_string(),
            object: Object::Present,
            shots,
            seed: 11,
            format: Format::Csv,
            out: None,
        }
    }

    fn row<'a>(r: &'a Report, label: &str) -> Option<&'a crate::report::Row> {
        r.rows.iter().find(|row| row.outcome == label)
    }

    #[test]
    fn phi_plus_reads_zero_zero() {
        let r = run_scenario(&config(Circuit::BellMeasure, "phi+", 50)).unwrap();
        assert_eq!(row(&r, "00").unwrap().frequency, 1.0);
        assert_eq!(row(&r, "00").unwrap().probability, 1.0);
        r.check_consistency().unwrap();
    }

    #[test]
    fn gc_cnot_flips_target() {
        let r = run_scenario(&config(Circuit::GcCnot, "11", 40)).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(row(&r, "10").unwrap().count, 40);
        assert_eq!(r.summary.fidelity_min, Some(1.0));
    }

    #[test]
    fn finite_ifm_two_stages_quarter_success() {
        let mut c = config(Circuit::IfmGate, "01", 10);
        c.mode = Mode::Finite;
        c.stages = Some(2);
        let r = run_scenario(&c).unwrap();
        assert_eq!(r.summary.p_success, Some(0.25));
        assert_eq!(row(&r, LOST).unwrap().probability, 0.75);
    }

    #[test]
    fn swap_and_electron_cnot_match_oracle() {
        let r = run_scenario(&config(Circuit::Swap, "0.6,0.8i", 20)).unwrap();
        assert!(r.summary.fidelity_min.unwrap() >= 1.0 - 1e-10);
        assert!(r.rows.iter().all(|row| row.outcome.starts_with('0')));
        let r = run_scenario(&config(Circuit::EeCnot, "+1", 20)).unwrap();
        assert!(r.summary.fidelity_min.unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn chi_and_bell_generation() {
        let r = run_scenario(&config(Circuit::ChiGen, "none", 100)).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.summary.fidelity_mean, Some(1.0));
        let r = run_scenario(&config(Circuit::BellGen, "00", 100)).unwrap();
        assert_eq!(row(&r, "11").unwrap().probability, 0.5);
        assert!(run_scenario(&config(Circuit::ChiGen, "0101", 1)).is_err());
    }

    #[test]
    fn finite_gc_cnot_reports_inconclusive_shots() {
        let mut c = config(Circuit::GcCnot, "10", 200);
        c.mode = Mode::Finite;
        c.stages = Some(3);
        let r = run_scenario(&c).unwrap();
        assert!(r.summary.inconclusive_frequency > 0.0);
        assert!(r.summary.kept_probability < 1.0);
        r.check_consistency().unwrap();
    }

    #[test]
    fn same_seed_same_report() {
        let c = config(Circuit::BellMeasure, "00", 300);
        assert_eq!(run_scenario(&c).unwrap(), run_scenario(&c).unwrap());
    }
}
