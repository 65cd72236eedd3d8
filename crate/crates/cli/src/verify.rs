//! Self-check suite behind `ifm-sim verify`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use clap::ValueEnum;
use ifm_core::circuits::{
    bell_distribution, bell_generate, chi_generate, cnot_between_electrons, gc_cnot,
    prepare_dual_rail, swap_via_cnot, verify_correction_table, BellBits, BellNetwork,
    CorrectionTable, GcReadout, GcWiring, Pauli,
};
use ifm_core::gates::{finite_ifm, ideal_ifm};
use ifm_core::oracle::{dense_cnot, embed, fidelity, DenseState};
use ifm_core::{
    ModeDescriptor, ModeId, OccupationConfig, QuantumState, Result as SimResult, Sampler, ShotRng,
    Species, Stages,
};
use num_complex::Complex64;

/// Deliberate faults for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    CorruptTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

const PE: [Species; 2] = [Species::Positron, Species::Electron];
const ORACLE_STATES: u64 = 100;
const FIDELITY_FLOOR: f64 = 1.0 - 1e-10;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn ifm_register(occ: [u8; 3]) -> SimResult<QuantumState> {
    QuantumState::new_register(
        vec![
            ModeDescriptor::new(0, Species::Object, "x"),
            ModeDescriptor::new(1, Species::Photon, "a"),
            ModeDescriptor::new(2, Species::Photon, "b"),
        ],
        &OccupationConfig::new(&occ)?,
    )
}

fn truth_table() -> SimResult<(bool, String)> {
    let rows = [
        ([0, 0, 1], [0, 1, 0], 1.0),
        ([1, 0, 1], [1, 0, 1], 1.0),
        ([0, 1, 0], [0, 0, 1], -1.0),
        ([1, 0, 0], [1, 0, 0], 1.0),
    ];
    let mut ok = true;
    for (input, output, sign) in rows {
        let mut s = ifm_register(input)?;
        ideal_ifm(&mut s, ModeId(0), ModeId(1), ModeId(2))?;
        ok &= s.term_count() == 1 && s.amplitude(&OccupationConfig::new(&output)?)? == c(sign);
    }
    let mut s = ifm_register([1, 1, 0])?;
    ideal_ifm(&mut s, ModeId(0), ModeId(1), ModeId(2))?;
    ok &= s.loss_probability() == 1.0;
    Ok((ok, "4 rows plus absorbed input".into()))
}

fn survival_law() -> SimResult<(bool, String)> {
    let mut worst = 0.0f64;
    for n in [1u32, 2, 5, 10, 20, 50, 100, 1000] {
        let mut s = ifm_register([1, 0, 1])?;
        finite_ifm(&mut s, ModeId(0), ModeId(1), ModeId(2), n)?;
        let formula = (FRAC_PI_2 / n as f64).cos().powi(2 * n as i32);
        worst = worst.max((s.kept_probability() - formula).abs());
    }
    Ok((worst <= 1e-10, format!("max error {worst:.3e}")))
}

fn network_columns() -> SimResult<(bool, String)> {
    let mut ok = true;
    for (steer_bit, probe_bit) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
        let mut amps = vec![c(0.0); 4];
        amps[steer_bit << 1 | probe_bit] = c(1.0);
        let (mut s, q) = prepare_dual_rail(&PE, &amps)?;
        let net = BellNetwork::attach(&mut s, q[0], q[1], Stages::Ideal)?;
        let p = net.paths();
        let rail = if steer_bit == 1 { p.a } else { p.b };
        let (t1, t2, sign) = match (steer_bit, probe_bit) {
            (0, 0) => (p.f, p.f, 1.0),
            (0, 1) => (p.c, p.e, -1.0),
            (1, 0) => (p.e, p.e, 1.0),
            _ => (p.d, p.f, -1.0),
        };
        net.to_t1(&mut s)?;
        ok &= s.amplitude_of(&[rail, t1])? == c(1.0);
        net.to_t2(&mut s)?;
        ok &= s.amplitude_of(&[rail, t2])? == c(sign);
    }
    Ok((ok, "T1 and T2 columns with signs".into()))
}

fn bell_states() -> SimResult<(bool, String)> {
    let (mut s, q) = prepare_dual_rail(&PE, &[c(1.0), c(0.0), c(0.0), c(0.0)])?;
    bell_generate(&mut s, q[0], q[1], Stages::Ideal)?;
    let got = embed(&s, &q)?;
    let h = FRAC_1_SQRT_2;
    let mut ok = got
        .amplitudes()
        .iter()
        .zip([h, 0.0, 0.0, h])
        .all(|(g, w)| (g - c(w)).norm() <= 1e-12);
    for bits in BellBits::ALL {
        let sign = if bits.z == 1 { -h } else { h };
        let amps = if bits.x == 0 {
            [c(h), c(0.0), c(0.0), c(sign)]
        } else {
            [c(0.0), c(h), c(sign), c(0.0)]
        };
        let (s, q) = prepare_dual_rail(&PE, &amps)?;
        let d = bell_distribution(&s, q[0], q[1], Stages::Ideal)?;
        ok &= (d.probability(bits) - 1.0).abs() <= 1e-12;
    }
    Ok((ok, "generation amplitudes and four deterministic readouts".into()))
}

fn chi_amplitudes() -> SimResult<(bool, String)> {
    let (s, q) = chi_generate(Stages::Ideal)?;
    let got = embed(&s, &q)?;
    let ok = s.term_count() == 4
        && [0b0000, 0b1100, 0b0111, 0b1011]
            .iter()
            .all(|&i| (got.amplitudes()[i] - c(0.5)).norm() <= 1e-12);
    Ok((ok, format!("{} terms", s.term_count())))
}

fn table_check(table: &CorrectionTable) -> SimResult<(bool, String)> {
    Ok(match verify_correction_table(table, GcWiring::default()) {
        Ok(()) => (true, "16 branches".into()),
        Err(e) => (false, e.to_string()),
    })
}

fn random_state(seed: u64, i: u64) -> DenseState {
    DenseState::random(2, &mut ShotRng::for_shot(seed, i))
}

fn gc_oracle(seed: u64, table: &CorrectionTable) -> SimResult<(bool, String)> {
    let mut min_f = 1.0f64;
    for i in 0..ORACLE_STATES {
        let psi = random_state(seed, i);
        let (mut s, q) = prepare_dual_rail(&PE, psi.amplitudes())?;
        let mut sampler = Sampler::new(seed, i);
        let out = gc_cnot(&mut s, q[0], q[1], GcReadout::Sample(&mut sampler), table, Stages::Ideal)?;
        let f = match out.outputs {
            Some((co, to)) => fidelity(&embed(&s, &[co, to])?, &dense_cnot(&psi, 0, 1)?)?,
            None => 0.0,
        };
        min_f = min_f.min(f);
    }
    Ok((min_f >= FIDELITY_FLOOR, format!("{ORACLE_STATES} states, min fidelity {min_f:.12}")))
}

fn swap_oracle(seed: u64, table: &CorrectionTable) -> SimResult<(bool, String)> {
    let mut min_f = 1.0f64;
    for i in 0..ORACLE_STATES {
        let phi = DenseState::random(1, &mut ShotRng::for_shot(seed ^ 0x5a, i));
        let (mut s, q) = prepare_dual_rail(&[Species::Electron], phi.amplitudes())?;
        let ancilla = s.add_qubit(Species::Positron, "ancilla", false)?;
        let mut sampler = Sampler::new(seed ^ 0x5a, i);
        let f = match swap_via_cnot(&mut s, q[0], ancilla, &mut sampler, table, Stages::Ideal)? {
            Some((emptied, filled)) => fidelity(
                &embed(&s, &[emptied, filled])?,
                &DenseState::basis(1, 0).tensor(&phi),
            )?,
            None => 0.0,
        };
        min_f = min_f.min(f);
    }
    Ok((min_f >= FIDELITY_FLOOR, format!("{ORACLE_STATES} states, min fidelity {min_f:.12}")))
}

fn ee_oracle(seed: u64, table: &CorrectionTable) -> SimResult<(bool, String)> {
    let mut min_f = 1.0f64;
    for i in 0..ORACLE_STATES {
        let psi = random_state(seed ^ 0xee, i);
        let (mut s, q) = prepare_dual_rail(&[Species::Electron, Species::Electron], psi.amplitudes())?;
        let mut sampler = Sampler::new(seed ^ 0xee, i);
        let f = match cnot_between_electrons(&mut s, q[0], q[1], &mut sampler, table, Stages::Ideal)? {
            Some((co, to)) => fidelity(&embed(&s, &[co, to])?, &dense_cnot(&psi, 0, 1)?)?,
            None => 0.0,
        };
        min_f = min_f.min(f);
    }
    Ok((min_f >= FIDELITY_FLOOR, format!("{ORACLE_STATES} states, min fidelity {min_f:.12}")))
}

fn table_for(fault: Option<Fault>) -> CorrectionTable {
    let mut table = CorrectionTable::standard();
    if fault == Some(Fault::CorruptTable) {
        for branch in 0..16 {
            let [c, t] = table.entries()[branch as usize];
            let flip = |p: Pauli| match p {
                Pauli::I => Pauli::X,
                Pauli::X => Pauli::I,
                Pauli::Z => Pauli::XZ,
                Pauli::XZ => Pauli::Z,
            };
            table.set(branch, c, flip(t));
        }
    }
    table
}

/// Run every check. The output depends only on `seed` and `fault`.
pub fn verify_all(seed: u64, fault: Option<Fault>) -> Vec<Check> {
    let table = table_for(fault);
    let checks: Vec<(&'static str, SimResult<(bool, String)>)> = vec![
        ("ifm-truth-table", truth_table()),
        ("survival-law", survival_law()),
        ("bell-network-columns", network_columns()),
        ("bell-states", bell_states()),
        ("chi-amplitudes", chi_amplitudes()),
        ("correction-table", table_check(&table)),
        ("gc-cnot-oracle", gc_oracle(seed, &table)),
        ("swap-oracle", swap_oracle(seed, &table)),
        ("ee-cnot-oracle", ee_oracle(seed, &table)),
    ];
    checks
        .into_iter()
        .map(|(name, r)| match r {
            Ok((pass, detail)) => Check { name, pass, detail },
            Err(e) => Check {
                name,
                pass: false,
                detail: e.to_string(),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let checks = verify_all(3, None);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn corrupted_table_fails() {
        let checks = verify_all(3, Some(Fault::CorruptTable));
        let failed: Vec<_> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        assert!(failed.contains(&"correction-table"));
        assert!(failed.contains(&"gc-cnot-oracle"));
    }
}
