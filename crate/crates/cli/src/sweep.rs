//! Stage-count sweeps: simulated success probability against its closed form.
//!
//! | circuit    | success                          | closed form            |
//! |------------|----------------------------------|------------------------|
//! | `ifm_gate` | photon kept, object present      | `P = cos²ᴺ(π/2N)`      |
//! | `ifm_gate` | photon routed to `a`, no object  | `1`                    |
//! | `bell_gen` | pair kept                        | `(1 + P)/2`            |
//! | `chi_gen`  | register kept                    | `(1 + P)(1 + P²)/4`    |

use std::f64::consts::FRAC_PI_2;

use ifm_core::circuits::{bell_generate, chi_generate, prepare_dual_rail};
use ifm_core::gates::finite_ifm;
use ifm_core::{ModeDescriptor, ModeId, OccupationConfig, QuantumState, Species, Stages};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Circuit, Format, Object};
use crate::error::{CliError, Result};
use crate::report::sig12;

pub const AGREEMENT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub theta: f64,
    pub p_success_simulated: f64,
    pub p_success_formula: f64,
    pub abs_error: f64,
    pub p_loss: f64,
}

impl SweepRow {
    fn rounded(self) -> Self {
        Self {
            n: self.n,
            theta: sig12(self.theta),
            p_success_simulated: sig12(self.p_success_simulated),
            p_success_formula: sig12(self.p_success_formula),
            abs_error: sig12(self.abs_error),
            p_loss: sig12(self.p_loss),
        }
    }
}

fn closed_form(n: u32) -> f64 {
    (FRAC_PI_2 / n as f64).cos().powi(2 * n as i32)
}

fn sweep_row(circuit: Circuit, object: Object, n: u32) -> Result<SweepRow> {
    let p = closed_form(n);
    let (simulated, formula, loss) = match circuit {
        Circuit::IfmGate => {
            let x = u8::from(object == Object::Present);
            let mut s = QuantumState::new_register(
                vec![
                    ModeDescriptor::new(0, Species::Object, "x"),
                    ModeDescriptor::new(1, Species::Photon, "a"),
                    ModeDescriptor::new(2, Species::Photon, "b"),
                ],
                &OccupationConfig::new(&[x, 0, 1])?,
            )?;
            finite_ifm(&mut s, ModeId(0), ModeId(1), ModeId(2), n)?;
            match object {
                Object::Present => (s.kept_probability(), p, s.loss_probability()),
                Object::Absent => (s.mass_where(ModeId(1), 1)?, 1.0, s.loss_probability()),
            }
        }
        Circuit::BellGen => {
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::default();
            let (mut s, q) =
                prepare_dual_rail(&[Species::Positron, Species::Electron], &[one, zero, zero, zero])?;
            bell_generate(&mut s, q[0], q[1], Stages::Finite(n))?;
            (s.kept_probability(), (1.0 + p) / 2.0, s.loss_probability())
        }
        Circuit::ChiGen => {
            let (s, _) = chi_generate(Stages::Finite(n))?;
            (s.kept_probability(), (1.0 + p) * (1.0 + p * p) / 4.0, s.loss_probability())
        }
        other => {
            return Err(CliError::Config(format!(
                "sweep supports ifm_gate, bell_gen and chi_gen, not {}",
                other.name()
            )))
        }
    };
    Ok(SweepRow {
        n,
        theta: FRAC_PI_2 / n as f64,
        p_success_simulated: simulated,
        p_success_formula: formula,
        abs_error: (simulated - formula).abs(),
        p_loss: loss,
    })
}

/// One row per stage count, in the order given. Rows hold unrounded values.
pub fn run_sweep(circuit: Circuit, object: Object, stages: &[u32]) -> Result<Vec<SweepRow>> {
    if stages.is_empty() {
        return Err(CliError::Config("--stages needs at least one value".into()));
    }
    if stages.contains(&0) {
        return Err(CliError::Config("stage counts must be at least 1".into()));
    }
    stages
        .par_iter()
        .map(|&n| sweep_row(circuit, object, n))
        .collect()
}

/// Fail if any row disagrees with its closed form by more than 1e-10.
pub fn check_agreement(rows: &[SweepRow]) -> Result<()> {
    match rows.iter().find(|r| r.abs_error.is_nan() || r.abs_error > AGREEMENT) {
        Some(r) => Err(CliError::Verification(format!(
            "N={} simulated {} vs formula {} (error {:e})",
            r.n, r.p_success_simulated, r.p_success_formula, r.abs_error
        ))),
        None => Ok(()),
    }
}

pub fn render(rows: &[SweepRow], circuit: Circuit, object: Object, format: Format) -> Result<String> {
    let rounded: Vec<SweepRow> = rows.iter().map(|r| r.rounded()).collect();
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&rounded)? + "\n"),
        Format::Csv => {
            let object = match object {
                Object::Present => "present",
                Object::Absent => "absent",
            };
            let mut out = format!("# circuit=\"{}\"\n# object=\"{object}\"\n", circuit.name());
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rounded {
                w.serialize(r)?;
            }
            let body = w.into_inner().map_err(|e| CliError::Report(e.to_string()))?;
            out.push_str(&String::from_utf8_lossy(&body));
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NS: [u32; 8] = [1, 2, 5, 10, 20, 50, 100, 1000];

    #[test]
    fn ifm_rows_track_closed_form() {
        let rows = run_sweep(Circuit::IfmGate, Object::Present, &NS).unwrap();
        check_agreement(&rows).unwrap();
        assert_eq!(rows[0].p_success_simulated, 0.0);
        assert!((rows[3].p_success_simulated - 0.7805460697811408).abs() < 1e-12);
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), NS);
    }

    #[test]
    fn absent_object_always_routes() {
        let rows = run_sweep(Circuit::IfmGate, Object::Absent, &NS).unwrap();
        check_agreement(&rows).unwrap();
        assert!(rows.iter().all(|r| r.p_loss == 0.0));
    }

    #[test]
    fn composite_circuits_match_their_forms() {
        for circuit in [Circuit::BellGen, Circuit::ChiGen] {
            let rows = run_sweep(circuit, Object::Present, &[1, 3, 10, 100]).unwrap();
            check_agreement(&rows).unwrap();
        }
    }

    #[test]
    fn bad_requests() {
        assert!(run_sweep(Circuit::IfmGate, Object::Present, &[]).is_err());
        assert!(run_sweep(Circuit::IfmGate, Object::Present, &[0]).is_err());
        assert!(run_sweep(Circuit::GcCnot, Object::Present, &[2]).is_err());
    }

    #[test]
    fn csv_header() {
        let rows = run_sweep(Circuit::IfmGate, Object::Present, &[2]).unwrap();
        let text = render(&rows, Circuit::IfmGate, Object::Present, Format::Csv).unwrap();
        assert!(text.contains("N,theta,p_success_simulated,p_success_formula,abs_error,p_loss\n2,"));
    }
}
