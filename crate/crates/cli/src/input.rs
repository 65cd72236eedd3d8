//! Parsing of `--input` specifications into amplitude vectors (qubit 0 most
//! significant).

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{CliError, Result};

pub const NORM_TOLERANCE: f64 = 1e-9;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn bell(name: &str) -> Option<Vec<Complex64>> {
    let h = FRAC_1_SQRT_2;
    let z = c(0.0);
    Some(match name {
        "phi+" => vec![c(h), z, z, c(h)],
        "phi-" => vec![c(h), z, z, c(-h)],
        "psi+" => vec![z, c(h), c(h), z],
        "psi-" => vec![z, c(h), c(-h), z],
        _ => return None,
    })
}

fn single(symbol: char) -> Option<[Complex64; 2]> {
    let h = FRAC_1_SQRT_2;
    Some(match symbol {
        '0' => [c(1.0), c(0.0)],
        '1' => [c(0.0), c(1.0)],
        '+' => [c(h), c(h)],
        '-' => [c(h), c(-h)],
        _ => return None,
    })
}

fn product(spec: &str) -> Option<Vec<Complex64>> {
    let mut amps = vec![c(1.0)];
    for symbol in spec.chars() {
        let q = single(symbol)?;
        amps = amps.iter().flat_map(|a| [a * q[0], a * q[1]]).collect();
    }
    Some(amps)
}

fn amplitude_list(spec: &str, qubits: usize) -> Result<Vec<Complex64>> {
    let amps = spec
        .split(',')
        .map(|t| {
            let t: String = t.chars().filter(|ch| !ch.is_whitespace()).collect();
            t.parse::<Complex64>()
                .map_err(|_| CliError::Config(format!("cannot parse amplitude {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if amps.len() != 1 << qubits {
        return Err(CliError::Config(format!(
            "expected {} amplitudes for {qubits} qubit(s), got {}",
            1 << qubits,
            amps.len()
        )));
    }
    Ok(amps)
}

/// Amplitudes for `qubits` dual-rail qubits, normalized within 1e-9 and then
/// rescaled to unit norm.
pub fn parse_input(spec: &str, qubits: usize) -> Result<Vec<Complex64>> {
    let spec = spec.trim();
    let lower = spec.to_ascii_lowercase();
    let amps = if let Some(b) = bell(&lower).filter(|_| qubits == 2) {
        b
    } else if spec.chars().count() == qubits && !spec.contains(',') {
        product(spec).ok_or_else(|| CliError::Config(format!("unknown input {spec:?}")))?
    } else {
        amplitude_list(spec, qubits)?
    };
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(CliError::Config(format!(
            "input {spec:?} has squared norm {norm}, not 1 within {NORM_TOLERANCE}"
        )));
    }
    let scale = norm.sqrt();
    Ok(amps.into_iter().map(|a| a / scale).collect())
}

/// Occupancies `(x, a, b)` for the bare IFM gate: a two-character photon
/// pattern `ab` with the object from `--object`, or all three as `xab`.
pub fn parse_ifm_input(spec: &str, object: bool) -> Result<[u8; 3]> {
    let bits = spec
        .trim()
        .chars()
        .map(|ch| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(CliError::Config(format!("ifm_gate input must be 0/1 occupancies, got {spec:?}"))),
        })
        .collect::<Result<Vec<u8>>>()?;
    match bits[..] {
        [a, b] => Ok([u8::from(object), a, b]),
        [x, a, b] => Ok([x, a, b]),
        _ => Err(CliError::Config(format!(
            "ifm_gate input is `ab` or `xab`, got {spec:?}"
        ))),
    }
}
