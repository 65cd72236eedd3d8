//! Dense state-vector reference simulator on abstract qubits.
//!
//! Qubit 0 is the most significant bit of the amplitude index, so the basis
//! string `"0111"` is index 7 of a four-qubit state. Nothing here touches the
//! sparse Fock machinery except [`embed`], which only reads terms out of it.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SimError};
use crate::fock::{DualRailQubit, QuantumState};

pub const NORM_TOLERANCE: f64 = 1e-12;

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SimError::DimensionMismatch(len, len.next_power_of_two()));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimError::NotNormalized(norm - 1.0));
        }
        Ok(Self {
            qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::default(); 1 << qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { qubits, amps }
    }

    /// Haar-random state from normalized complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Self {
        let mut amps: Vec<Complex64> = (0..1usize << qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Self { qubits, amps }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Multiply every amplitude by `factor`. The result need not be normalized.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            qubits: self.qubits,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_index(&self, q: usize) -> Result<()> {
        if q >= self.qubits {
            return Err(SimError::QubitOutOfRange {
                index: q,
                qubits: self.qubits,
            });
        }
        Ok(())
    }

    fn shift(&self, q: usize) -> usize {
        self.qubits - 1 - q
    }

    /// Apply a single-qubit matrix in the textbook `(|0>, |1>)` basis.
    pub fn apply_single(&self, q: usize, m: &Matrix2) -> Result<Self> {
        self.check_index(q)?;
        let bit = 1usize << self.shift(q);
        let mut out = self.amps.clone();
        for i in (0..self.amps.len()).filter(|i| i & bit == 0) {
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            out[i] = m[0][0] * a0 + m[0][1] * a1;
            out[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(Self {
            qubits: self.qubits,
            amps: out,
        })
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &DenseState) -> Self {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self {
            qubits: self.qubits + other.qubits,
            amps,
        }
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn h_matrix() -> Matrix2 {
    [[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)], [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)]]
}

pub fn x_matrix() -> Matrix2 {
    [[c(0.0), c(1.0)], [c(1.0), c(0.0)]]
}

pub fn z_matrix() -> Matrix2 {
    [[c(1.0), c(0.0)], [c(0.0), c(-1.0)]]
}

pub fn dense_h(s: &DenseState, q: usize) -> Result<DenseState> {
    s.apply_single(q, &h_matrix())
}

pub fn dense_x(s: &DenseState, q: usize) -> Result<DenseState> {
    s.apply_single(q, &x_matrix())
}

pub fn dense_z(s: &DenseState, q: usize) -> Result<DenseState> {
    s.apply_single(q, &z_matrix())
}

pub fn dense_cnot(s: &DenseState, control: usize, target: usize) -> Result<DenseState> {
    s.check_index(control)?;
    s.check_index(target)?;
    if control == target {
        return Err(SimError::QubitOutOfRange {
            index: target,
            qubits: s.qubits,
        });
    }
    let cb = 1usize << s.shift(control);
    let tb = 1usize << s.shift(target);
    let amps = (0..s.amps.len())
        .map(|i| if i & cb != 0 { s.amps[i ^ tb] } else { s.amps[i] })
        .collect();
    Ok(DenseState {
        qubits: s.qubits,
        amps,
    })
}

pub fn dense_swap(s: &DenseState, p: usize, q: usize) -> Result<DenseState> {
    dense_cnot(&dense_cnot(&dense_cnot(s, p, q)?, q, p)?, p, q)
}

pub fn inner(a: &DenseState, b: &DenseState) -> Result<Complex64> {
    if a.amps.len() != b.amps.len() {
        return Err(SimError::DimensionMismatch(a.amps.len(), b.amps.len()));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// `|<a|b>|²`.
pub fn fidelity(a: &DenseState, b: &DenseState) -> Result<f64> {
    Ok(inner(a, b)?.norm_sqr())
}

fn gather(state: &QuantumState, qubits: &[DualRailQubit]) -> Result<Vec<Complex64>> {
    let rails = qubits
        .iter()
        .map(|q| {
            state.check_dual_rail(*q)?;
            Ok((state.index_of(q.mode_a)?, state.index_of(q.mode_b)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = qubits.len();
    let mut amps = vec![Complex64::default(); 1 << n];
    let mut spectator: Option<Vec<bool>> = None;
    for (config, amp) in state.terms() {
        let mut index = 0usize;
        for (k, &(a, _)) in rails.iter().enumerate() {
            if config.occupied(a) {
                index |= 1 << (n - 1 - k);
            }
        }
        let rest: Vec<bool> = (0..config.len())
            .filter(|i| !rails.iter().any(|&(a, b)| a == *i || b == *i))
            .map(|i| config.occupied(i))
            .collect();
        match &spectator {
            None => spectator = Some(rest),
            Some(prev) if *prev != rest => {
                let first = (0..config.len())
                    .filter(|i| !rails.iter().any(|&(a, b)| a == *i || b == *i))
                    .zip(prev.iter().zip(&rest))
                    .find(|(_, (p, r))| p != r)
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                return Err(SimError::ModeNotDefinite(state.modes()[first].id));
            }
            _ => {}
        }
        amps[index] += amp;
    }
    Ok(amps)
}

/// Read a lossless dual-rail register as a dense state, `|0̄> → |0>`,
/// `|1̄> → |1>`, qubits in the order given. Modes outside `qubits` must be in
/// a definite configuration.
pub fn embed(state: &QuantumState, qubits: &[DualRailQubit]) -> Result<DenseState> {
    if state.loss_probability() > NORM_TOLERANCE {
        return Err(SimError::Lossy(state.loss_probability()));
    }
    DenseState::new(gather(state, qubits)?)
}

/// Like [`embed`] but for lossy states: the surviving part is renormalized.
pub fn embed_conditional(state: &QuantumState, qubits: &[DualRailQubit]) -> Result<DenseState> {
    let mut amps = gather(state, qubits)?;
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(SimError::AllMassLost);
    }
    amps.iter_mut().for_each(|a| *a /= norm);
    DenseState::new(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Species;
    use crate::measurement::ShotRng;

    #[test]
    fn embeds_basis_states() {
        let mut s = QuantumState::vacuum();
        let q0 = s.add_qubit(Species::Positron, "p", false).unwrap();
        let q1 = s.add_qubit(Species::Electron, "e", false).unwrap();
        let d = embed(&s, &[q0, q1]).unwrap();
        assert_eq!(d.amplitudes(), DenseState::basis(2, 0).amplitudes());

        let mut t = QuantumState::vacuum();
        let q0 = t.add_qubit(Species::Positron, "p", true).unwrap();
        let q1 = t.add_qubit(Species::Electron, "e", false).unwrap();
        assert_eq!(embed(&t, &[q0, q1]).unwrap(), DenseState::basis(2, 0b10));
        assert_eq!(embed(&t, &[q1, q0]).unwrap(), DenseState::basis(2, 0b01));
    }

    #[test]
    fn embed_rejects_loss_and_broken_rails() {
        let mut s = QuantumState::vacuum();
        let q = s.add_qubit(Species::Positron, "p", true).unwrap();
        let stray = s.add_mode(Species::Electron, "x", true).unwrap();
        s.annihilate_if_coincident(q.mode_a, stray).unwrap();
        assert!(matches!(embed(&s, &[q]), Err(SimError::Lossy(_))));

        let mut bad = QuantumState::vacuum();
        let a = bad.add_mode(Species::Photon, "a", true).unwrap();
        let b = bad.add_mode(Species::Photon, "b", true).unwrap();
        assert!(matches!(
            embed(&bad, &[DualRailQubit::new(a, b)]),
            Err(SimError::NotDualRail { .. })
        ));
    }

    #[test]
    fn textbook_gates() {
        let ten = DenseState::basis(2, 0b10);
        assert_eq!(dense_cnot(&ten, 0, 1).unwrap(), DenseState::basis(2, 0b11));

        let mut rng = ShotRng::new(11);
        let r = DenseState::random(3, &mut rng);
        let hh = dense_h(&dense_h(&r, 1).unwrap(), 1).unwrap();
        assert!((fidelity(&r, &hh).unwrap() - 1.0).abs() < 1e-12);
        let cc = dense_cnot(&dense_cnot(&r, 2, 0).unwrap(), 2, 0).unwrap();
        assert!((fidelity(&r, &cc).unwrap() - 1.0).abs() < 1e-12);

        assert!(dense_x(&r, 3).is_err());
        assert!(dense_cnot(&r, 1, 1).is_err());
    }

    #[test]
    fn fidelity_properties() {
        let mut rng = ShotRng::new(4);
        let s = DenseState::random(2, &mut rng);
        assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            fidelity(&DenseState::basis(2, 1), &DenseState::basis(2, 2)).unwrap(),
            0.0
        );
        let phase = Complex64::from_polar(1.0, 0.83);
        let rotated = DenseState::new(s.amplitudes().iter().map(|a| a * phase).collect()).unwrap();
        assert!((fidelity(&s, &rotated).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&s, &DenseState::basis(3, 0)).is_err());
    }

    #[test]
    fn swap_exchanges_qubits() {
        let s = DenseState::basis(2, 0b01);
        assert_eq!(dense_swap(&s, 0, 1).unwrap(), DenseState::basis(2, 0b10));
    }
}
