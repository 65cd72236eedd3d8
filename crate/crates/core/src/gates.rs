//! Beam splitters, dual-rail Pauli gates and the IFM gate.
//!
//! The finite IFM gate is the stage-wise interferometer: `N` beam splitters of
//! angle `π/2N` on the target rails, with the control particle sitting on the
//! `a` arm after every splitter. The ideal gate is its `N → ∞` truth table.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::fock::{DualRailQubit, Mixer, ModeId, QuantumState};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Two-mode beam splitter with mixing angle `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    pub theta: f64,
}

impl BeamSplitter {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }

    pub fn transmissivity(&self) -> f64 {
        self.theta.sin().powi(2)
    }

    pub fn reflectivity(&self) -> f64 {
        self.theta.cos().powi(2)
    }

    /// `|1,0> → cos|1,0> − sin|0,1>`, `|0,1> → sin|1,0> + cos|0,1>`.
    pub fn matrix(&self) -> Mixer {
        let (s, c) = self.theta.sin_cos();
        [[re(c), re(s)], [re(-s), re(c)]]
    }
}

pub fn beam_splitter(state: &mut QuantumState, a: ModeId, b: ModeId, theta: f64) -> Result<()> {
    state.apply_two_mode_mixer(a, b, &BeamSplitter::new(theta).matrix())
}

/// Balanced splitter: `|0,1> → (|0,1> + |1,0>)/√2`, `|1,0> → (|0,1> − |1,0>)/√2`
/// with the first mode listed first. On a dual-rail qubit `(x, y)` this is the
/// Hadamard gate.
pub const HADAMARD: Mixer = [
    [Complex64::new(-FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)],
    [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)],
];

pub fn hadamard_bs(state: &mut QuantumState, x: ModeId, y: ModeId) -> Result<()> {
    state.apply_two_mode_mixer(x, y, &HADAMARD)
}

pub fn hadamard(state: &mut QuantumState, qubit: DualRailQubit) -> Result<()> {
    hadamard_bs(state, qubit.mode_a, qubit.mode_b)
}

/// Logical bit flip: exchange the rails.
pub fn pauli_x(state: &mut QuantumState, qubit: DualRailQubit) -> Result<()> {
    state.swap_modes(qubit.mode_a, qubit.mode_b)
}

/// Logical phase flip: `|1̄> → −|1̄>`.
pub fn pauli_z(state: &mut QuantumState, qubit: DualRailQubit) -> Result<()> {
    let z: Mixer = [[re(-1.0), re(0.0)], [re(0.0), re(1.0)]];
    state.apply_two_mode_mixer(qubit.mode_a, qubit.mode_b, &z)
}

/// Number of beam-splitter stages in an IFM gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stages {
    /// The `N → ∞` truth table.
    #[default]
    Ideal,
    Finite(u32),
}

impl Stages {
    pub fn finite(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(SimError::NoStages);
        }
        Ok(Stages::Finite(n))
    }
}

/// Survival probability of the target photon with the absorber present:
/// `cos^{2N}(π/2N)`.
pub fn survival_probability(n: u32) -> f64 {
    (FRAC_PI_2 / n as f64).cos().powf(2.0 * n as f64)
}

/// An IFM gate: control path `x`, target ports `a` (blocked by the control)
/// and `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IfmGate {
    pub control: ModeId,
    pub target_a: ModeId,
    pub target_b: ModeId,
    pub stages: Stages,
}

impl IfmGate {
    pub fn new(control: ModeId, target_a: ModeId, target_b: ModeId, stages: Stages) -> Result<Self> {
        if control == target_a || control == target_b || target_a == target_b {
            return Err(SimError::OverlappingModes);
        }
        if stages == Stages::Finite(0) {
            return Err(SimError::NoStages);
        }
        Ok(Self {
            control,
            target_a,
            target_b,
            stages,
        })
    }

    pub fn apply(&self, state: &mut QuantumState) -> Result<()> {
        match self.stages {
            Stages::Ideal => ideal_ifm(state, self.control, self.target_a, self.target_b),
            Stages::Finite(n) => finite_ifm(state, self.control, self.target_a, self.target_b, n),
        }
    }
}

fn distinct(x: ModeId, a: ModeId, b: ModeId) -> Result<()> {
    if x == a || x == b || a == b {
        Err(SimError::OverlappingModes)
    } else {
        Ok(())
    }
}

/// Limiting truth table of the IFM gate.
///
/// | x a b | out        |
/// |-------|------------|
/// | 0 0 1 | ` 0 1 0`   |
/// | 1 0 1 | ` 1 0 1`   |
/// | 0 1 0 | `−0 0 1`   |
/// | 1 0 0 | ` 1 0 0`   |
///
/// Terms with both `x` and `a` occupied are absorbed into the loss scalar.
pub fn ideal_ifm(state: &mut QuantumState, control: ModeId, a: ModeId, b: ModeId) -> Result<()> {
    distinct(control, a, b)?;
    state.annihilate_if_coincident(control, a)?;
    let mx = state.mask(control)?;
    let ma = state.mask(a)?;
    let mb = state.mask(b)?;
    state.map_basis(|k| {
        let rest = k & !(ma | mb);
        match (k & mx != 0, k & ma != 0, k & mb != 0) {
            (false, false, true) => (rest | ma, re(1.0)),
            (false, true, false) => (rest | mb, re(-1.0)),
            _ => (k, re(1.0)),
        }
    });
    Ok(())
}

/// `n` stages of `θ = π/2n` with absorption after each splitter.
pub fn finite_ifm(state: &mut QuantumState, control: ModeId, a: ModeId, b: ModeId, n: u32) -> Result<()> {
    if n == 0 {
        return Err(SimError::NoStages);
    }
    ifm_stagewise(state, control, a, b, n, FRAC_PI_2 / n as f64)
}

/// Interferometer with a free splitter angle; `finite_ifm` fixes `θ = π/2n`.
pub fn ifm_stagewise(
    state: &mut QuantumState,
    control: ModeId,
    a: ModeId,
    b: ModeId,
    n: u32,
    theta: f64,
) -> Result<()> {
    distinct(control, a, b)?;
    let splitter = BeamSplitter::new(theta).matrix();
    for _ in 0..n {
        state.apply_two_mode_mixer(a, b, &splitter)?;
        state.annihilate_if_coincident(control, a)?;
    }
    Ok(())
}

/// IFM gate between two dual-rail qubits, wired so the target enters on its
/// `|0̄>` rail and the output ports are crossed: `|0̄>|0̄> → |0̄>|0̄>`,
/// `|1̄>|0̄> → |1̄>|1̄>`, `|0̄>|1̄> → −|0̄>|1̄>`, and `|1̄>|1̄>` is absorbed.
pub fn ifm_dual_rail(
    state: &mut QuantumState,
    control: DualRailQubit,
    target: DualRailQubit,
    stages: Stages,
) -> Result<()> {
    IfmGate::new(control.mode_a, target.mode_a, target.mode_b, stages)?.apply(state)?;
    state.swap_modes(target.mode_a, target.mode_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ModeDescriptor, OccupationConfig, Species};

    const X: ModeId = ModeId(0);
    const A: ModeId = ModeId(1);
    const B: ModeId = ModeId(2);

    fn photon_register(x: u8, a: u8, b: u8) -> QuantumState {
        QuantumState::new_register(
            vec![
                ModeDescriptor::new(0, Species::Object, "x"),
                ModeDescriptor::new(1, Species::Photon, "a"),
                ModeDescriptor::new(2, Species::Photon, "b"),
            ],
            &OccupationConfig::new(&[x, a, b]).unwrap(),
        )
        .unwrap()
    }

    fn amp(s: &QuantumState, occ: &[ModeId]) -> Complex64 {
        s.amplitude_of(occ).unwrap()
    }

    #[test]
    fn splitter_matrix_and_ratios() {
        let theta = 0.41;
        let bs = BeamSplitter::new(theta);
        assert!((bs.transmissivity() + bs.reflectivity() - 1.0).abs() < 1e-15);
        let mut s = photon_register(0, 1, 0);
        beam_splitter(&mut s, A, B, theta).unwrap();
        assert!((amp(&s, &[A]) - re(theta.cos())).norm() < 1e-15);
        assert!((amp(&s, &[B]) - re(-theta.sin())).norm() < 1e-15);

        let mut id = photon_register(0, 1, 0);
        beam_splitter(&mut id, A, B, 0.0).unwrap();
        assert_eq!(amp(&id, &[A]), re(1.0));
        assert_eq!(id.term_count(), 1);
    }

    #[test]
    fn kth_splitter_amplitudes() {
        let theta = 0.13;
        let mut s = photon_register(0, 0, 1);
        for k in 1..=12 {
            beam_splitter(&mut s, A, B, theta).unwrap();
            let kt = k as f64 * theta;
            assert!((amp(&s, &[A]) - re(kt.sin())).norm() < 1e-13);
            assert!((amp(&s, &[B]) - re(kt.cos())).norm() < 1e-13);
        }
    }

    #[test]
    fn hadamard_on_dual_rail() {
        let h = FRAC_1_SQRT_2;
        let q = DualRailQubit::new(A, B);
        let mut zero = photon_register(0, 0, 1);
        hadamard(&mut zero, q).unwrap();
        assert!((amp(&zero, &[B]) - re(h)).norm() < 1e-15);
        assert!((amp(&zero, &[A]) - re(h)).norm() < 1e-15);

        let mut one = photon_register(0, 1, 0);
        hadamard(&mut one, q).unwrap();
        assert!((amp(&one, &[B]) - re(h)).norm() < 1e-15);
        assert!((amp(&one, &[A]) - re(-h)).norm() < 1e-15);
    }

    #[test]
    fn hadamard_squares_to_identity() {
        // Direct 2×2 product of the splitter matrix with itself.
        let sq: [[Complex64; 2]; 2] = std::array::from_fn(|r| {
            std::array::from_fn(|c| (0..2).map(|k| HADAMARD[r][k] * HADAMARD[k][c]).sum())
        });
        for (r, row) in sq.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((v - re(want)).norm() < 1e-15);
            }
        }
        let mut s = photon_register(0, 1, 0);
        hadamard_bs(&mut s, A, B).unwrap();
        hadamard_bs(&mut s, A, B).unwrap();
        assert!((amp(&s, &[A]) - re(1.0)).norm() < 1e-15);
        assert_eq!(s.term_count(), 1);
    }

    #[test]
    fn paulis() {
        let q = DualRailQubit::new(A, B);
        let mut s = photon_register(0, 0, 1);
        pauli_x(&mut s, q).unwrap();
        assert_eq!(amp(&s, &[A]), re(1.0));
        pauli_z(&mut s, q).unwrap();
        assert_eq!(amp(&s, &[A]), re(-1.0));

        // ZXZX = −1 on a generic superposition (2×2 algebra: ZX = iY, (iY)² = −1).
        let mut g = photon_register(0, 0, 1);
        beam_splitter(&mut g, A, B, 0.7).unwrap();
        let before: Vec<_> = g.terms().collect();
        for _ in 0..2 {
            pauli_x(&mut g, q).unwrap();
            pauli_z(&mut g, q).unwrap();
        }
        for (cfg, a) in before {
            assert!((g.amplitude(&cfg).unwrap() + a).norm() < 1e-15);
        }
    }

    #[test]
    fn ideal_truth_table() {
        let mut r1 = photon_register(0, 0, 1);
        ideal_ifm(&mut r1, X, A, B).unwrap();
        assert_eq!(amp(&r1, &[A]), re(1.0));

        let mut r2 = photon_register(1, 0, 1);
        ideal_ifm(&mut r2, X, A, B).unwrap();
        assert_eq!(amp(&r2, &[X, B]), re(1.0));

        let mut r3 = photon_register(0, 1, 0);
        ideal_ifm(&mut r3, X, A, B).unwrap();
        assert_eq!(amp(&r3, &[B]), re(-1.0));

        let mut r4 = photon_register(1, 0, 0);
        ideal_ifm(&mut r4, X, A, B).unwrap();
        assert_eq!(amp(&r4, &[X]), re(1.0));

        let mut forbidden = photon_register(1, 1, 0);
        ideal_ifm(&mut forbidden, X, A, B).unwrap();
        assert_eq!(forbidden.term_count(), 0);
        assert_eq!(forbidden.loss_probability(), 1.0);

        assert_eq!(ideal_ifm(&mut r4, X, X, B), Err(SimError::OverlappingModes));
    }

    #[test]
    fn ideal_square_on_empty_control_is_minus_identity() {
        let mut s = photon_register(0, 0, 1);
        beam_splitter(&mut s, A, B, 0.3).unwrap();
        let before: Vec<_> = s.terms().collect();
        ideal_ifm(&mut s, X, A, B).unwrap();
        ideal_ifm(&mut s, X, A, B).unwrap();
        for (cfg, a) in before {
            assert!((s.amplitude(&cfg).unwrap() + a).norm() < 1e-15);
        }
    }

    #[test]
    fn finite_survival_small_n() {
        // N = 1: θ = π/2 sends the photon straight into the absorber.
        let mut one = photon_register(1, 0, 1);
        finite_ifm(&mut one, X, A, B, 1).unwrap();
        assert!(one.kept_probability() < 1e-30);
        assert!((one.loss_probability() - 1.0).abs() < 1e-15);

        // N = 2: cos⁴(π/4) = 1/4.
        let mut two = photon_register(1, 0, 1);
        finite_ifm(&mut two, X, A, B, 2).unwrap();
        assert!((amp(&two, &[X, B]).norm_sqr() - 0.25).abs() < 1e-15);
        assert!((two.loss_probability() - 0.75).abs() < 1e-15);

        // N = 10: cos²⁰(π/20) = 0.780546069781... (closed form in f64).
        let mut ten = photon_register(1, 0, 1);
        finite_ifm(&mut ten, X, A, B, 10).unwrap();
        assert!((amp(&ten, &[X, B]).norm_sqr() - 0.7805460697811408).abs() < 1e-12);
    }

    #[test]
    fn finite_without_control_is_exact_for_every_n() {
        for n in [1, 2, 3, 7, 10, 64, 500] {
            let mut r1 = photon_register(0, 0, 1);
            finite_ifm(&mut r1, X, A, B, n).unwrap();
            assert!((amp(&r1, &[A]) - re(1.0)).norm() < 1e-12, "n = {n}");
            assert!(amp(&r1, &[B]).norm() < 1e-12);
            assert_eq!(r1.loss_probability(), 0.0);

            let mut r3 = photon_register(0, 1, 0);
            finite_ifm(&mut r3, X, A, B, n).unwrap();
            assert!((amp(&r3, &[B]) - re(-1.0)).norm() < 1e-12, "n = {n}");
            assert_eq!(r3.loss_probability(), 0.0);
        }
    }

    #[test]
    fn finite_forbidden_input_uses_stagewise_rule() {
        // Photon on a with the absorber present: the first splitter leaves
        // −sinθ on b, then N − 1 more stages each keep cosθ of it.
        let n = 6;
        let theta = FRAC_PI_2 / n as f64;
        let mut s = photon_register(1, 1, 0);
        finite_ifm(&mut s, X, A, B, n).unwrap();
        let expected = -theta.sin() * theta.cos().powi(n as i32 - 1);
        assert!((amp(&s, &[X, B]) - re(expected)).norm() < 1e-15);
        assert!(s.conservation_error() < 1e-12);
    }

    #[test]
    fn survival_law_is_monotone() {
        let mut prev = survival_probability(1);
        assert!(prev.abs() < 1e-30);
        for n in 2..2000 {
            let p = survival_probability(n);
            assert!(p > prev, "n = {n}");
            prev = p;
        }
        assert!(prev > 0.998);
    }

    #[test]
    fn stage_validation() {
        assert_eq!(Stages::finite(0), Err(SimError::NoStages));
        assert_eq!(IfmGate::new(X, A, A, Stages::Ideal), Err(SimError::OverlappingModes));
        let mut s = photon_register(0, 0, 1);
        assert_eq!(finite_ifm(&mut s, X, A, B, 0), Err(SimError::NoStages));
    }

    #[test]
    fn dual_rail_ifm_identities() {
        let mut s = QuantumState::vacuum();
        let c = s.add_qubit(Species::Positron, "c", true).unwrap();
        let t = s.add_qubit(Species::Electron, "t", false).unwrap();
        ifm_dual_rail(&mut s, c, t, Stages::Ideal).unwrap();
        assert_eq!(amp(&s, &[c.mode_a, t.mode_a]), re(1.0));

        let mut z = QuantumState::vacuum();
        let c = z.add_qubit(Species::Positron, "c", false).unwrap();
        let t = z.add_qubit(Species::Electron, "t", false).unwrap();
        ifm_dual_rail(&mut z, c, t, Stages::Ideal).unwrap();
        assert_eq!(amp(&z, &[c.mode_b, t.mode_b]), re(1.0));

        let mut o = QuantumState::vacuum();
        let c = o.add_qubit(Species::Positron, "c", false).unwrap();
        let t = o.add_qubit(Species::Electron, "t", true).unwrap();
        ifm_dual_rail(&mut o, c, t, Stages::Ideal).unwrap();
        assert_eq!(amp(&o, &[c.mode_b, t.mode_a]), re(-1.0));
    }
}
