//! Sparse occupation-number states over labelled modes.
//!
//! A [`QuantumState`] maps occupation configurations (one bit per registered
//! mode, hard-sphere occupancy) to complex amplitudes and carries a scalar
//! loss probability for mass that left the register through absorption.
//! Every mutating operation keeps `Σ|amp|² + loss = 1` and records the worst
//! deviation it has ever observed, so long circuits can be audited afterwards.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Result, SimError};

/// Amplitudes smaller than this (in magnitude) are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Maximum number of modes a single register can hold.
pub const MAX_MODES: usize = 128;

/// Tolerance on `M†M = I` for two-mode mixers.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// 2×2 complex matrix acting on the single-excitation subspace of two modes.
///
/// Row/column 0 is "first mode occupied", row/column 1 is "second mode occupied".
pub type Mixer = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeId(pub u32);

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Particle species carried by a mode.
///
/// `Object` is the classical absorber of the photon interferometer; electrons and
/// positrons absorb each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    Photon,
    Electron,
    Positron,
    Object,
}

impl Species {
    pub fn annihilates(self, other: Species) -> bool {
        self.partner() == other
    }

    /// The species this one annihilates with.
    pub fn partner(self) -> Species {
        match self {
            Species::Photon => Species::Object,
            Species::Object => Species::Photon,
            Species::Electron => Species::Positron,
            Species::Positron => Species::Electron,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeDescriptor {
    pub id: ModeId,
    pub species: Species,
    pub label: String,
}

impl ModeDescriptor {
    pub fn new(id: u32, species: Species, label: impl Into<String>) -> Self {
        Self {
            id: ModeId(id),
            species,
            label: label.into(),
        }
    }
}

/// One occupancy bit per registered mode, in register order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OccupationConfig {
    bits: u128,
    len: usize,
}

impl OccupationConfig {
    pub fn new(occupancy: &[u8]) -> Result<Self> {
        if occupancy.len() > MAX_MODES {
            return Err(SimError::TooManyModes { max: MAX_MODES });
        }
        let mut bits = 0u128;
        for (i, &occ) in occupancy.iter().enumerate() {
            match occ {
                0 => {}
                1 => bits |= 1 << i,
                other => return Err(SimError::MalformedOccupancy(other)),
            }
        }
        Ok(Self {
            bits,
            len: occupancy.len(),
        })
    }

    pub(crate) fn from_bits(bits: u128, len: usize) -> Self {
        Self { bits, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Occupancy of the mode at register position `index`.
    pub fn occupied(&self, index: usize) -> bool {
        index < self.len && self.bits >> index & 1 == 1
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }
}

impl fmt::Display for OccupationConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.occupied(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A qubit stored in which of two modes holds the particle.
///
/// `mode_a` occupied is logical one, `mode_b` occupied is logical zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DualRailQubit {
    pub mode_a: ModeId,
    pub mode_b: ModeId,
}

impl DualRailQubit {
    pub fn new(mode_a: ModeId, mode_b: ModeId) -> Self {
        Self { mode_a, mode_b }
    }
}

#[derive(Debug, Clone)]
pub struct QuantumState {
    modes: Vec<ModeDescriptor>,
    terms: BTreeMap<u128, Complex64>,
    loss: f64,
    drift: f64,
}

impl QuantumState {
    /// Register `modes` with a single basis configuration of amplitude one.
    pub fn new_register(modes: Vec<ModeDescriptor>, initial: &OccupationConfig) -> Result<Self> {
        if modes.len() > MAX_MODES {
            return Err(SimError::TooManyModes { max: MAX_MODES });
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].iter().any(|other| other.id == m.id) {
                return Err(SimError::DuplicateMode(m.id));
            }
        }
        if initial.len() != modes.len() {
            return Err(SimError::LengthMismatch {
                expected: modes.len(),
                got: initial.len(),
            });
        }
        let mut terms = BTreeMap::new();
        terms.insert(initial.bits, Complex64::new(1.0, 0.0));
        Ok(Self {
            modes,
            terms,
            loss: 0.0,
            drift: 0.0,
        })
    }

    /// Register with no modes at all; grow it with [`add_mode`](Self::add_mode).
    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(0, Complex64::new(1.0, 0.0));
        Self {
            modes: Vec::new(),
            terms,
            loss: 0.0,
            drift: 0.0,
        }
    }

    /// Build a state from explicit terms. The squared norm must be one within
    /// 1e-9; it is then rescaled to exactly one.
    pub fn from_terms(
        modes: Vec<ModeDescriptor>,
        terms: &[(OccupationConfig, Complex64)],
    ) -> Result<Self> {
        let empty = OccupationConfig::from_bits(0, modes.len());
        let mut state = Self::new_register(modes, &empty)?;
        state.terms.clear();
        for (config, amp) in terms {
            state.check_len(config)?;
            *state.terms.entry(config.bits).or_default() += amp;
        }
        let norm: f64 = state.kept_probability();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(SimError::NotNormalized(norm - 1.0));
        }
        let scale = 1.0 / norm.sqrt();
        state.terms.values_mut().for_each(|a| *a *= scale);
        state.finish();
        Ok(state)
    }

    pub fn modes(&self) -> &[ModeDescriptor] {
        &self.modes
    }

    pub fn mode(&self, id: ModeId) -> Result<&ModeDescriptor> {
        Ok(&self.modes[self.index_of(id)?])
    }

    pub fn index_of(&self, id: ModeId) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.id == id)
            .ok_or(SimError::UnknownMode(id))
    }

    pub(crate) fn mask(&self, id: ModeId) -> Result<u128> {
        Ok(1u128 << self.index_of(id)?)
    }

    /// Append an empty or singly occupied mode with a freshly allocated id.
    pub fn add_mode(
        &mut self,
        species: Species,
        label: impl Into<String>,
        occupied: bool,
    ) -> Result<ModeId> {
        if self.modes.len() >= MAX_MODES {
            return Err(SimError::TooManyModes { max: MAX_MODES });
        }
        let id = ModeId(self.modes.iter().map(|m| m.id.0 + 1).max().unwrap_or(0));
        let bit = 1u128 << self.modes.len();
        self.modes.push(ModeDescriptor {
            id,
            species,
            label: label.into(),
        });
        if occupied {
            self.terms = std::mem::take(&mut self.terms)
                .into_iter()
                .map(|(k, a)| (k | bit, a))
                .collect();
        }
        Ok(id)
    }

    /// Append a dual-rail qubit prepared in |0> (`one = false`) or |1>.
    pub fn add_qubit(&mut self, species: Species, label: &str, one: bool) -> Result<DualRailQubit> {
        let a = self.add_mode(species, format!("{label}.a"), one)?;
        let b = self.add_mode(species, format!("{label}.b"), !one)?;
        Ok(DualRailQubit::new(a, b))
    }

    /// Remove a mode whose occupancy is the same in every surviving term.
    /// Returns that occupancy.
    pub fn discard_mode(&mut self, id: ModeId) -> Result<bool> {
        let index = self.index_of(id)?;
        let mask = 1u128 << index;
        let mut seen: Option<bool> = None;
        for &k in self.terms.keys() {
            let occ = k & mask != 0;
            match seen {
                None => seen = Some(occ),
                Some(prev) if prev != occ => return Err(SimError::ModeNotDefinite(id)),
                _ => {}
            }
        }
        let low = mask - 1;
        self.terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(k, a)| ((k & low) | ((k >> 1) & !low), a))
            .collect();
        self.modes.remove(index);
        Ok(seen.unwrap_or(false))
    }

    fn check_len(&self, config: &OccupationConfig) -> Result<()> {
        if config.len != self.modes.len() {
            return Err(SimError::LengthMismatch {
                expected: self.modes.len(),
                got: config.len,
            });
        }
        Ok(())
    }

    pub fn amplitude(&self, config: &OccupationConfig) -> Result<Complex64> {
        self.check_len(config)?;
        Ok(self.terms.get(&config.bits).copied().unwrap_or_default())
    }

    /// Configuration with exactly the listed modes occupied.
    pub fn config_with(&self, occupied: &[ModeId]) -> Result<OccupationConfig> {
        let mut bits = 0;
        for &id in occupied {
            bits |= self.mask(id)?;
        }
        Ok(OccupationConfig::from_bits(bits, self.modes.len()))
    }

    /// Amplitude of the configuration with exactly `occupied` filled.
    pub fn amplitude_of(&self, occupied: &[ModeId]) -> Result<Complex64> {
        self.amplitude(&self.config_with(occupied)?)
    }

    pub fn terms(&self) -> impl Iterator<Item = (OccupationConfig, Complex64)> + '_ {
        let len = self.modes.len();
        self.terms
            .iter()
            .map(move |(&k, &a)| (OccupationConfig::from_bits(k, len), a))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn kept_probability(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, a| acc + a.norm_sqr())
    }

    pub fn loss_probability(&self) -> f64 {
        self.loss
    }

    /// `|Σ|amp|² + loss − 1|` right now.
    pub fn conservation_error(&self) -> f64 {
        (self.kept_probability() + self.loss - 1.0).abs()
    }

    /// Worst conservation error observed after any operation applied to this
    /// state or the states it was cloned from.
    pub fn max_conservation_drift(&self) -> f64 {
        self.drift
    }

    fn finish(&mut self) {
        self.terms.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        let err = self.conservation_error();
        if err > self.drift {
            self.drift = err;
        }
    }

    /// Mix the single-excitation subspace of modes `i` and `j`.
    ///
    /// Terms with exactly one of the two modes occupied are mixed by `matrix`;
    /// terms with both or neither are left alone.
    pub fn apply_two_mode_mixer(&mut self, i: ModeId, j: ModeId, matrix: &Mixer) -> Result<()> {
        if i == j {
            return Err(SimError::IdenticalModes(i));
        }
        let deviation = unitarity_deviation(matrix);
        if deviation > UNITARITY_TOLERANCE {
            return Err(SimError::NonUnitary { deviation });
        }
        let mi = self.mask(i)?;
        let mj = self.mask(j)?;
        let mut out: BTreeMap<u128, Complex64> = BTreeMap::new();
        for (&k, &amp) in &self.terms {
            let (col, base) = match (k & mi != 0, k & mj != 0) {
                (true, false) => (0, k & !mi),
                (false, true) => (1, k & !mj),
                _ => {
                    *out.entry(k).or_default() += amp;
                    continue;
                }
            };
            *out.entry(base | mi).or_default() += matrix[0][col] * amp;
            *out.entry(base | mj).or_default() += matrix[1][col] * amp;
        }
        self.terms = out;
        self.finish();
        Ok(())
    }

    /// Remove every term with both modes occupied, moving its weight into the
    /// loss probability. The two modes must carry annihilating species.
    pub fn annihilate_if_coincident(&mut self, control: ModeId, target: ModeId) -> Result<()> {
        if control == target {
            return Err(SimError::IdenticalModes(control));
        }
        let cs = self.mode(control)?.species;
        let ts = self.mode(target)?.species;
        if !cs.annihilates(ts) {
            return Err(SimError::NonAnnihilating {
                control: cs,
                target: ts,
            });
        }
        let both = self.mask(control)? | self.mask(target)?;
        let mut absorbed = 0.0;
        self.terms.retain(|&k, a| {
            if k & both == both {
                absorbed += a.norm_sqr();
                false
            } else {
                true
            }
        });
        self.loss += absorbed;
        self.finish();
        Ok(())
    }

    /// Move the occupancy of each `from` mode onto its `to` mode.
    ///
    /// Modes not mentioned stay put; the resulting map must be a bijection.
    pub fn permute_modes(&mut self, mapping: &[(ModeId, ModeId)]) -> Result<()> {
        let n = self.modes.len();
        let mut target: Vec<usize> = (0..n).collect();
        let mut assigned = vec![false; n];
        for &(from, to) in mapping {
            let f = self.index_of(from)?;
            let t = self.index_of(to)?;
            if assigned[f] {
                return Err(SimError::NotBijective);
            }
            assigned[f] = true;
            target[f] = t;
        }
        let mut hit = vec![false; n];
        for &t in &target {
            if hit[t] {
                return Err(SimError::NotBijective);
            }
            hit[t] = true;
        }
        self.terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(k, a)| {
                let mut moved = 0u128;
                for (f, &t) in target.iter().enumerate() {
                    if k >> f & 1 == 1 {
                        moved |= 1 << t;
                    }
                }
                (moved, a)
            })
            .collect();
        self.finish();
        Ok(())
    }

    pub fn swap_modes(&mut self, a: ModeId, b: ModeId) -> Result<()> {
        if a == b {
            return Err(SimError::IdenticalModes(a));
        }
        self.permute_modes(&[(a, b), (b, a)])
    }

    /// Apply a basis map that is injective on the surviving terms: each key is
    /// sent to a new key with a phase factor.
    pub(crate) fn map_basis(&mut self, f: impl Fn(u128) -> (u128, Complex64)) {
        let mut out = BTreeMap::new();
        for (k, a) in std::mem::take(&mut self.terms) {
            let (nk, phase) = f(k);
            *out.entry(nk).or_insert(Complex64::default()) += phase * a;
        }
        self.terms = out;
        self.finish();
    }

    /// True if every surviving term has exactly one of the qubit's rails occupied.
    pub fn is_dual_rail(&self, qubit: DualRailQubit) -> Result<bool> {
        if qubit.mode_a == qubit.mode_b {
            return Err(SimError::IdenticalModes(qubit.mode_a));
        }
        let ma = self.mask(qubit.mode_a)?;
        let mb = self.mask(qubit.mode_b)?;
        Ok(self
            .terms
            .keys()
            .all(|&k| (k & ma != 0) != (k & mb != 0)))
    }

    pub fn check_dual_rail(&self, qubit: DualRailQubit) -> Result<()> {
        if self.is_dual_rail(qubit)? {
            Ok(())
        } else {
            Err(SimError::NotDualRail {
                a: qubit.mode_a,
                b: qubit.mode_b,
            })
        }
    }

    /// Squared-amplitude mass of terms with `mode` occupied (`bit = 1`) or empty.
    pub fn mass_where(&self, mode: ModeId, bit: u8) -> Result<f64> {
        let m = self.mask(mode)?;
        let want = bit != 0;
        Ok(self
            .terms
            .iter()
            .filter(|(&k, _)| (k & m != 0) == want)
            .fold(0.0, |acc, (_, a)| acc + a.norm_sqr()))
    }

    /// Keep only terms where `mode` has occupancy `bit`, rescale the survivors
    /// to squared norm `1 − loss` and return the conditional probability of
    /// that outcome given survival.
    pub fn project(&mut self, mode: ModeId, bit: u8) -> Result<f64> {
        let kept = self.kept_probability();
        if kept <= 0.0 {
            return Err(SimError::AllMassLost);
        }
        let branch = self.mass_where(mode, bit)?;
        if branch <= 0.0 {
            return Err(SimError::ZeroProbability { mode, bit });
        }
        let m = self.mask(mode)?;
        let want = bit != 0;
        self.terms.retain(|&k, _| (k & m != 0) == want);
        let scale = ((1.0 - self.loss) / branch).sqrt();
        self.terms.values_mut().for_each(|a| *a *= scale);
        self.finish();
        Ok(branch / kept)
    }

    /// Collapse onto the branch in which the register was absorbed: no
    /// surviving terms and loss one.
    pub fn mark_lost(&mut self) {
        self.terms.clear();
        self.loss = 1.0;
        self.finish();
    }
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.modes.iter().map(|m| m.label.as_str()).collect();
        writeln!(f, "modes [{}], loss {:.6e}", labels.join(", "), self.loss)?;
        for (config, amp) in self.terms() {
            writeln!(f, "  |{config}>  {:+.6} {:+.6}i", amp.re, amp.im)?;
        }
        Ok(())
    }
}

pub(crate) fn unitarity_deviation(m: &Mixer) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let dot: Complex64 = (0..2).map(|k| m[k][r].conj() * m[k][c]).sum();
            let expected = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((dot - expected).norm());
        }
    }
    worst
}
