//! Projective detection, Born-rule sampling and post-selection.
//!
//! Randomness comes from [`ShotRng`], a ChaCha8 stream keyed by a root seed and
//! a shot counter, so shot `k` of seed `s` draws the same numbers no matter
//! which thread runs it.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SimError};
use crate::fock::{ModeId, QuantumState};

/// Seedable generator with independent per-shot substreams.
#[derive(Debug, Clone)]
pub struct ShotRng(ChaCha8Rng);

impl ShotRng {
    pub fn new(seed: u64) -> Self {
        Self::for_shot(seed, 0)
    }

    pub fn for_shot(seed: u64, shot: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shot);
        Self(rng)
    }

    /// Uniform draw from `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }
}

impl RngCore for ShotRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Marginal distribution of occupancy bits over a list of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct BornDistribution {
    pub modes: Vec<ModeId>,
    /// Absolute probability of each bit tuple (order follows `modes`).
    pub outcomes: BTreeMap<Vec<u8>, f64>,
    /// Mass already absorbed before the detection.
    pub lost: f64,
}

impl BornDistribution {
    pub fn probability(&self, bits: &[u8]) -> f64 {
        self.outcomes.get(bits).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.outcomes.values().sum::<f64>() + self.lost
    }
}

pub fn born_probabilities(state: &QuantumState, modes: &[ModeId]) -> Result<BornDistribution> {
    let indices = modes
        .iter()
        .map(|&m| state.index_of(m))
        .collect::<Result<Vec<_>>>()?;
    let mut outcomes = BTreeMap::new();
    for (config, amp) in state.terms() {
        let bits: Vec<u8> = indices.iter().map(|&i| config.occupied(i) as u8).collect();
        *outcomes.entry(bits).or_insert(0.0) += amp.norm_sqr();
    }
    Ok(BornDistribution {
        modes: modes.to_vec(),
        outcomes,
        lost: state.loss_probability(),
    })
}

/// Sample the occupancy of `mode` among the surviving terms and collapse.
///
/// Returns the observed bit and its probability conditioned on survival. The
/// loss probability is left untouched; the kept terms are rescaled to `1 − loss`.
pub fn detect(state: &mut QuantumState, mode: ModeId, rng: &mut ShotRng) -> Result<(u8, f64)> {
    let kept = state.kept_probability();
    if kept <= 0.0 {
        return Err(SimError::AllMassLost);
    }
    let p_one = state.mass_where(mode, 1)? / kept;
    let bit = u8::from(rng.uniform() < p_one);
    let p = state.project(mode, bit)?;
    Ok((bit, p))
}

/// Force the outcome `bit` on `mode`; returns its probability given survival.
pub fn postselect(state: &mut QuantumState, mode: ModeId, bit: u8) -> Result<f64> {
    if state.kept_probability() <= 0.0 {
        return Err(SimError::AllMassLost);
    }
    state.project(mode, bit)
}

/// Detection events of one shot.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub seed: u64,
    pub shot: u64,
    pub outcomes: Vec<(ModeId, u8)>,
    pub final_kept_probability: f64,
}

/// A shot's generator plus the record of everything it detected.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ShotRng,
    record: ShotRecord,
}

impl Sampler {
    pub fn new(seed: u64, shot: u64) -> Self {
        Self {
            rng: ShotRng::for_shot(seed, shot),
            record: ShotRecord {
                seed,
                shot,
                outcomes: Vec::new(),
                final_kept_probability: 1.0,
            },
        }
    }

    pub fn detect(&mut self, state: &mut QuantumState, mode: ModeId) -> Result<u8> {
        let (bit, _) = detect(state, mode, &mut self.rng)?;
        self.record.outcomes.push((mode, bit));
        Ok(bit)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.uniform()
    }

    /// Record an outcome decided outside [`detect`](Self::detect).
    pub fn note(&mut self, mode: ModeId, bit: u8) {
        self.record.outcomes.push((mode, bit));
    }

    pub fn rng(&mut self) -> &mut ShotRng {
        &mut self.rng
    }

    pub fn record(&self) -> &ShotRecord {
        &self.record
    }

    pub fn finish(mut self, state: &QuantumState) -> ShotRecord {
        self.record.final_kept_probability = state.kept_probability();
        self.record
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ModeDescriptor, OccupationConfig, Species};
    use crate::gates::hadamard_bs;
    use num_complex::Complex64;

    fn rails(a: u8, b: u8) -> QuantumState {
        QuantumState::new_register(
            vec![
                ModeDescriptor::new(0, Species::Photon, "a"),
                ModeDescriptor::new(1, Species::Photon, "b"),
            ],
            &OccupationConfig::new(&[a, b]).unwrap(),
        )
        .unwrap()
    }

    fn balanced() -> QuantumState {
        let mut s = rails(0, 1);
        hadamard_bs(&mut s, ModeId(0), ModeId(1)).unwrap();
        s
    }

    #[test]
    fn point_mass_distribution() {
        let s = rails(1, 0);
        let d = born_probabilities(&s, &[ModeId(0), ModeId(1)]).unwrap();
        assert_eq!(d.outcomes.len(), 1);
        assert_eq!(d.probability(&[1, 0]), 1.0);
        assert!((d.total() - 1.0).abs() < 1e-12);
        assert!(born_probabilities(&s, &[ModeId(7)]).is_err());
    }

    #[test]
    fn detect_certain_outcome() {
        let mut s = rails(1, 0);
        let mut rng = ShotRng::new(3);
        let (bit, p) = detect(&mut s, ModeId(0), &mut rng).unwrap();
        assert_eq!((bit, p), (1, 1.0));
    }

    #[test]
    fn detect_then_point_mass() {
        for seed in 0..20 {
            let mut s = balanced();
            let mut rng = ShotRng::new(seed);
            let (bit, p) = detect(&mut s, ModeId(0), &mut rng).unwrap();
            assert!((p - 0.5).abs() < 1e-12);
            let d = born_probabilities(&s, &[ModeId(0)]).unwrap();
            assert!((d.probability(&[bit]) - 1.0).abs() < 1e-12);
            assert!(s.conservation_error() < 1e-12);
        }
    }

    #[test]
    fn binomial_frequency_within_three_sigma() {
        let shots = 100_000u64;
        let base = balanced();
        let ones: u64 = (0..shots)
            .map(|k| {
                let mut s = base.clone();
                let mut rng = ShotRng::for_shot(2024, k);
                detect(&mut s, ModeId(0), &mut rng).unwrap().0 as u64
            })
            .sum();
        let freq = ones as f64 / shots as f64;
        let sigma = (0.25 / shots as f64).sqrt();
        assert!((freq - 0.5).abs() <= 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn postselect_paths() {
        let mut certain = rails(0, 1);
        assert_eq!(postselect(&mut certain, ModeId(1), 1).unwrap(), 1.0);
        assert_eq!(certain.amplitude_of(&[ModeId(1)]).unwrap(), Complex64::new(1.0, 0.0));
        assert!(matches!(
            postselect(&mut certain, ModeId(0), 1),
            Err(SimError::ZeroProbability { .. })
        ));

        let mut half = balanced();
        let p = postselect(&mut half, ModeId(0), 1).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!((half.amplitude_of(&[ModeId(0)]).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detect_on_fully_lost_state_fails() {
        let mut s = rails(1, 0);
        s.mark_lost();
        let mut rng = ShotRng::new(0);
        assert_eq!(detect(&mut s, ModeId(0), &mut rng), Err(SimError::AllMassLost));
    }

    #[test]
    fn sampler_replays_bit_for_bit() {
        let run = |seed| {
            let mut s = balanced();
            let mut extra = balanced();
            let mut sampler = Sampler::new(seed, 5);
            sampler.detect(&mut s, ModeId(0)).unwrap();
            sampler.detect(&mut extra, ModeId(1)).unwrap();
            sampler.finish(&s)
        };
        assert_eq!(run(77), run(77));
        let distinct = (0..32).map(run).collect::<Vec<_>>();
        assert!(distinct.iter().any(|r| r.outcomes != distinct[0].outcomes));
    }

    #[test]
    fn shot_streams_differ() {
        let mut a = ShotRng::for_shot(9, 0);
        let mut b = ShotRng::for_shot(9, 1);
        assert_ne!(a.next_u64(), b.next_u64());
        let mut c = ShotRng::for_shot(9, 1);
        let mut d = ShotRng::for_shot(9, 1);
        assert_eq!(c.next_u64(), d.next_u64());
    }
}
