//! Random inputs shared by the checks: mixed-scale sparse vectors, laws and
//! step functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kruglov::DiscreteDistribution;
use crate::rearrange::DecreasingStep;

/// Generator for trial `index` of a run seeded with `seed`: every trial owns
/// a ChaCha8 stream, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A vector of length in `1..=max_len` whose entries are `exp(U[−6, 2])` with
/// probability 0.7 and zero otherwise; at least one entry is nonzero.
pub fn mixed_scale_vector<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> Vec<f64> {
    let len = rng.gen_range(1..=max_len.max(1));
    mixed_scale_exact(rng, len)
}

/// As [`mixed_scale_vector`] with the length fixed at `len ≥ 1`.
pub fn mixed_scale_exact<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let len = len.max(1);
    let mut x: Vec<f64> =
        (0..len).map(|_| if rng.gen_bool(0.7) { rng.gen_range(-6.0f64..2.0).exp() } else { 0.0 }).collect();
    if x.iter().all(|&v| v == 0.0) {
        let i = rng.gen_range(0..len);
        x[i] = rng.gen_range(-6.0f64..2.0).exp();
    }
    x
}

/// A probability law with `atoms` values in `[lo, hi)` and random masses.
pub fn random_law<R: Rng + ?Sized>(rng: &mut R, atoms: usize, lo: f64, hi: f64) -> DiscreteDistribution {
    let raw: Vec<(f64, f64)> = (0..atoms.max(1)).map(|_| (rng.gen_range(lo..hi), rng.gen_range(0.05..1.0))).collect();
    let total: f64 = raw.iter().map(|a| a.1).sum();
    DiscreteDistribution::new(raw.into_iter().map(|(v, m)| (v, m / total)).collect()).expect("normalized masses")
}

/// A symmetric law: `±v` with equal masses for `atoms` random magnitudes.
pub fn random_symmetric_law<R: Rng + ?Sized>(rng: &mut R, atoms: usize, hi: f64) -> DiscreteDistribution {
    let half = random_law(rng, atoms, 0.0, hi);
    let mut pts: Vec<(f64, f64)> = half.atoms().iter().map(|&(v, m)| (v, m / 2.0)).collect();
    pts.extend(half.atoms().iter().map(|&(v, m)| (-v, m / 2.0)));
    DiscreteDistribution::new(pts).expect("normalized masses")
}

/// A decreasing step function with `plateaus` pieces, lengths normalized to `total`.
pub fn random_step<R: Rng + ?Sized>(rng: &mut R, plateaus: usize, total: f64) -> DecreasingStep {
    let raw: Vec<(f64, f64)> =
        (0..plateaus.max(1)).map(|_| (rng.gen_range(0.05..1.0), rng.gen_range(-3.0f64..2.0).exp())).collect();
    let sum: f64 = raw.iter().map(|a| a.0).sum();
    DecreasingStep::from_plateaus(raw.into_iter().map(|(l, v)| (l * total / sum, v))).expect("valid pieces")
}
