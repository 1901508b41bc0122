//! Discrete laws and the classical Kruglov transform.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinat::{poisson1_pmf, poisson1_tail};
use crate::error::{Error, Result};
use crate::rearrange::{dilate_continuous, pointwise_sum, submajorization_gap, DecreasingStep};
use crate::report::{BandSource, ReportBuilder, VerificationReport};
use crate::sampling::trial_rng;

/// Atoms whose values differ by at most this (relative to max(1, |v|)) are merged.
pub const VALUE_TOL: f64 = 1e-12;

/// Largest number of atoms any intermediate law may have.
pub const ATOM_CAP: usize = 1_000_000;

/// Default truncation order of the Poisson mixture.
pub const DEFAULT_KMAX: usize = 20;

/// A finitely supported law: atoms `(value, mass)` sorted by value, with
/// total mass at most 1. Missing mass sits at 0.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "LawJson", into = "LawJson")]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LawJson {
    atoms: Vec<[f64; 2]>,
}

impl TryFrom<LawJson> for DiscreteDistribution {
    type Error = Error;
    fn try_from(j: LawJson) -> Result<Self> {
        Self::new(j.atoms.into_iter().map(|[v, m]| (v, m)).collect())
    }
}

impl From<DiscreteDistribution> for LawJson {
    fn from(d: DiscreteDistribution) -> Self {
        LawJson { atoms: d.atoms.into_iter().map(|(v, m)| [v, m]).collect() }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= VALUE_TOL * a.abs().max(b.abs()).max(1.0)
}

impl DiscreteDistribution {
    /// Validates masses (positive, total ≤ 1 + 1e-12) and merges close values.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(v, m) in &atoms {
            if !v.is_finite() {
                return Err(Error::Malformed(format!("atom value {v} is not finite")));
            }
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::Malformed(format!("atom mass {m} is not positive")));
            }
        }
        let d = Self::merged(atoms);
        let total = d.total_mass();
        if total > 1.0 + 1e-12 {
            return Err(Error::Malformed(format!("total mass {total} exceeds 1")));
        }
        Ok(d)
    }

    /// Sorts and merges without validation.
    pub(crate) fn merged(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.retain(|a| a.1 > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, m) in atoms {
            match out.last_mut() {
                Some(last) if close(last.0, v) => last.1 += m,
                _ => out.push((v, m)),
            }
        }
        Self { atoms: out }
    }

    pub fn dirac(v: f64) -> Self {
        Self { atoms: vec![(v, 1.0)] }
    }

    /// Uniform law on the given values (repeats add up).
    pub fn uniform(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("uniform law needs at least one value".into()));
        }
        let m = 1.0 / values.len() as f64;
        Self::new(values.iter().map(|&v| (v, m)).collect())
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// The same law with its missing mass placed at 0.
    pub fn completed(&self) -> Self {
        let deficit = 1.0 - self.total_mass();
        if deficit <= 0.0 {
            return self.clone();
        }
        let mut atoms = self.atoms.clone();
        atoms.push((0.0, deficit));
        Self::merged(atoms)
    }

    /// True when every nonzero value is approximately zero.
    pub fn is_dirac_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.0 == 0.0)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, m)| v * m).sum()
    }

    pub fn moment(&self, k: i32) -> f64 {
        self.atoms.iter().map(|&(v, m)| v.powi(k) * m).sum()
    }

    /// `Σ m_j e^{i t v_j}` (the missing mass contributes `1 − Σ m_j`).
    pub fn charfn(&self, t: f64) -> Complex64 {
        let deficit = (1.0 - self.total_mass()).max(0.0);
        self.atoms.iter().map(|&(v, m)| Complex64::from_polar(m, t * v)).sum::<Complex64>() + deficit
    }

    /// `P(X ≤ x)`, with values within tolerance of `x` counted as equal.
    pub fn cdf(&self, x: f64) -> f64 {
        let lim = x + VALUE_TOL * x.abs().max(1.0);
        let idx = self.atoms.partition_point(|a| a.0 <= lim);
        let deficit = (1.0 - self.total_mass()).max(0.0);
        self.atoms[..idx].iter().map(|a| a.1).sum::<f64>() + if lim >= 0.0 { deficit } else { 0.0 }
    }

    /// Law of `|X|` as a decreasing function on (0, total mass).
    pub fn abs_rearrangement(&self) -> DecreasingStep {
        DecreasingStep::canonical(self.atoms.iter().map(|&(v, m)| (m, v.abs())).collect())
    }

    /// Convolution of two laws, treating missing mass as an atom at 0.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        let (a, b) = (self.completed(), other.completed());
        let pairs = a.len().saturating_mul(b.len());
        if pairs > ATOM_CAP.saturating_mul(64) {
            return Err(Error::AtomExplosion { count: pairs, cap: ATOM_CAP });
        }
        let mut out = Vec::with_capacity(pairs);
        for &(u, p) in &a.atoms {
            for &(v, q) in &b.atoms {
                out.push((u + v, p * q));
            }
        }
        let d = Self::merged(out);
        if d.len() > ATOM_CAP {
            return Err(Error::AtomExplosion { count: d.len(), cap: ATOM_CAP });
        }
        Ok(d)
    }

    /// Inversion sampler for the completed law.
    pub fn sampler(&self) -> Sampler {
        let mut acc = 0.0;
        let cum = self
            .completed()
            .atoms
            .iter()
            .map(|&(v, m)| {
                acc += m;
                (v, acc)
            })
            .collect();
        Sampler { cum }
    }
}

/// Draws values from a discrete law by inverting its cumulative masses.
#[derive(Clone, Debug)]
pub struct Sampler {
    cum: Vec<(f64, f64)>,
}

impl Sampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let idx = self.cum.partition_point(|c| c.1 <= u);
        self.cum.get(idx).or(self.cum.last()).map_or(0.0, |c| c.0)
    }
}

/// Output of [`kruglov_exact`]: the truncated mixture and the mass it omits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KruglovLaw {
    pub law: DiscreteDistribution,
    pub tail_mass: f64,
    pub kmax: usize,
}

/// `Σ_{n ≤ kmax} e^{-1}/n! · law^{*n}`.
pub fn kruglov_exact(law: &DiscreteDistribution, kmax: usize) -> Result<KruglovLaw> {
    if kmax == 0 {
        return Err(Error::InvalidArgument("kmax must be at least 1".into()));
    }
    let law = law.completed();
    let weights = poisson1_pmf(kmax);
    let mut power = DiscreteDistribution::dirac(0.0);
    let mut mix: Vec<(f64, f64)> = vec![(0.0, weights[0])];
    for &w in &weights[1..] {
        power = power.convolve(&law)?;
        mix.extend(power.atoms().iter().map(|&(v, m)| (v, m * w)));
    }
    let out = DiscreteDistribution::merged(mix);
    if out.len() > ATOM_CAP {
        return Err(Error::AtomExplosion { count: out.len(), cap: ATOM_CAP });
    }
    Ok(KruglovLaw { law: out, tail_mass: poisson1_tail(kmax), kmax })
}

/// `exp(Σ_j m_j (e^{i t v_j} − 1))`.
pub fn kruglov_charfn(law: &DiscreteDistribution, t: f64) -> Complex64 {
    let s: Complex64 = law.atoms().iter().map(|&(v, m)| m * (Complex64::from_polar(1.0, t * v) - 1.0)).sum();
    s.exp()
}

/// Empirical law of `trials` samples of `Σ_{j ≤ N} X_j`, `N ~ Poisson(1)`.
/// Trial `i` uses its own ChaCha8 stream `i` under `seed`, so the result does
/// not depend on thread scheduling.
pub fn kruglov_mc(law: &DiscreteDistribution, seed: u64, trials: u64) -> Result<DiscreteDistribution> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut samples = kruglov_samples(law, seed, trials);
    samples.sort_by(f64::total_cmp);
    let mut counts: Vec<(f64, u64)> = Vec::new();
    for v in samples {
        match counts.last_mut() {
            Some(last) if close(last.0, v) => last.1 += 1,
            _ => counts.push((v, 1)),
        }
    }
    Ok(DiscreteDistribution { atoms: counts.into_iter().map(|(v, c)| (v, c as f64 / trials as f64)).collect() })
}

/// Raw Monte Carlo samples behind [`kruglov_mc`].
pub fn kruglov_samples(law: &DiscreteDistribution, seed: u64, trials: u64) -> Vec<f64> {
    let sampler = law.sampler();
    let pois = poisson1_cdf();
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let u: f64 = rng.gen();
            let n = pois.partition_point(|&c| c <= u);
            (0..n).fold(0.0, |acc, _| acc + sampler.sample(&mut rng))
        })
        .collect()
}

/// Cumulative Poisson(1) probabilities up to the point where they reach 1.
fn poisson1_cdf() -> Vec<f64> {
    let mut acc = 0.0;
    poisson1_pmf(30)
        .into_iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

/// `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_distance(a: &DiscreteDistribution, b: &DiscreteDistribution) -> f64 {
    let mut xs: Vec<f64> = a.atoms().iter().chain(b.atoms()).map(|x| x.0).collect();
    xs.push(0.0);
    xs.into_iter().map(|x| (a.cdf(x) - b.cdf(x)).abs()).fold(0.0, f64::max)
}

/// Number of terms in the dilation majorant.
pub const MAJ_TERMS: usize = 40;

/// `Σ_{n=1}^{terms} n · D_{1/(e·n!)} μ(x)`.
pub fn maj_majorant(x: &DecreasingStep, terms: usize) -> DecreasingStep {
    let weights = poisson1_pmf(terms);
    let parts: Vec<DecreasingStep> = (1..=terms)
        .filter(|&n| weights[n] > 0.0)
        .map(|n| dilate_continuous(&x.scale(n as f64), weights[n]).expect("positive dilation"))
        .collect();
    pointwise_sum(&parts)
}

/// Checks `μ(Kx) ≺≺ Σ_{n ≤ 40} n·D_{1/(e·n!)}μ(x)` for the law of x.
pub fn maj_bound_check(law: &DiscreteDistribution, kmax: usize) -> Result<VerificationReport> {
    let k = kruglov_exact(law, kmax)?;
    let lhs = k.law.abs_rearrangement();
    let rhs = maj_majorant(&law.abs_rearrangement(), MAJ_TERMS);
    let tol = 1e-12 * lhs.l1_norm().max(1.0);
    let mut b = ReportBuilder::new("maj-bound")
        .param("kmax", kmax)
        .param("terms", MAJ_TERMS)
        .inputs(law)
        .bound(tol)
        .tail_mass(k.tail_mass)
        .band(0.0, 0.0, BandSource::Stated);
    b.deviation(submajorization_gap(&rhs, &lhs));
    b.note("left side omits the Poisson tail beyond kmax, which only lowers its partial integrals");
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn law(atoms: &[(f64, f64)]) -> DiscreteDistribution {
        DiscreteDistribution::new(atoms.to_vec()).unwrap()
    }

    #[test]
    fn poisson_from_dirac_one() {
        let k = kruglov_exact(&DiscreteDistribution::dirac(1.0), 20).unwrap();
        assert_eq!(k.law.len(), 21);
        let mut w = (-1.0f64).exp();
        for (n, &(v, m)) in k.law.atoms().iter().enumerate() {
            if n > 0 {
                w /= n as f64;
            }
            assert_eq!(v, n as f64);
            assert!((m - w).abs() <= 1e-14);
        }
        assert!(k.tail_mass < 1e-19);
    }

    #[test]
    fn dirac_zero_is_fixed() {
        let k = kruglov_exact(&DiscreteDistribution::dirac(0.0), 20).unwrap();
        assert_eq!(k.law.len(), 1);
        assert_eq!(k.law.atoms()[0].0, 0.0);
        assert!((k.law.atoms()[0].1 + k.tail_mass - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_law_stays_symmetric() {
        let k = kruglov_exact(&law(&[(1.0, 0.5), (-1.0, 0.5)]), 20).unwrap();
        let atoms = k.law.atoms();
        let n = atoms.len();
        for i in 0..n {
            let (v, m) = atoms[i];
            let (w, q) = atoms[n - 1 - i];
            assert!((v + w).abs() < 1e-12);
            assert!((m - q).abs() < 1e-15);
        }
    }

    #[test]
    fn kmax_zero_rejected() {
        assert!(kruglov_exact(&DiscreteDistribution::dirac(1.0), 0).is_err());
    }

    #[test]
    fn atom_explosion_guard() {
        let vals: Vec<f64> = (0..40).map(|i| (i as f64 * 0.7368).sin() + i as f64 * std::f64::consts::PI).collect();
        let err = kruglov_exact(&DiscreteDistribution::uniform(&vals).unwrap(), 20).unwrap_err();
        assert!(matches!(err, Error::AtomExplosion { .. }));
    }

    #[test]
    fn json_law() {
        let d: DiscreteDistribution = serde_json::from_str(r#"{"atoms":[[1,0.25],[-1,0.25],[1,0.5]]}"#).unwrap();
        assert_eq!(d.atoms(), &[(-1.0, 0.25), (1.0, 0.75)]);
        assert!(serde_json::from_str::<DiscreteDistribution>(r#"{"atoms":[[1,0.7],[2,0.7]]}"#).is_err());
        assert!(serde_json::from_str::<DiscreteDistribution>(r#"{"atoms":[[1,-0.1]]}"#).is_err());
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"atoms":[[-1.0,0.25],[1.0,0.75]]}"#);
    }

    #[test]
    fn charfn_closed_form() {
        let d = DiscreteDistribution::dirac(1.0);
        for t in [0.0, 0.3, 2.0] {
            let expect = (Complex64::from_polar(1.0, t) - 1.0).exp();
            assert!((kruglov_charfn(&d, t) - expect).norm() < 1e-15);
        }
        assert_eq!(kruglov_charfn(&law(&[(2.0, 0.3), (-1.0, 0.2)]), 0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn charfn_matches_exact_mixture() {
        let d = law(&[(0.5, 0.2), (-1.5, 0.3), (2.0, 0.5)]);
        let k = kruglov_exact(&d, 20).unwrap();
        for i in 0..=40 {
            let t = -4.0 + 0.2 * i as f64;
            let emp = k.law.charfn(t) - k.tail_mass; // charfn() fills missing mass at 0
            assert!((emp - kruglov_charfn(&d, t)).norm() <= k.tail_mass + 1e-10);
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_close() {
        let d = DiscreteDistribution::dirac(1.0);
        let a = kruglov_mc(&d, 7, 20_000).unwrap();
        let b = kruglov_mc(&d, 7, 20_000).unwrap();
        assert_eq!(a, b);
        let c = kruglov_mc(&d, 8, 20_000).unwrap();
        assert_ne!(a, c);
        let exact = kruglov_exact(&d, 20).unwrap().law;
        assert!(ks_distance(&a, &exact) < 0.02);
        let z = kruglov_mc(&DiscreteDistribution::dirac(0.0), 1, 100).unwrap();
        assert_eq!(z.atoms(), &[(0.0, 1.0)]);
    }

    #[test]
    fn ks_distance_examples() {
        let a = DiscreteDistribution::dirac(0.0);
        let b = DiscreteDistribution::dirac(1.0);
        assert_eq!(ks_distance(&a, &b), 1.0);
        assert_eq!(ks_distance(&a, &a), 0.0);
    }

    #[test]
    fn majorization_examples() {
        for d in [
            DiscreteDistribution::dirac(1.0),
            DiscreteDistribution::uniform(&[0.2, 0.4, 0.6, 0.8, 1.0]).unwrap(),
            DiscreteDistribution::dirac(0.0),
        ] {
            let r = maj_bound_check(&d, 20).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    fn law_strategy(positive: bool) -> impl Strategy<Value = DiscreteDistribution> {
        let lo = if positive { 0.0 } else { -3.0 };
        prop::collection::vec((lo..3.0f64, 0.05f64..1.0), 1..4).prop_map(|atoms| {
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            DiscreteDistribution::new(atoms.into_iter().map(|(v, m)| (v, m / total)).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn positivity_preserved(d in law_strategy(true)) {
            let k = kruglov_exact(&d, 20).unwrap();
            prop_assert!(k.law.atoms().iter().all(|a| a.0 >= 0.0));
        }

        #[test]
        fn symmetry_preserved(d in law_strategy(false)) {
            let mut atoms: Vec<(f64, f64)> = d.atoms().iter().map(|&(v, m)| (v, m / 2.0)).collect();
            atoms.extend(d.atoms().iter().map(|&(v, m)| (-v, m / 2.0)));
            let sym = DiscreteDistribution::new(atoms).unwrap();
            let k = kruglov_exact(&sym, 12).unwrap();
            for t in [0.3, 1.1, 2.7] {
                prop_assert!(k.law.charfn(t).im.abs() < 1e-12);
            }
        }

        #[test]
        fn equimeasurable_inputs_agree(d in law_strategy(false)) {
            // the same law presented in a different atom order
            let mut atoms = d.atoms().to_vec();
            atoms.reverse();
            let e = DiscreteDistribution::new(atoms).unwrap();
            prop_assert_eq!(kruglov_exact(&d, 12).unwrap(), kruglov_exact(&e, 12).unwrap());
        }

        #[test]
        fn mean_preserved(d in law_strategy(false)) {
            let k = kruglov_exact(&d, 20).unwrap();
            let bound = k.tail_mass * 100.0 * d.atoms().iter().map(|a| a.0.abs()).fold(0.0, f64::max) + 1e-12;
            prop_assert!((k.law.mean() - d.mean()).abs() <= bound);
        }

        #[test]
        fn second_moment_identity(d in law_strategy(true)) {
            let k = kruglov_exact(&d, 20).unwrap();
            let expect = d.moment(2) + d.mean().powi(2);
            prop_assert!((k.law.moment(2) - expect).abs() <= 1e-10 * expect.max(1.0));
        }

        #[test]
        fn majorization_holds(d in law_strategy(true)) {
            prop_assert!(maj_bound_check(&d, 20).unwrap().pass);
        }
    }
}
