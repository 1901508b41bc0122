//! Two-sided estimates checked numerically: exact enumeration where the
//! sample space is small, seeded Monte Carlo otherwise.

use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinat::{factorial, permutations, poisson1_pmf};
use crate::error::{Error, Result};
use crate::kruglov::distribution::MAJ_TERMS;
use crate::kruglov::{kruglov_exact, DiscreteDistribution};
use crate::matrix::{random_hermitian, CMatrix};
use crate::orlicz::{certify_class, lp_plus_l2_kfunc, luxemburg_fn_norm, luxemburg_seq_norm, make_mny, OrliczFunction};
use crate::rearrange::{dilate_discrete, direct_sum, singular_values, DecreasingStep, TraceMode};
use crate::report::{BandSource, ReportBuilder, VerificationReport};
use crate::sampling::{mixed_scale_exact, mixed_scale_vector, random_symmetric_law, trial_rng};

/// Largest n for permutation enumeration.
pub const KWS_MAX_N: usize = 7;
/// Largest n for sign enumeration.
pub const RADEMACHER_MAX_N: usize = 12;
/// Largest m for the `m^m` enumeration.
pub const JUNGE_MAX_M: usize = 5;
/// Relative spread tolerated by report-only stability checks.
pub const STABILITY_TOL: f64 = 0.10;

/// Seed for cell `cell` of a sweep run under `seed`.
fn cell_seed(seed: u64, cell: u64) -> u64 {
    seed ^ cell.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn sorted_abs(x: &[f64]) -> Vec<f64> {
    let mut mu: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    mu
}

/// `Σ_{k<n} μ(k,x) + n^{1−1/q}(Σ_{k≥n} μ^q(k,x))^{1/q}`.
pub fn first_orlicz_functional(x: &[f64], n: usize, q: f64) -> f64 {
    let mu = sorted_abs(x);
    let head: f64 = mu.iter().take(n).sum();
    let tail: f64 = mu.iter().skip(n).map(|v| v.powf(q)).sum();
    head + (n as f64).powf(1.0 - 1.0 / q) * tail.powf(1.0 / q)
}

/// `S(x)/‖x‖_{l_{M_n}} ∈ [¼, 4]` on `trials` random x of length up to 4n.
pub fn check_first_orlicz(n: usize, q: f64, trials: usize, seed: u64) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let m = OrliczFunction::mn(q, n as u64)?;
    let ratios: Vec<Option<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let x = mixed_scale_vector(&mut trial_rng(seed, i), 4 * n);
            let norm = luxemburg_seq_norm(&m, &x);
            (norm > 0.0).then(|| first_orlicz_functional(&x, n, q) / norm)
        })
        .collect();
    let mut b = ReportBuilder::new("first-orlicz")
        .param("n", n)
        .param("q", q)
        .param("trials", trials)
        .inputs(&m)
        .seed(seed)
        .band(0.25, 4.0, BandSource::Stated);
    ratios.into_iter().flatten().for_each(|r| b.observe(r));
    Ok(b.finish())
}

/// `(1/n!) Σ_ρ (Σ_k x²(ρ(k)) y²(k))^{p/2}` over all permutations of n points.
pub fn kws_average(x: &[f64], y: &[f64], p: f64) -> Result<f64> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::InvalidArgument(format!("x has length {n}, y has length {}", y.len())));
    }
    if n == 0 || n > KWS_MAX_N {
        return Err(Error::InvalidArgument(format!("n = {n} outside 1..={KWS_MAX_N}")));
    }
    let (x2, y2): (Vec<f64>, Vec<f64>) = (x.iter().map(|v| v * v).collect(), y.iter().map(|v| v * v).collect());
    let total: f64 = permutations(n)
        .iter()
        .map(|rho| rho.iter().zip(&y2).map(|(&r, &w)| x2[r] * w).sum::<f64>().powf(p / 2.0))
        .sum();
    Ok(total / factorial(n))
}

/// The permutation average over `‖y‖_p^p ‖x‖^p_{l_{M_{n,y}}}`, with
/// `M_{n,y}(t)` replaced by `M_{n,y}(c t)` for `c = corruption` (1 for the
/// true function). `None` when x vanishes.
pub fn kws_ratio(x: &[f64], y: &[f64], p: f64, corruption: f64) -> Result<Option<f64>> {
    let avg = kws_average(x, y, p)?;
    let m = make_mny(p, x.len() as u64, y)?;
    let norm = luxemburg_seq_norm(&m, x);
    if norm == 0.0 {
        return Ok(None);
    }
    // the Luxemburg norm for M(c·) is the norm for M divided by c
    let norm = norm / corruption;
    let yp: f64 = y.iter().map(|v| v.abs().powf(p)).sum();
    Ok(Some(avg / (yp * norm.powf(p))))
}

fn kws_builder(name: &str, n: usize, p: f64) -> ReportBuilder {
    let nf = n as f64;
    ReportBuilder::new(name).param("n", n).param("p", p).band(1.0 / (80.0 * nf), 16.0 / nf, BandSource::Stated)
}

/// Band check for one pair (x, y).
pub fn check_kws(p: f64, y: &[f64], x: &[f64]) -> Result<VerificationReport> {
    let mut b = kws_builder("kws", x.len(), p).inputs(&(x, y));
    if let Some(r) = kws_ratio(x, y, p, 1.0)? {
        b.observe(r);
    }
    Ok(b.finish())
}

fn kws_pairs(n: usize, trials: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    (0..trials as u64)
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let x = mixed_scale_exact(&mut rng, n);
            let y = mixed_scale_exact(&mut rng, n);
            (x, y)
        })
        .collect()
}

/// Band check over `trials` random pairs in one (n, p) cell.
pub fn check_kws_random(n: usize, p: f64, trials: usize, seed: u64) -> Result<VerificationReport> {
    kws_random_with(n, p, trials, seed, 1.0)
}

fn kws_random_with(n: usize, p: f64, trials: usize, seed: u64, corruption: f64) -> Result<VerificationReport> {
    let name = if corruption == 1.0 { "kws" } else { "kws-corrupted" };
    let pairs = kws_pairs(n, trials, seed);
    let ratios = pairs.par_iter().map(|(x, y)| kws_ratio(x, y, p, corruption)).collect::<Result<Vec<_>>>()?;
    let mut b = kws_builder(name, n, p).param("trials", trials).inputs(&pairs).seed(seed);
    if corruption != 1.0 {
        b = b.param("corruption", corruption);
    }
    ratios.into_iter().flatten().for_each(|r| b.observe(r));
    Ok(b.finish())
}

/// Reruns a kws sweep with `M_{n,y}(t)` replaced by `M_{n,y}(c t)` in every
/// cell. Passes when the corrupted function is caught, i.e. when at least one
/// cell leaves the band.
pub fn kws_negative_control(
    ns: &[usize],
    ps: &[f64],
    trials: usize,
    seed: u64,
    corruption: f64,
) -> Result<VerificationReport> {
    let mut caught = Vec::new();
    let mut cells = 0;
    let mut b = ReportBuilder::new("kws-negative-control")
        .param("corruption", corruption)
        .param("trials", trials)
        .seed(seed)
        .band(0.0, 0.0, BandSource::Identity);
    for (ci, (&n, &p)) in ns.iter().flat_map(|n| ps.iter().map(move |p| (n, p))).enumerate() {
        let r = kws_random_with(n, p, trials, cell_seed(seed, ci as u64), corruption)?;
        b.count();
        cells += 1;
        if !r.pass {
            caught.push(format!("n={n} p={p}: ratios [{:?}, {:?}]", r.ratio_min, r.ratio_max));
        }
    }
    if caught.is_empty() {
        b.fail("corrupted function stayed inside the band in every cell");
    } else {
        b.note(format!("band violated in {} of {cells} cells", caught.len()));
        caught.into_iter().for_each(|c| b.note(c));
    }
    Ok(b.finish())
}

fn schatten(a: &CMatrix, p: f64) -> Result<f64> {
    Ok(singular_values(a, TraceMode::Counting)?.lp_norm(p))
}

/// Exact sign average for Hermitian `A_0..A_{n−1}` in the Schatten class S_p:
/// `(2^{−n} Σ_ε ‖Σ ε_k A_k‖_p^p)^{1/p} ≤ (Σ ‖A_k‖_p^p)^{1/p}` (pass/fail),
/// and the ratio of the middle term to `(Σ ‖A_k‖_p²)^{1/2}` (report-only).
pub fn check_rademacher(p: f64, mats: &[CMatrix]) -> Result<Vec<VerificationReport>> {
    let n = mats.len();
    if n == 0 || n > RADEMACHER_MAX_N {
        return Err(Error::InvalidArgument(format!("n = {n} outside 1..={RADEMACHER_MAX_N}")));
    }
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} outside [1, 2]")));
    }
    let d = mats[0].rows();
    for a in mats {
        if !a.is_square() || a.rows() != d {
            return Err(Error::InvalidArgument("matrices must be square of one size".into()));
        }
    }
    let norms = mats.iter().map(|a| schatten(a, p)).collect::<Result<Vec<f64>>>()?;
    let terms = (0u64..1 << n)
        .into_par_iter()
        .map(|signs| {
            let mut s = CMatrix::zeros(d, d);
            for (k, a) in mats.iter().enumerate() {
                s.add_assign_scaled(a, if signs >> k & 1 == 1 { -1.0 } else { 1.0 });
            }
            Ok(schatten(&s, p)?.powf(p))
        })
        .collect::<Result<Vec<f64>>>()?;
    let middle = (terms.iter().sum::<f64>() / (1u64 << n) as f64).powf(1.0 / p);
    let right = norms.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p);
    let left = norms.iter().map(|v| v * v).sum::<f64>().sqrt();
    let inputs: Vec<_> = mats.iter().map(CMatrix::to_rows).collect();

    let mut r = ReportBuilder::new("rademacher-right")
        .param("n", n)
        .param("p", p)
        .param("dim", d)
        .inputs(&inputs)
        .band(0.0, 1.0, BandSource::Stated);
    if right > 0.0 {
        r.observe(middle / right);
    }
    let mut l = ReportBuilder::new("rademacher-left").param("n", n).param("p", p).param("dim", d).inputs(&inputs);
    l = l.report_only();
    if left > 0.0 {
        l.observe(middle / left);
    }
    if p == 2.0 {
        let mut e =
            ReportBuilder::new("rademacher-p2-identity").param("n", n).param("dim", d).inputs(&inputs).bound(1e-10);
        e.deviation(if left > 0.0 { (middle - left).abs() / left } else { middle });
        return Ok(vec![r.finish(), l.finish(), e.finish()]);
    }
    Ok(vec![r.finish(), l.finish()])
}

/// `(E|Σ X_k|^p)^{1/p}` by Monte Carlo over independent draws.
pub fn js_left(laws: &[DiscreteDistribution], p: f64, trials: u64, seed: u64) -> f64 {
    let samplers: Vec<_> = laws.iter().map(DiscreteDistribution::sampler).collect();
    let terms: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            samplers.iter().fold(0.0, |acc, s| acc + s.sample(&mut rng)).abs().powf(p)
        })
        .collect();
    (terms.iter().sum::<f64>() / trials as f64).powf(1.0 / p)
}

/// `‖⊕ X_k‖_{L_p+L_2}` from the laws.
pub fn js_right(laws: &[DiscreteDistribution], p: f64) -> f64 {
    let parts: Vec<DecreasingStep> = laws.iter().map(DiscreteDistribution::abs_rearrangement).collect();
    lp_plus_l2_kfunc(&direct_sum(&parts), p)
}

/// `‖Σ X_k‖_p / ‖⊕ X_k‖_{L_p+L_2}` for independent symmetric X_k. Report-only;
/// passes when the ratio moves by less than 10% when the trials double.
pub fn check_js(p: f64, laws: &[DiscreteDistribution], trials: u64, seed: u64) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if !laws.iter().all(is_symmetric) {
        return Err(Error::Precondition("laws must be symmetric".into()));
    }
    let mut b = ReportBuilder::new("js")
        .param("p", p)
        .param("laws", laws.len())
        .param("trials", trials)
        .inputs(laws)
        .seed(seed)
        .report_only();
    let right = js_right(laws, p);
    if right == 0.0 {
        return Ok(b.finish());
    }
    let r1 = js_left(laws, p, trials, seed) / right;
    let r2 = js_left(laws, p, 2 * trials, seed) / right;
    b.observe(r1);
    b.observe(r2);
    let spread = (r2 / r1 - 1.0).abs();
    b.note(format!("ratio {r1} at {trials} trials, {r2} at {} trials", 2 * trials));
    if !(spread < STABILITY_TOL) {
        b.fail(format!("ratio moved by {:.1}% under trial doubling", 100.0 * spread));
    }
    Ok(b.finish())
}

fn is_symmetric(law: &DiscreteDistribution) -> bool {
    let c = law.completed();
    c.atoms().iter().all(|&(v, m)| {
        c.atoms().iter().any(|&(u, w)| (u + v).abs() <= 1e-12 * v.abs().max(1.0) && (m - w).abs() <= 1e-12)
    })
}

/// `Σ_{n ≤ terms} n (e·n!)^{−1/r}`.
pub fn poisson_dilation_constant(r: f64, terms: usize) -> f64 {
    poisson1_pmf(terms).iter().enumerate().skip(1).map(|(n, w)| n as f64 * w.powf(1.0 / r)).sum()
}

/// `‖⊕ K x_k‖_{L_p+L_2} / ‖⊕ x_k‖_{L_p+L_2}` with exact transforms, against
/// `[e^{−1/p}, Σ_{n ≤ 40} n (e·n!)^{−1/2}]`.
pub fn check_modified_ms(p: f64, laws: &[DiscreteDistribution], kmax: usize) -> Result<VerificationReport> {
    let mp = OrliczFunction::mp(p)?;
    let low = (-1.0 / p).exp();
    let high = poisson_dilation_constant(2.0, MAJ_TERMS);
    let mut b = ReportBuilder::new("modified-ms")
        .param("p", p)
        .param("laws", laws.len())
        .param("kmax", kmax)
        .inputs(laws)
        .band(low, high, BandSource::Derived);
    if laws.is_empty() {
        return Ok(b.finish());
    }
    let mut tail = 0.0f64;
    let mut kparts = Vec::with_capacity(laws.len());
    for law in laws {
        let k = kruglov_exact(law, kmax)?;
        tail = tail.max(k.tail_mass);
        kparts.push(k.law.abs_rearrangement());
    }
    b = b.tail_mass(tail);
    let parts: Vec<DecreasingStep> = laws.iter().map(DiscreteDistribution::abs_rearrangement).collect();
    let right = luxemburg_fn_norm(&mp, &direct_sum(&parts));
    if right > 0.0 {
        let r = luxemburg_fn_norm(&mp, &direct_sum(&kparts)) / right;
        b.observe(r);
        let stated = poisson_dilation_constant(p, MAJ_TERMS);
        if r > stated {
            b.note(format!("ratio {r} exceeds the p-scaled constant {stated}"));
        }
    }
    Ok(b.finish())
}

/// `((1/m^m) Σ_ω ‖(α(ω_0), …, α(ω_{m−1}))‖_{l_M}^p)^{1/p}`.
pub fn junge_lhs(m_fn: &OrliczFunction, alpha: &[f64], p: f64) -> Result<f64> {
    let m = alpha.len();
    if m == 0 || m > JUNGE_MAX_M {
        return Err(Error::InvalidArgument(format!("m = {m} outside 1..={JUNGE_MAX_M}")));
    }
    let points = m.pow(m as u32);
    let total: f64 = (0..points)
        .into_par_iter()
        .map(|mut w| {
            let v: Vec<f64> = (0..m)
                .map(|_| {
                    let a = alpha[w % m];
                    w /= m;
                    a
                })
                .collect();
            luxemburg_seq_norm(m_fn, &v).powf(p)
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok((total / points as f64).powf(1.0 / p))
}

/// Ratio of the enumerated left side to `‖α‖_∞ + ‖α‖_{l_M}` over the given
/// α. Report-only; passes when the mean ratios of the two halves of the input
/// list agree to within 10%.
pub fn check_junge_pos(p: f64, m_fn: &OrliczFunction, alphas: &[Vec<f64>]) -> Result<VerificationReport> {
    let mut b = ReportBuilder::new("junge-pos")
        .param("p", p)
        .param("M", m_fn.label())
        .param("inputs", alphas.len())
        .inputs(alphas)
        .report_only();
    let mut ratios = Vec::with_capacity(alphas.len());
    for a in alphas {
        let denom = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) + luxemburg_seq_norm(m_fn, a);
        if denom > 0.0 {
            let r = junge_lhs(m_fn, a, p)? / denom;
            b.observe(r);
            ratios.push(r);
        }
    }
    if ratios.len() >= 2 {
        let (first, second) = ratios.split_at(ratios.len() / 2);
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (a, c) = (mean(first), mean(second));
        b.note(format!("batch means {a} and {c}"));
        if !((c / a - 1.0).abs() < STABILITY_TOL) {
            b.fail(format!("batch means differ by {:.1}%", 100.0 * (c / a - 1.0).abs()));
        }
    }
    Ok(b.finish())
}

/// `‖Σ_{j<k} e_j‖_{l_M} = 1/M⁻¹(1/k)`.
fn block_norm(m: &OrliczFunction, k: usize) -> Result<f64> {
    Ok(1.0 / m.inverse(1.0 / k as f64)?)
}

/// Best constants in `c n^{1/q} ≤ ‖Σ_{j<nm} e_j‖/‖Σ_{j<m} e_j‖ ≤ C n^{1/p}`
/// over n, m up to the limits: `[upper, lower]`. For certified M in the
/// (p, q) class the bands are C ≤ 1 and c ≥ 1; otherwise both are report-only.
pub fn check_upper_lower_estimates(
    m: &OrliczFunction,
    p: f64,
    q: f64,
    n_max: usize,
    m_max: usize,
) -> Result<Vec<VerificationReport>> {
    if n_max == 0 || m_max == 0 {
        return Err(Error::InvalidArgument("limits must be at least 1".into()));
    }
    let certified = certify_class(m, p, q).is_ok();
    let mut up = ReportBuilder::new("upper-p-estimate").param("M", m.label()).param("p", p).inputs(m.spec());
    let mut lo = ReportBuilder::new("lower-q-estimate").param("M", m.label()).param("q", q).inputs(m.spec());
    if certified {
        up = up.band(0.0, 1.0, BandSource::Derived);
        lo = lo.band(1.0, f64::INFINITY, BandSource::Derived);
    } else {
        up = up.report_only();
        lo = lo.report_only();
        up.note("M is not certified in the class; constants recorded only");
        lo.note("M is not certified in the class; constants recorded only");
    }
    for n in 1..=n_max {
        for k in 1..=m_max {
            let r = block_norm(m, n * k)? / block_norm(m, k)?;
            up.observe(r / (n as f64).powf(1.0 / p));
            lo.observe(r / (n as f64).powf(1.0 / q));
        }
    }
    Ok(vec![up.finish(), lo.finish()])
}

/// `‖D_n x‖_p / ‖x‖_p = n^{1/p}` for random x and every n up to `n_max`.
pub fn check_dilation_norms(p: f64, n_max: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must be positive")));
    }
    let mut b = ReportBuilder::new("dilation-norm")
        .param("p", p)
        .param("n_max", n_max)
        .param("trials", trials)
        .seed(seed)
        .bound(1e-12);
    let lp = |x: &[f64]| x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
    for i in 0..trials as u64 {
        let x = mixed_scale_vector(&mut trial_rng(seed, i), 32);
        for n in 1..=n_max {
            let expect = (n as f64).powf(1.0 / p);
            let r = lp(&dilate_discrete(&x, n)?) / lp(&x);
            b.deviation((r - expect).abs() / expect);
        }
    }
    Ok(b.finish())
}

/// Named groups of checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    FirstOrlicz,
    Kws,
    Rademacher,
    Js,
    ModifiedMs,
    JungePos,
    Estimates,
    Dilation,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::FirstOrlicz,
        Suite::Kws,
        Suite::Rademacher,
        Suite::Js,
        Suite::ModifiedMs,
        Suite::JungePos,
        Suite::Estimates,
        Suite::Dilation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::FirstOrlicz => "first-orlicz",
            Suite::Kws => "kws",
            Suite::Rademacher => "rademacher",
            Suite::Js => "js",
            Suite::ModifiedMs => "modified-ms",
            Suite::JungePos => "junge-pos",
            Suite::Estimates => "estimates",
            Suite::Dilation => "dilation",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

/// Knobs shared by the suites. `trials` overrides each suite's default count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub trials: Option<usize>,
    pub kmax: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: 0, trials: None, kmax: crate::kruglov::DEFAULT_KMAX }
    }
}

/// Dilation of the argument of `M_{n,y}` in the kws negative control.
pub const KWS_CORRUPTION: f64 = 10.0;

/// Runs a suite with its default parameter sweep.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let trials = |d: usize| opts.trials.unwrap_or(d);
    let seed = opts.seed;
    let mut out = Vec::new();
    match suite {
        Suite::All => {
            for s in Suite::EACH {
                out.extend(run_suite(s, opts)?);
            }
        }
        Suite::FirstOrlicz => {
            let mut cell = 0;
            for n in [1, 2, 4, 8, 16] {
                for q in [1.0, 1.5, 2.0] {
                    out.push(check_first_orlicz(n, q, trials(200), cell_seed(seed, cell))?);
                    cell += 1;
                }
            }
        }
        Suite::Kws => {
            let (ns, ps) = ((2..=KWS_MAX_N).collect::<Vec<_>>(), [1.0, 1.5, 2.0]);
            let mut cell = 0;
            for &n in &ns {
                for p in ps {
                    out.push(check_kws_random(n, p, trials(50), cell_seed(seed, cell))?);
                    cell += 1;
                }
            }
            out.push(kws_negative_control(&ns, &ps, trials(50), seed, KWS_CORRUPTION)?);
        }
        Suite::Rademacher => {
            for (i, p) in [1.0, 1.5, 2.0].into_iter().enumerate() {
                for f in 0..trials(5) as u64 {
                    let mut rng = trial_rng(cell_seed(seed, i as u64), f);
                    let mats: Vec<CMatrix> = (0..6).map(|_| random_hermitian(4, &mut rng)).collect();
                    out.extend(check_rademacher(p, &mats)?);
                }
            }
        }
        Suite::Js => {
            let rad: Vec<DiscreteDistribution> = (1..=8)
                .map(|k| {
                    let a = 1.0 / k as f64;
                    DiscreteDistribution::new(vec![(-a, 0.5), (a, 0.5)]).expect("valid law")
                })
                .collect();
            let js_trials = trials(100_000) as u64;
            out.push(check_js(1.0, &rad, js_trials, seed)?);
            let mut rng = trial_rng(seed, u64::MAX);
            let mixed: Vec<DiscreteDistribution> = (0..5).map(|_| random_symmetric_law(&mut rng, 3, 2.0)).collect();
            out.push(check_js(1.5, &mixed, js_trials, cell_seed(seed, 1))?);
        }
        Suite::ModifiedMs => {
            let mut rng = trial_rng(seed, 0);
            let laws: Vec<DiscreteDistribution> = (0..5)
                .map(|i| {
                    if i % 2 == 0 {
                        random_symmetric_law(&mut rng, 2, 3.0)
                    } else {
                        crate::sampling::random_law(&mut rng, 3, 0.0, 2.0)
                    }
                })
                .collect();
            for p in [1.0, 1.5] {
                out.push(check_modified_ms(p, &laws, opts.kmax)?);
            }
        }
        Suite::JungePos => {
            let m = OrliczFunction::mp(1.5)?;
            let alphas: Vec<Vec<f64>> = (0..trials(40) as u64)
                .map(|i| {
                    let mut rng = trial_rng(seed, i);
                    (0..4).map(|_| rng.gen_range(-6.0f64..2.0).exp()).collect()
                })
                .collect();
            out.push(check_junge_pos(1.5, &m, &alphas)?);
        }
        Suite::Estimates => {
            for m in [OrliczFunction::power(1.5)?, OrliczFunction::mp(1.5)?, OrliczFunction::max_p2(1.5)?] {
                out.extend(check_upper_lower_estimates(&m, 1.5, 2.0, 16, 16)?);
            }
        }
        Suite::Dilation => {
            for (i, p) in [1.0, 1.5, 2.0].into_iter().enumerate() {
                out.push(check_dilation_norms(p, 16, trials(20), cell_seed(seed, i as u64))?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn first_orlicz_unit_vector() {
        let m = OrliczFunction::mn(2.0, 1).unwrap();
        assert_eq!(first_orlicz_functional(&[1.0], 1, 2.0), 1.0);
        assert_relative_eq!(luxemburg_seq_norm(&m, &[1.0]), 1.0 / m.inverse(1.0).unwrap(), max_relative = 1e-12);
        let r = check_first_orlicz(1, 2.0, 0, 0).unwrap();
        assert!(r.pass && r.samples == 0);
    }

    #[test]
    fn first_orlicz_sweep_and_large_n() {
        for n in [1, 4, 16, 64] {
            for q in [1.0, 1.5, 2.0] {
                let r = check_first_orlicz(n, q, 40, 3).unwrap();
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn kws_examples() {
        assert_eq!(kws_average(&[1.0, 0.0], &[1.0, 1.0], 1.0).unwrap(), 1.0);
        for n in 1..=5 {
            let ones = vec![1.0; n];
            for p in [1.0, 1.5, 2.0] {
                assert_relative_eq!(
                    kws_average(&ones, &ones, p).unwrap(),
                    (n as f64).powf(p / 2.0),
                    max_relative = 1e-12
                );
            }
        }
        assert!(check_kws(1.0, &[1.0, 1.0], &[1.0, 0.0]).unwrap().pass);
        assert!(kws_average(&[1.0; 8], &[1.0; 8], 1.0).is_err());
        assert!(kws_average(&[1.0; 2], &[1.0; 3], 1.0).is_err());
    }

    #[test]
    fn kws_cells_pass() {
        for n in [2, 4, 6] {
            for p in [1.0, 2.0] {
                assert!(check_kws_random(n, p, 10, 5).unwrap().pass);
            }
        }
    }

    #[test]
    fn kws_negative_control_catches_dilated_function() {
        let r = kws_negative_control(&[2, 5], &[1.0, 2.0], 10, 1, KWS_CORRUPTION).unwrap();
        assert!(r.pass, "{r:?}");
        let mild = kws_negative_control(&[2, 5], &[1.0], 10, 1, 2.0).unwrap();
        assert!(!mild.pass);
        let (x, y) = ([0.3, 1.2, 0.0], [1.0, 0.5, 2.0]);
        let base = kws_ratio(&x, &y, 1.5, 1.0).unwrap().unwrap();
        assert_relative_eq!(
            kws_ratio(&x, &y, 1.5, 10.0).unwrap().unwrap(),
            base * 10f64.powf(1.5),
            max_relative = 1e-9
        );
    }

    #[test]
    fn rademacher_single_and_p2() {
        let mut rng = trial_rng(1, 0);
        let a = random_hermitian(4, &mut rng);
        for p in [1.0, 1.5] {
            let rs = check_rademacher(p, std::slice::from_ref(&a)).unwrap();
            assert_relative_eq!(rs[0].ratio_max.unwrap(), 1.0, max_relative = 1e-12);
            assert_relative_eq!(rs[1].ratio_max.unwrap(), 1.0, max_relative = 1e-12);
        }
        let mats: Vec<CMatrix> = (0..5).map(|_| random_hermitian(4, &mut rng)).collect();
        let rs = check_rademacher(2.0, &mats).unwrap();
        assert!(rs.iter().all(|r| r.pass), "{rs:?}");
        assert!(check_rademacher(1.0, &[]).is_err());
    }

    #[test]
    fn js_skips_zero_laws_and_is_stable() {
        let zero = vec![DiscreteDistribution::dirac(0.0); 3];
        let r = check_js(1.0, &zero, 100, 0).unwrap();
        assert_eq!(r.samples, 0);
        let rad = vec![DiscreteDistribution::new(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap(); 4];
        let r = check_js(1.0, &rad, 20_000, 9).unwrap();
        assert!(r.pass, "{r:?}");
        let skew = DiscreteDistribution::new(vec![(1.0, 0.5), (2.0, 0.5)]).unwrap();
        assert!(matches!(check_js(1.0, &[skew], 10, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn modified_ms_bounds_and_dirac() {
        assert_relative_eq!(poisson_dilation_constant(1.0, 40), 1.0, max_relative = 1e-12);
        let r = check_modified_ms(1.5, &[DiscreteDistribution::dirac(1.0)], 20).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(check_modified_ms(1.0, &[], 20).unwrap().samples, 0);
    }

    #[test]
    fn dirac_one_exceeds_the_p_scaled_constant() {
        // ‖D_u‖ on L_1 + L_2 exceeds u for small u, so the p-scaled constant is not an upper bound
        let r = check_modified_ms(1.0, &[DiscreteDistribution::dirac(1.0)], 30).unwrap();
        assert!(r.ratio_max.unwrap() > poisson_dilation_constant(1.0, MAJ_TERMS));
        assert!(r.pass);
        let mp = OrliczFunction::mp(1.0).unwrap();
        let u = 0.01;
        let short = DecreasingStep::from_plateaus([(u, 1.0)]).unwrap();
        assert_relative_eq!(luxemburg_fn_norm(&mp, &short), 2.0 * u / (1.0 + u), max_relative = 1e-9);
    }

    #[test]
    fn junge_examples() {
        let one = OrliczFunction::power(1.0).unwrap();
        assert_relative_eq!(junge_lhs(&one, &[1.0, 0.0], 1.0).unwrap(), 1.0, max_relative = 1e-12);
        let mp = OrliczFunction::mp(1.5).unwrap();
        let c = [0.7; 3];
        assert_relative_eq!(junge_lhs(&mp, &c, 1.5).unwrap(), luxemburg_seq_norm(&mp, &c), max_relative = 1e-12);
        assert!(junge_lhs(&mp, &[1.0; 6], 1.5).is_err());
    }

    #[test]
    fn estimates_examples() {
        let rs = check_upper_lower_estimates(&OrliczFunction::power(1.5).unwrap(), 1.5, 2.0, 8, 8).unwrap();
        assert!(rs.iter().all(|r| r.pass));
        assert_relative_eq!(rs[0].ratio_max.unwrap(), 1.0, max_relative = 1e-9);
        let sq = check_upper_lower_estimates(&OrliczFunction::power(2.0).unwrap(), 1.5, 2.0, 8, 8).unwrap();
        assert!(sq.iter().all(|r| r.pass));
        assert_relative_eq!(sq[1].ratio_min.unwrap(), 1.0, max_relative = 1e-9);
        let mp = check_upper_lower_estimates(&OrliczFunction::mp(1.5).unwrap(), 1.5, 2.0, 16, 16).unwrap();
        assert!(mp.iter().all(|r| r.pass), "{mp:?}");
    }

    #[test]
    fn dilation_norms_exact() {
        for p in [1.0, 1.5, 2.0] {
            assert!(check_dilation_norms(p, 16, 5, 2).unwrap().pass);
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
