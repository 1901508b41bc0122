//! Constructions: the step function attached to a quasi-concave φ, the chain
//! `M → (N_M, φ_M, x_M, M′)`, Orlicz functions generated by an operator, and
//! the discrete family `M_{n,y}` evaluated pointwise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orlicz::{
    certify_class, luxemburg_fn_norm, luxemburg_seq_norm, make_mny, phi_from_m, OrliczFunction, QuasiConcaveFn,
};
use crate::rearrange::DecreasingStep;
use crate::report::{BandSource, ReportBuilder, VerificationReport};
use crate::sampling::mixed_scale_vector;

/// Default number of dyadic levels.
pub const DEFAULT_DEPTH: usize = 60;

/// Smallest power of ten in `[1e-300, 1]` where φ and φ(t)/t are finite and
/// positive; below it the evaluation has lost precision.
fn usable_floor(phi: &QuasiConcaveFn) -> f64 {
    (0..=300)
        .rev()
        .map(|j| 10f64.powi(-j))
        .find(|&t| {
            let v = phi.eval(t);
            v.is_finite() && v > 0.0 && (v / t).is_finite() && v >= f64::MIN_POSITIVE
        })
        .unwrap_or(1.0)
}

/// Sequences behind the step function of a quasi-concave φ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BkSequences {
    /// `φ(t_k) = 2^{−k}`.
    pub t: Vec<f64>,
    /// `s_k / φ(s_k) = 2^{−k}`; finite when φ'(0) < ∞.
    pub s: Vec<f64>,
    /// Interleaved `u_0 ≥ u_1 ≥ …`.
    pub u: Vec<f64>,
    /// `v_k = Σ_{l ≥ k} ½ u_{2l}^{1/(d−1)} φ(u_{2l})` over the computed terms.
    pub v: Vec<f64>,
    pub d: f64,
    /// φ'(0) < ∞: the s-sequence stopped before the t-sequence did.
    pub finite_derivative: bool,
    /// The recursion was cut at the depth limit or by floating-point range.
    pub truncated: bool,
    /// Bound on `∫ min{x, t x^d}` carried by the omitted terms.
    pub tail_bound: f64,
}

impl BkSequences {
    /// Even-indexed terms `u_{2k}`.
    pub fn u_even(&self) -> Vec<f64> {
        self.u.iter().step_by(2).copied().collect()
    }

    /// Odd-indexed terms `u_{2k+1}`.
    pub fn u_odd(&self) -> Vec<f64> {
        self.u.iter().skip(1).step_by(2).copied().collect()
    }

    /// Dyadic decay of the interleaved terms: for `l ≤ k`,
    /// `φ(u_{2k}) ≤ 2^{l−k} φ(u_{2l})` and
    /// `φ(u_{2l+1})/u_{2l+1} ≤ 2^{l−k} φ(u_{2k+1})/u_{2k+1}`.
    pub fn decay_holds(&self, phi: &QuasiConcaveFn) -> bool {
        let slack = 1.0 + 1e-9;
        let ev: Vec<f64> = self.u_even().iter().map(|&u| phi.eval(u)).collect();
        let od: Vec<f64> = self.u_odd().iter().map(|&u| phi.eval(u) / u).collect();
        for k in 0..ev.len() {
            for l in 0..=k {
                if ev[k] > 2f64.powi(l as i32 - k as i32) * ev[l] * slack {
                    return false;
                }
            }
        }
        for k in 0..od.len() {
            for l in 0..=k {
                if od[l] > 2f64.powi(l as i32 - k as i32) * od[k] * slack {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BkResult {
    pub sequences: BkSequences,
    pub x: DecreasingStep,
}

/// Largest `t ∈ [floor, 1]` with `pred(t)` for a predicate that holds on
/// an initial segment; `None` if it fails already at `floor`.
fn last_true<F: Fn(f64) -> bool>(floor: f64, pred: F) -> Option<f64> {
    if !pred(floor) {
        return None;
    }
    if pred(1.0) {
        return Some(1.0);
    }
    // bisection in log t, then in t once the bracket is narrow
    let (mut lo, mut hi) = (floor, 1.0f64);
    for _ in 0..200 {
        let mid = if hi > 2.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Builds `x = ⊕_k u_{2k}^{−1/(d−1)} χ_(0, ½u_{2k}^{1/(d−1)}φ(u_{2k}))`.
pub fn bk_build(phi: &QuasiConcaveFn, d: f64, depth: usize) -> Result<BkResult> {
    if !(d > 1.0 && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("d must exceed 1, got {d}")));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    phi.check()?;
    let floor = usable_floor(phi);
    let mut t = vec![1.0];
    for k in 1..=depth {
        let level = 0.5f64.powi(k as i32);
        match last_true(floor, |s| phi.eval(s) <= level) {
            Some(r) => t.push(r),
            None if k == 1 => {
                return Err(Error::RootFinding(format!("cannot bracket phi(t) = 1/2 for {}", phi.label())));
            }
            None => break,
        }
    }
    let mut s = vec![1.0];
    for k in 1..=depth {
        let level = 2f64.powi(k as i32);
        match last_true(floor, |x| phi.eval(x) / x >= level) {
            Some(r) if phi.eval(r) / r >= level * (1.0 - 1e-12) => s.push(r),
            _ => break,
        }
    }

    // u_0 = 1, u_1 = s_1, then alternate between the two sequences
    let mut u = vec![1.0];
    let mut finite_derivative = false;
    let mut truncated = false;
    if s.len() > 1 {
        u.push(s[1]);
        loop {
            let last = *u.last().expect("nonempty");
            let Some(&te) = t.iter().find(|&&x| x < last) else {
                truncated = true;
                break;
            };
            u.push(te);
            let Some(&so) = s.iter().find(|&&x| x <= te) else {
                finite_derivative = s.len() <= depth;
                truncated = !finite_derivative;
                break;
            };
            u.push(so);
        }
    } else {
        finite_derivative = true;
    }
    if u.len() % 2 == 0 {
        // the sequence ends on an odd index only when it was cut short
        truncated = true;
    }

    let r = 1.0 / (d - 1.0);
    let mut plateaus = Vec::new();
    let mut lens = Vec::new();
    let mut last_phi = 1.0;
    for &ue in u.iter().step_by(2) {
        let (p, len, val) = (phi.eval(ue), 0.5 * ue.powf(r) * phi.eval(ue), ue.powf(-r));
        if !(len > 0.0 && val.is_finite()) {
            truncated = true;
            break;
        }
        plateaus.push((len, val));
        lens.push(len);
        last_phi = p;
    }
    let mut v = vec![0.0; lens.len()];
    let mut acc = 0.0;
    for k in (0..lens.len()).rev() {
        acc += lens[k];
        v[k] = acc;
    }
    let tail_bound = if truncated { 0.5 * last_phi } else { 0.0 };
    let x = DecreasingStep::from_plateaus(plateaus)?;
    Ok(BkResult { sequences: BkSequences { t, s, u, v, d, finite_derivative, truncated, tail_bound }, x })
}

/// `∫ min{x(s), t x^d(s)} ds` for a step function x.
pub fn bk_functional(x: &DecreasingStep, d: f64, t: f64) -> f64 {
    x.plateaus().iter().map(|&(l, v)| l * v.min(t * v.powf(d))).sum()
}

/// Checks `¼φ(t) ≤ G(t) ≤ (5/2)φ(t)` on the grid points in (0, 1] and, when
/// φ is bounded by 3, `(1/12)φ(t) ≤ G(t) ≤ (5/2)φ(t)` on points beyond 1.
pub fn bk_verify(phi: &QuasiConcaveFn, bk: &BkResult, grid: &[f64]) -> Result<VerificationReport> {
    let d = bk.sequences.d;
    let extended = grid.iter().any(|&t| t > 1.0);
    if extended && !(phi.limit_at_infinity() <= 3.0) {
        return Err(Error::Precondition(format!("{}: the range t > 1 needs phi bounded by 3", phi.label())));
    }
    let mut b = ReportBuilder::new("bk-band")
        .param("phi", phi.label())
        .param("d", d)
        .param("grid", grid.len())
        .param("finite_derivative", bk.sequences.finite_derivative)
        .inputs(phi)
        .band(if extended { 1.0 / 12.0 } else { 0.25 }, 2.5, BandSource::Stated)
        .tail_mass(bk.sequences.tail_bound);
    let (mut lo_unit, mut lo_ext) = (f64::INFINITY, f64::INFINITY);
    for &t in grid {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("grid point {t} is not positive")));
        }
        let r = bk_functional(&bk.x, d, t) / phi.eval(t);
        if t <= 1.0 {
            lo_unit = lo_unit.min(r);
        } else {
            lo_ext = lo_ext.min(r);
        }
        b.observe(r);
    }
    if extended && lo_unit < 0.25 - crate::report::BAND_SLACK {
        b.fail(format!("ratio {lo_unit} below 1/4 on (0, 1]"));
    }
    if lo_ext.is_finite() {
        b.note(format!("smallest ratio on t > 1: {lo_ext}"));
    }
    b.note(format!("||x||_1 = {}", bk.x.l1_norm()));
    if bk.x.l1_norm() > 1.0 + 1e-12 {
        b.fail("||x||_1 exceeds 1");
    }
    Ok(b.finish())
}

/// Result of the chain `M → (N_M, φ_M, x_M, M′)`.
#[derive(Clone, Debug)]
pub struct XmChain {
    pub nm: OrliczFunction,
    pub phi: QuasiConcaveFn,
    pub bk: BkResult,
    pub m_prime: OrliczFunction,
    pub reports: Vec<VerificationReport>,
}

/// Threshold for `M(t)/t^p` at the bottom of the range: above it, M is
/// treated as having an l_p core and the chain is void.
const LP_CORE_THRESHOLD: f64 = 1e-6;

/// Runs the chain and checks `(1/12)‖x‖_{l_M} ≤ ‖x‖_{l_{M′}} ≤ 5‖x‖_{l_M}` on
/// `trials` random finitely supported x, plus `‖x‖_{l_{N_M}} = ‖x‖_{l_M}`.
pub fn xm_chain(m: &OrliczFunction, p: f64, depth: usize, trials: usize, seed: u64) -> Result<XmChain> {
    certify_class(m, p, 2.0)?;
    let t_min = 10f64.powf(-300.0 / p);
    let core = m.eval(t_min) / t_min.powf(p);
    if !(core < LP_CORE_THRESHOLD) {
        return Err(Error::Precondition(format!(
            "{}: M(t)/t^p = {core:e} does not vanish at t = {t_min:e}; l_p-like core, chain void",
            m.label()
        )));
    }
    let nm = m.nm(p)?;
    let phi = phi_from_m(m, p)?;
    let d = 2.0 / p;
    let bk = bk_build(&phi, d, depth)?;
    let m_prime = OrliczFunction::integral(p, bk.x.map_values(|v| v.powf(1.0 / p)))?;

    let mut unit_grid = crate::orlicz::log_grid(1e-6, 1.0, 64);
    unit_grid.extend(crate::orlicz::log_grid(1.5, 1e6, 16));
    let bk_report = bk_verify(&phi, &bk, &unit_grid)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut band = ReportBuilder::new("xm-chain-band")
        .param("M", m.label())
        .param("p", p)
        .param("depth", depth)
        .param("trials", trials)
        .inputs(m)
        .seed(seed)
        .tail_mass(bk.sequences.tail_bound)
        .band(1.0 / 12.0, 5.0, BandSource::Stated);
    let mut same = ReportBuilder::new("xm-chain-nm-equality")
        .param("M", m.label())
        .param("p", p)
        .inputs(m)
        .seed(seed)
        .bound(1e-10);
    for _ in 0..trials {
        let x = mixed_scale_vector(&mut rng, 32);
        let base = luxemburg_seq_norm(m, &x);
        band.observe(luxemburg_seq_norm(&m_prime, &x) / base);
        same.deviation((luxemburg_seq_norm(&nm, &x) - base).abs() / base);
    }
    let reports = vec![bk_report, band.finish(), same.finish()];
    Ok(XmChain { nm, phi, bk, m_prime, reports })
}

/// `M(t) = ∫₀¹ M_p(t μ(s, A₀)) ds` for a profile on (0, 1).
pub fn orlicz_from_a0(a0: &DecreasingStep, p: f64) -> Result<OrliczFunction> {
    let len = a0.total_length();
    if (len - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("A0 must live on (0,1); total length is {len}")));
    }
    OrliczFunction::integral(p, a0.clone())
}

/// `μ(A₀ ⊗ A)` for diagonal A: every plateau of A₀ times every |a_j|.
pub fn tensor_with_sequence(a0: &DecreasingStep, a: &[f64]) -> DecreasingStep {
    DecreasingStep::from_plateaus(a0.plateaus().iter().flat_map(|&(l, v)| a.iter().map(move |&aj| (l, v * aj.abs()))))
        .expect("products of valid plateaus")
}

/// `(‖A₀ ⊗ A‖_{L_p+L_2}, ‖A‖_{l_M})` with M generated by A₀.
pub fn ms_identity_sides(a0: &DecreasingStep, a: &[f64], p: f64) -> Result<(f64, f64)> {
    let m = orlicz_from_a0(a0, p)?;
    let lhs = luxemburg_fn_norm(&OrliczFunction::mp(p)?, &tensor_with_sequence(a0, a));
    Ok((lhs, luxemburg_seq_norm(&m, a)))
}

/// `M_{n,y_s}` with `y_s = (f_k(s))_k`.
pub fn rs_orlicz_at_point(fs: &[DecreasingStep], p: f64, s: f64) -> Result<OrliczFunction> {
    if fs.is_empty() {
        return Err(Error::InvalidArgument("need at least one function".into()));
    }
    let domain = fs.iter().map(DecreasingStep::total_length).fold(f64::INFINITY, f64::min);
    if !(s >= 0.0 && s < domain) {
        return Err(Error::Precondition(format!("point {s} lies outside the common domain [0, {domain})")));
    }
    let y: Vec<f64> = fs.iter().map(|f| f.value_at(s)).collect();
    if y.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument(format!("every function vanishes at {s}")));
    }
    make_mny(p, fs.len() as u64, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::{certify_p_convex, certify_q_concave, default_cert_grid, log_grid, CERT_PASS};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn identity_phi_uses_finite_branch() {
        let phi = QuasiConcaveFn::power(1.0).unwrap();
        let bk = bk_build(&phi, 2.0, 60).unwrap();
        let sq = &bk.sequences;
        assert!(sq.finite_derivative);
        assert_eq!(sq.u, vec![1.0]);
        assert_eq!(sq.s, vec![1.0]);
        for (k, &t) in sq.t.iter().enumerate() {
            assert_relative_eq!(t, 0.5f64.powi(k as i32), max_relative = 1e-12);
        }
        assert_eq!(bk.x.plateaus(), &[(0.5, 1.0)]);
        let r = bk_verify(&phi, &bk, &log_grid(1e-6, 1.0, 64)).unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.ratio_min.unwrap(), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn square_root_phi_sequences() {
        let phi = QuasiConcaveFn::power(0.5).unwrap();
        let bk = bk_build(&phi, 2.0, 30).unwrap();
        let sq = &bk.sequences;
        for (k, (&t, &s)) in sq.t.iter().zip(&sq.s).enumerate() {
            let e = 0.25f64.powi(k as i32);
            assert_relative_eq!(t, e, max_relative = 1e-10);
            assert_relative_eq!(s, e, max_relative = 1e-10);
        }
        assert!(!sq.finite_derivative);
        assert!(sq.decay_holds(&phi));
        assert!(bk.x.l1_norm() <= 1.0);
        let r = bk_verify(&phi, &bk, &log_grid(1e-6, 1.0, 64)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn invariants_across_exponents() {
        for theta in [0.25, 0.5, 0.75] {
            for d in [1.5, 2.0, 3.0] {
                let phi = QuasiConcaveFn::power(theta).unwrap();
                let bk = bk_build(&phi, d, DEFAULT_DEPTH).unwrap();
                let sq = &bk.sequences;
                for (k, &t) in sq.t.iter().enumerate() {
                    assert!((phi.eval(t) - 0.5f64.powi(k as i32)).abs() <= 1e-10);
                }
                for (k, &s) in sq.s.iter().enumerate() {
                    assert!((s / phi.eval(s) - 0.5f64.powi(k as i32)).abs() <= 1e-10);
                }
                assert!(sq.u.windows(2).all(|w| w[1] <= w[0]));
                assert!(sq.v.windows(2).all(|w| w[1] <= w[0]));
                assert!(sq.decay_holds(&phi));
                assert!(bk.x.l1_norm() <= 1.0);
                assert!(bk_verify(&phi, &bk, &log_grid(1e-6, 1.0, 64)).unwrap().pass, "theta={theta} d={d}");
            }
        }
    }

    #[test]
    fn extended_range_needs_bounded_phi() {
        let phi = QuasiConcaveFn::power(0.5).unwrap();
        let bk = bk_build(&phi, 2.0, 20).unwrap();
        assert!(bk_verify(&phi, &bk, &[0.5, 2.0]).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        let phi = QuasiConcaveFn::power(0.5).unwrap();
        assert!(bk_build(&phi, 1.0, 10).is_err());
        assert!(bk_build(&phi, 2.0, 0).is_err());
    }

    fn chain_inputs() -> Vec<(OrliczFunction, f64)> {
        vec![(OrliczFunction::power(1.5).unwrap(), 1.2), (OrliczFunction::mp(1.2).unwrap(), 1.2)]
    }

    #[test]
    fn chain_band_and_norm_equality() {
        for (m, p) in chain_inputs() {
            let chain = xm_chain(&m, p, DEFAULT_DEPTH, 100, 11).unwrap();
            for r in &chain.reports {
                assert!(r.pass, "{r:?}");
            }
            assert_relative_eq!(chain.phi.eval(1.0), 1.0, max_relative = 1e-12);
            assert_relative_eq!(chain.nm.eval(1.0), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn chain_rejects_lp_core() {
        let m = OrliczFunction::power(1.2).unwrap();
        assert!(matches!(xm_chain(&m, 1.2, 20, 10, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn unit_profile_reproduces_mp() {
        let chi = DecreasingStep::from_plateaus([(1.0, 1.0)]).unwrap();
        for p in [1.0, 1.5, 2.0] {
            let m = orlicz_from_a0(&chi, p).unwrap();
            let mp = OrliczFunction::mp(p).unwrap();
            for t in log_grid(1e-6, 1e3, 50) {
                assert_eq!(m.eval(t), mp.eval(t));
            }
        }
        let half = DecreasingStep::from_plateaus([(0.5, 1.0)]).unwrap();
        assert!(orlicz_from_a0(&half, 1.5).is_err());
    }

    #[test]
    fn ms_identity_examples() {
        let chi = DecreasingStep::from_plateaus([(1.0, 1.0)]).unwrap();
        let (l, r) = ms_identity_sides(&chi, &[3.0, 1.0, 0.5], 1.5).unwrap();
        assert_relative_eq!(l, r, max_relative = 1e-9);
        let a0 = DecreasingStep::from_plateaus([(0.3, 2.0), (0.7, 0.4)]).unwrap();
        let (l, r) = ms_identity_sides(&a0, &[1.0], 1.2).unwrap();
        assert_relative_eq!(l, luxemburg_fn_norm(&OrliczFunction::mp(1.2).unwrap(), &a0), max_relative = 1e-12);
        assert_relative_eq!(l, r, max_relative = 1e-9);
    }

    #[test]
    fn rs_family_examples() {
        let one = DecreasingStep::from_plateaus([(1.0, 1.0)]).unwrap();
        let fs = vec![one.clone(), one];
        let m = rs_orlicz_at_point(&fs, 1.0, 0.3).unwrap();
        assert_relative_eq!(m.eval(1.0), 1.0, max_relative = 1e-10);
        let other = rs_orlicz_at_point(&fs, 1.0, 0.9).unwrap();
        assert_eq!(m.eval(0.4), other.eval(0.4));
        let g = default_cert_grid();
        assert!(certify_p_convex(&m, 1.0, &g).unwrap().passes(CERT_PASS));
        assert!(certify_q_concave(&m, 2.0, &g).unwrap().passes(CERT_PASS));
        assert!(rs_orlicz_at_point(&fs, 1.0, 1.5).is_err());
        let zero = vec![DecreasingStep::from_plateaus([(0.5, 1.0), (0.5, 0.0)]).unwrap()];
        assert!(rs_orlicz_at_point(&zero, 1.0, 0.7).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn ms_identity_on_random_pairs(seed in any::<u64>(), pi in 0usize..3) {
            let p = [1.0, 1.5, 2.0][pi];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a0 = crate::sampling::random_step(&mut rng, 2, 1.0);
            let a: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let (l, r) = ms_identity_sides(&a0, &a, p).unwrap();
            prop_assert!((l - r).abs() <= 1e-9 * r.max(1e-300));
        }
    }
}
