//! Orlicz functions, Luxemburg norms and convexity certificates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrange::DecreasingStep;

/// Serialized description of an Orlicz function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
pub enum OrliczSpec {
    /// `t^p`.
    #[serde(rename = "power")]
    Power { p: f64 },
    /// `t²` on [0,1] and `1 + (2/p)(t^p − 1)` beyond.
    Mp { p: f64 },
    /// `n^{q−1} t^q` on [0,1/n] and `q t − (q−1)/n` beyond.
    Nn { q: f64, n: u64 },
    /// `N_n / N_n(1)`.
    Mn { q: f64, n: u64 },
    /// `Σ_k M_n(t^p y^p(k) / ‖y^p‖_{l_{M_n}})` with `q = 2/p`.
    Mny { p: f64, n: u64, y: Vec<f64> },
    /// `M` on [0,1] continued by `1 + M'(1−)(t^p − 1)/p`.
    NM { p: f64, base: Box<OrliczSpec> },
    /// `max{t^p, t²}`.
    MaxP2 { p: f64 },
    /// Piecewise power interpolation of `(t, M(t))` in log-log coordinates.
    #[serde(rename = "tabulated")]
    Tabulated { points: Vec<[f64; 2]> },
    /// `t ↦ ∫ M_p(t f(s)) ds` for a decreasing step profile f.
    #[serde(rename = "integral")]
    Integral { p: f64, profile: DecreasingStep },
}

#[derive(Clone, Debug, PartialEq)]
enum Imp {
    Power { p: f64 },
    Mp { p: f64 },
    Nn { q: f64, n: f64, scale: f64 },
    Mny { p: f64, mn: Box<OrliczFunction>, w: Vec<f64> },
    NM { p: f64, base: Box<OrliczFunction>, slope: f64 },
    MaxP2 { p: f64 },
    Tab { t: Vec<f64>, m: Vec<f64>, a: Vec<f64> },
    Integral { p: f64, pieces: Vec<(f64, f64)> },
}

/// An even convex function with `M(0) = 0`, evaluated on `[0, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OrliczSpec", into = "OrliczSpec")]
pub struct OrliczFunction {
    spec: OrliczSpec,
    imp: Imp,
}

impl TryFrom<OrliczSpec> for OrliczFunction {
    type Error = Error;
    fn try_from(spec: OrliczSpec) -> Result<Self> {
        Self::from_spec(spec)
    }
}

impl From<OrliczFunction> for OrliczSpec {
    fn from(m: OrliczFunction) -> Self {
        m.spec
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<f64> {
    if v.is_finite() && (lo..=hi).contains(&v) {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("{name} must lie in [{lo}, {hi}], got {v}")))
    }
}

fn at_least_one(name: &str, n: u64) -> Result<f64> {
    if n == 0 {
        Err(Error::InvalidArgument(format!("{name} must be at least 1")))
    } else {
        Ok(n as f64)
    }
}

impl OrliczFunction {
    /// Builds and validates a function from its description. Families with a
    /// free shape (tabulated, integral) are checked for convexity here; the
    /// closed-form families are convex for the admitted parameters.
    pub fn from_spec(spec: OrliczSpec) -> Result<Self> {
        let imp = match &spec {
            OrliczSpec::Power { p } => Imp::Power { p: positive("p", *p)? },
            OrliczSpec::Mp { p } => Imp::Mp { p: in_range("p", *p, 1.0, 2.0)? },
            OrliczSpec::Nn { q, n } => {
                Imp::Nn { q: in_range("q", *q, 1.0, f64::MAX)?, n: at_least_one("n", *n)?, scale: 1.0 }
            }
            OrliczSpec::Mn { q, n } => {
                let q = in_range("q", *q, 1.0, f64::MAX)?;
                let nf = at_least_one("n", *n)?;
                Imp::Nn { q, n: nf, scale: 1.0 / nn_eval(q, nf, 1.0) }
            }
            OrliczSpec::Mny { p, n, y } => return make_mny(*p, *n, y),
            OrliczSpec::NM { p, base } => {
                let p = in_range("p", *p, 1.0, 2.0)?;
                let base = Self::from_spec((**base).clone())?;
                let slope = base.left_derivative(1.0);
                positive("M'(1-)", slope)?;
                Imp::NM { p, base: Box::new(base), slope }
            }
            OrliczSpec::MaxP2 { p } => Imp::MaxP2 { p: in_range("p", *p, 1.0, f64::MAX)? },
            OrliczSpec::Tabulated { points } => tabulate(points)?,
            OrliczSpec::Integral { p, profile } => {
                let p = in_range("p", *p, 1.0, 2.0)?;
                if profile.is_zero() {
                    return Err(Error::InvalidArgument("integral profile vanishes identically".into()));
                }
                Imp::Integral { p, pieces: profile.plateaus().iter().copied().filter(|x| x.1 > 0.0).collect() }
            }
        };
        Ok(Self { spec, imp })
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::from_spec(OrliczSpec::Power { p })
    }

    pub fn mp(p: f64) -> Result<Self> {
        Self::from_spec(OrliczSpec::Mp { p })
    }

    pub fn nn(q: f64, n: u64) -> Result<Self> {
        Self::from_spec(OrliczSpec::Nn { q, n })
    }

    pub fn mn(q: f64, n: u64) -> Result<Self> {
        Self::from_spec(OrliczSpec::Mn { q, n })
    }

    pub fn max_p2(p: f64) -> Result<Self> {
        Self::from_spec(OrliczSpec::MaxP2 { p })
    }

    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        Self::from_spec(OrliczSpec::Tabulated { points: points.iter().map(|&(t, m)| [t, m]).collect() })
    }

    /// `N_M`: this function on [0,1], continued by a p-power with matching slope.
    pub fn nm(&self, p: f64) -> Result<Self> {
        Self::from_spec(OrliczSpec::NM { p, base: Box::new(self.spec.clone()) })
    }

    /// `t ↦ ∫ M_p(t f(s)) ds`.
    pub fn integral(p: f64, profile: DecreasingStep) -> Result<Self> {
        Self::from_spec(OrliczSpec::Integral { p, profile })
    }

    /// Parses a JSON description and checks convexity on a wide grid.
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: OrliczSpec = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        let m = Self::from_spec(spec)?;
        m.check_convex()?;
        Ok(m)
    }

    pub fn spec(&self) -> &OrliczSpec {
        &self.spec
    }

    /// Short human-readable family tag, e.g. `Mp(p=1.5)`.
    pub fn label(&self) -> String {
        match &self.spec {
            OrliczSpec::Power { p } => format!("power(p={p})"),
            OrliczSpec::Mp { p } => format!("Mp(p={p})"),
            OrliczSpec::Nn { q, n } => format!("Nn(q={q},n={n})"),
            OrliczSpec::Mn { q, n } => format!("Mn(q={q},n={n})"),
            OrliczSpec::Mny { p, n, y } => format!("Mny(p={p},n={n},len(y)={})", y.len()),
            OrliczSpec::NM { p, .. } => format!("NM(p={p})"),
            OrliczSpec::MaxP2 { p } => format!("MaxP2(p={p})"),
            OrliczSpec::Tabulated { points } => format!("tabulated({} points)", points.len()),
            OrliczSpec::Integral { p, profile } => format!("integral(p={p},{} plateaus)", profile.len()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match &self.imp {
            Imp::Power { p } => t.powf(*p),
            Imp::Mp { p } => mp_eval(*p, t),
            Imp::Nn { q, n, scale } => scale * nn_eval(*q, *n, t),
            Imp::Mny { p, mn, w } => {
                let tp = t.powf(*p);
                w.iter().map(|&wk| mn.eval(tp * wk)).sum()
            }
            Imp::NM { p, base, slope } => {
                if t <= 1.0 {
                    base.eval(t)
                } else {
                    1.0 + slope / p * (t.powf(*p) - 1.0)
                }
            }
            Imp::MaxP2 { p } => t.powf(*p).max(t * t),
            Imp::Tab { t: ts, m, a } => {
                if t == 0.0 {
                    return 0.0;
                }
                let i = piece_index(ts, t);
                m[i] * (t / ts[i]).powf(a[i])
            }
            Imp::Integral { p, pieces } => pieces.iter().map(|&(l, v)| l * mp_eval(*p, t * v)).sum(),
        }
    }

    /// Left derivative `M'(t−)` (right derivative at 0).
    pub fn left_derivative(&self, t: f64) -> f64 {
        let t = t.abs();
        match &self.imp {
            Imp::Power { p } => {
                if t == 0.0 {
                    if *p > 1.0 {
                        0.0
                    } else if *p == 1.0 {
                        1.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    p * t.powf(p - 1.0)
                }
            }
            Imp::Mp { p } => mp_deriv(*p, t),
            Imp::Nn { q, n, scale } => {
                if t <= 1.0 / n {
                    scale * q * n.powf(q - 1.0) * t.powf(q - 1.0)
                } else {
                    scale * q
                }
            }
            Imp::Mny { p, mn, w } => {
                if t == 0.0 {
                    return 0.0;
                }
                let tp = t.powf(*p);
                let dtp = p * t.powf(p - 1.0);
                w.iter().map(|&wk| mn.left_derivative(tp * wk) * wk * dtp).sum()
            }
            Imp::NM { p, base, slope } => {
                if t <= 1.0 {
                    base.left_derivative(t)
                } else {
                    slope * t.powf(p - 1.0)
                }
            }
            Imp::MaxP2 { p } => {
                let use_p = if t <= 1.0 { *p <= 2.0 } else { *p >= 2.0 };
                if use_p {
                    p * t.powf(p - 1.0)
                } else {
                    2.0 * t
                }
            }
            Imp::Tab { t: ts, m, a } => {
                if t == 0.0 {
                    return if a[0] > 1.0 { 0.0 } else { m[0] / ts[0] };
                }
                // left derivative: the piece whose interval (t_i, t_{i+1}] holds t
                let i = ts.partition_point(|&x| x < t).saturating_sub(1).min(a.len() - 1);
                a[i] * m[i] * (t / ts[i]).powf(a[i]) / t
            }
            Imp::Integral { p, pieces } => pieces.iter().map(|&(l, v)| l * v * mp_deriv(*p, t * v)).sum(),
        }
    }

    /// `M⁻¹(y)`, the unique `t ≥ 0` with `M(t) = y`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) || y.is_infinite() {
            return Err(Error::InvalidArgument(format!("cannot invert at {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        Ok(match &self.imp {
            Imp::Power { p } => y.powf(1.0 / p),
            Imp::Mp { p } => {
                if y <= 1.0 {
                    y.sqrt()
                } else {
                    ((y - 1.0) * p / 2.0 + 1.0).powf(1.0 / p)
                }
            }
            Imp::Nn { q, n, scale } => {
                let z = y / scale;
                if z <= 1.0 / n {
                    (z / n.powf(q - 1.0)).powf(1.0 / q)
                } else {
                    (z + (q - 1.0) / n) / q
                }
            }
            Imp::NM { p, base, slope } => {
                if y <= 1.0 {
                    base.inverse(y)?
                } else {
                    ((y - 1.0) * p / slope + 1.0).powf(1.0 / p)
                }
            }
            Imp::MaxP2 { p } => y.powf(1.0 / p).min(y.sqrt()),
            Imp::Tab { t: ts, m, a } => {
                let i = m.partition_point(|&v| v <= y).saturating_sub(1).min(a.len() - 1);
                ts[i] * (y / m[i]).powf(1.0 / a[i])
            }
            Imp::Mny { .. } | Imp::Integral { .. } => self.inverse_bisect(y)?,
        })
    }

    fn inverse_bisect(&self, y: f64) -> Result<f64> {
        let mut hi = 1.0f64;
        let mut steps = 0;
        while self.eval(hi) < y {
            hi *= 2.0;
            steps += 1;
            if steps > 2100 || !hi.is_finite() {
                return Err(Error::RootFinding(format!("no upper bracket for M⁻¹({y})")));
            }
        }
        let mut lo = hi;
        loop {
            lo *= 0.5;
            if lo == 0.0 || self.eval(lo) <= y {
                break;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(if (self.eval(lo) - y).abs() < (self.eval(hi) - y).abs() { lo } else { hi })
    }

    /// True when `M(1) = 1` to 1e-10.
    pub fn is_normalized(&self) -> bool {
        (self.eval(1.0) - 1.0).abs() <= 1e-10
    }

    /// Checks `M(0) = 0`, monotonicity and midpoint convexity on a log grid
    /// spanning [1e-8, 1e4].
    pub fn check_convex(&self) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return Err(Error::NotConvex(format!("{} does not vanish at 0", self.label())));
        }
        let g = log_grid(1e-8, 1e4, 400);
        for w in g.windows(3) {
            let (a, b) = (w[0], w[2]);
            let (fa, fm, fb) = (self.eval(a), self.eval(0.5 * (a + b)), self.eval(b));
            let tol = 1e-10 * fb.max(1e-300);
            if fa > self.eval(w[1]) + tol || fm > 0.5 * (fa + fb) + tol {
                return Err(Error::NotConvex(format!("{} fails midpoint convexity on [{a:e}, {b:e}]", self.label())));
            }
        }
        Ok(())
    }
}

fn mp_eval(p: f64, t: f64) -> f64 {
    if t <= 1.0 {
        t * t
    } else {
        1.0 + 2.0 / p * (t.powf(p) - 1.0)
    }
}

fn mp_deriv(p: f64, t: f64) -> f64 {
    if t <= 1.0 {
        2.0 * t
    } else {
        2.0 * t.powf(p - 1.0)
    }
}

fn nn_eval(q: f64, n: f64, t: f64) -> f64 {
    if t <= 1.0 / n {
        n.powf(q - 1.0) * t.powf(q)
    } else {
        q * t - (q - 1.0) / n
    }
}

/// Index of the interpolation piece used at `t`; the first and last pieces
/// extend to 0 and ∞.
fn piece_index(ts: &[f64], t: f64) -> usize {
    ts.partition_point(|&x| x <= t).saturating_sub(1).min(ts.len() - 2)
}

fn tabulate(points: &[[f64; 2]]) -> Result<Imp> {
    if points.len() < 2 {
        return Err(Error::Malformed("tabulated Orlicz function needs at least two points".into()));
    }
    let mut ts = Vec::with_capacity(points.len());
    let mut ms = Vec::with_capacity(points.len());
    for &[t, m] in points {
        if !(t > 0.0 && t.is_finite() && m > 0.0 && m.is_finite()) {
            return Err(Error::Malformed(format!("tabulated point ({t}, {m}) must be positive")));
        }
        if ts.last().is_some_and(|&prev| t <= prev) {
            return Err(Error::Malformed("tabulated abscissae must be strictly increasing".into()));
        }
        ts.push(t);
        ms.push(m);
    }
    let a: Vec<f64> = (0..ts.len() - 1).map(|i| (ms[i + 1] / ms[i]).ln() / (ts[i + 1] / ts[i]).ln()).collect();
    // t^{a_i} pieces are convex iff every a_i ≥ 1, and joints are convex iff
    // the slopes a_i M_i / t_i do not drop, i.e. the exponents do not decrease.
    if a[0] < 1.0 - 1e-12 {
        return Err(Error::NotConvex(format!("initial log-log slope {} is below 1", a[0])));
    }
    if let Some(w) = a.windows(2).find(|w| w[1] < w[0] - 1e-12) {
        return Err(Error::NotConvex(format!("log-log slope drops from {} to {}", w[0], w[1])));
    }
    Ok(Imp::Tab { t: ts, m: ms, a })
}

/// `M_{n,y}` as an Orlicz function.
pub fn make_mny(p: f64, n: u64, y: &[f64]) -> Result<OrliczFunction> {
    let p = in_range("p", p, 1.0, 2.0)?;
    let mn = OrliczFunction::mn(2.0 / p, n)?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("y has non-finite entries".into()));
    }
    let yp: Vec<f64> = y.iter().map(|v| v.abs().powf(p)).filter(|&v| v > 0.0).collect();
    if yp.is_empty() {
        return Err(Error::InvalidArgument("y must be nonzero".into()));
    }
    let norm = luxemburg_seq_norm(&mn, &yp);
    let w = yp.iter().map(|v| v / norm).collect();
    Ok(OrliczFunction { spec: OrliczSpec::Mny { p, n, y: y.to_vec() }, imp: Imp::Mny { p, mn: Box::new(mn), w } })
}

/// Luxemburg norm of a weighted family of values: `inf{λ > 0 : Σ w_i M(v_i/λ) ≤ 1}`.
pub fn luxemburg_weighted(m: &OrliczFunction, pieces: &[(f64, f64)]) -> f64 {
    let pieces: Vec<(f64, f64)> =
        pieces.iter().map(|&(w, v)| (w, v.abs())).filter(|&(w, v)| w > 0.0 && v > 0.0).collect();
    if pieces.is_empty() {
        return 0.0;
    }
    let modular = |lam: f64| pieces.iter().map(|&(w, v)| w * m.eval(v / lam)).sum::<f64>();
    let inv = |y: f64| m.inverse(y).expect("validated Orlicz functions are unbounded");
    let total: f64 = pieces.iter().map(|p| p.0).sum();
    let vmax = pieces.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut lo = pieces.iter().map(|&(w, v)| v / inv(1.0 / w)).fold(0.0, f64::max);
    let mut hi = vmax / inv(1.0 / total);
    if !(lo > 0.0) || !lo.is_finite() {
        lo = f64::MIN_POSITIVE;
    }
    while modular(hi) > 1.0 {
        hi *= 2.0;
    }
    if hi < lo {
        lo = hi;
    }
    if modular(lo) <= 1.0 {
        return lo;
    }
    for _ in 0..400 {
        let mid = if hi > 1.5 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `‖x‖_{l_M}` for a finite sequence.
pub fn luxemburg_seq_norm(m: &OrliczFunction, x: &[f64]) -> f64 {
    let pieces: Vec<(f64, f64)> = x.iter().map(|&v| (1.0, v)).collect();
    luxemburg_weighted(m, &pieces)
}

/// `‖f‖_{L_M}` for a decreasing step function on (0, ∞).
pub fn luxemburg_fn_norm(m: &OrliczFunction, f: &DecreasingStep) -> f64 {
    luxemburg_weighted(m, f.plateaus())
}

/// `Σ w_i M(v_i/λ)`.
pub fn modular(m: &OrliczFunction, pieces: &[(f64, f64)], lambda: f64) -> f64 {
    pieces.iter().map(|&(w, v)| w * m.eval(v / lambda)).sum()
}

/// `(∫₀¹ μ^p)^{1/p} + (∫₁^∞ μ²)^{1/2}`, the K-functional form of the L_p + L_2 norm.
pub fn lp_plus_l2_kfunc(f: &DecreasingStep, p: f64) -> f64 {
    let (mut head, mut tail, mut acc) = (0.0f64, 0.0f64, 0.0f64);
    for &(l, v) in f.plateaus() {
        let before = (1.0 - acc).clamp(0.0, l);
        head += before * v.powf(p);
        tail += (l - before) * v * v;
        acc += l;
    }
    head.powf(1.0 / p) + tail.sqrt()
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| if i + 1 == n { hi } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() }).collect()
}

/// Default certification grid: 128 log-spaced points on [1e-6, 1].
pub fn default_cert_grid() -> Vec<f64> {
    log_grid(1e-6, 1.0, 128)
}

/// Default pass threshold for certificates of exact families.
pub const CERT_PASS: f64 = 1.0 + 1e-6;

/// Outcome of a grid certification: the constant and the pair attaining it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub constant: f64,
    pub s1: f64,
    pub s2: f64,
}

impl Certificate {
    pub fn passes(&self, threshold: f64) -> bool {
        self.constant <= threshold
    }
}

fn prepare_grid(grid: &[f64]) -> Result<Vec<f64>> {
    if grid.len() < 8 {
        return Err(Error::InvalidArgument(format!("certification grid has {} points, need at least 8", grid.len())));
    }
    if grid.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
        return Err(Error::InvalidArgument("certification grid must lie in (0, 1]".into()));
    }
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    Ok(g)
}

/// Ratio of `a / b` with `0/0 = 1`.
fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b
    }
}

/// Least C with `M(s₁)/s₁^p ≤ C·M(s₂)/s₂^p` for grid points `s₁ ≤ s₂`.
pub fn certify_p_convex(m: &OrliczFunction, p: f64, grid: &[f64]) -> Result<Certificate> {
    let g = prepare_grid(grid)?;
    let mut best = Certificate { constant: 1.0, s1: g[0], s2: g[0] };
    let (mut run_max, mut arg) = (f64::NEG_INFINITY, g[0]);
    for &s in &g {
        let h = m.eval(s) / s.powf(p);
        if h > run_max {
            run_max = h;
            arg = s;
        }
        let c = ratio(run_max, h);
        if c > best.constant {
            best = Certificate { constant: c, s1: arg, s2: s };
        }
    }
    Ok(best)
}

/// Least C with `M(s₁)/s₁^q ≥ C⁻¹·M(s₂)/s₂^q` for grid points `s₁ ≤ s₂`.
pub fn certify_q_concave(m: &OrliczFunction, q: f64, grid: &[f64]) -> Result<Certificate> {
    let g = prepare_grid(grid)?;
    let mut best = Certificate { constant: 1.0, s1: g[0], s2: g[0] };
    let (mut run_min, mut arg) = (f64::INFINITY, g[0]);
    for &s in &g {
        let h = m.eval(s) / s.powf(q);
        if h < run_min {
            run_min = h;
            arg = s;
        }
        let c = ratio(h, run_min);
        if c > best.constant {
            best = Certificate { constant: c, s1: arg, s2: s };
        }
    }
    Ok(best)
}

/// Cap above which two functions are declared inequivalent on [0,1].
pub const EQUIVALENCE_CAP: f64 = 1e6;

/// Least C with `C⁻¹M₁ ≤ M₂ ≤ C·M₁` on the grid.
pub fn equivalent_on_unit(m1: &OrliczFunction, m2: &OrliczFunction, grid: &[f64]) -> Result<f64> {
    let g = prepare_grid(grid)?;
    let mut c: f64 = 1.0;
    for &s in &g {
        let (a, b) = (m1.eval(s), m2.eval(s));
        c = c.max(ratio(a, b)).max(ratio(b, a));
    }
    if !(c <= EQUIVALENCE_CAP) {
        return Err(Error::Certification(format!(
            "{} and {} are not equivalent on [0,1]: ratio {c:e} exceeds {EQUIVALENCE_CAP:e}",
            m1.label(),
            m2.label()
        )));
    }
    Ok(c)
}

/// Checks membership in the class of p-convex, q-concave normalized functions
/// on the default grid, returning both certificates.
pub fn certify_class(m: &OrliczFunction, p: f64, q: f64) -> Result<(Certificate, Certificate)> {
    if !m.is_normalized() {
        return Err(Error::Certification(format!("{} is not normalized: M(1) = {}", m.label(), m.eval(1.0))));
    }
    let g = default_cert_grid();
    let cp = certify_p_convex(m, p, &g)?;
    let cq = certify_q_concave(m, q, &g)?;
    if !cp.passes(CERT_PASS) {
        return Err(Error::Certification(format!("{} is not {p}-convex: constant {}", m.label(), cp.constant)));
    }
    if !cq.passes(CERT_PASS) {
        return Err(Error::Certification(format!("{} is not {q}-concave: constant {}", m.label(), cq.constant)));
    }
    Ok((cp, cq))
}

/// Serialized description of a quasi-concave function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuasiConcaveSpec {
    /// `t^θ`, θ ∈ [0, 1].
    Power { theta: f64 },
    /// `φ_M(t) = N_M(t^{1/(2−p)}) / t^{p/(2−p)}`.
    #[serde(rename = "from_M")]
    FromM {
        #[serde(rename = "M")]
        m: OrliczSpec,
        p: f64,
    },
    /// Piecewise linear through `(t, φ)` on (0, 1], constant beyond 1.
    Grid { points: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq)]
enum PhiImp {
    Power { theta: f64 },
    FromM { nm: OrliczFunction, p: f64 },
    Grid { t: Vec<f64>, v: Vec<f64> },
}

/// A quasi-concave φ: nondecreasing with φ(t)/t nonincreasing, φ(0)=0, φ(1)=1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuasiConcaveSpec", into = "QuasiConcaveSpec")]
pub struct QuasiConcaveFn {
    spec: QuasiConcaveSpec,
    imp: PhiImp,
}

impl TryFrom<QuasiConcaveSpec> for QuasiConcaveFn {
    type Error = Error;
    fn try_from(spec: QuasiConcaveSpec) -> Result<Self> {
        Self::from_spec(spec)
    }
}

impl From<QuasiConcaveFn> for QuasiConcaveSpec {
    fn from(f: QuasiConcaveFn) -> Self {
        f.spec
    }
}

impl QuasiConcaveFn {
    pub fn from_spec(spec: QuasiConcaveSpec) -> Result<Self> {
        let imp = match &spec {
            QuasiConcaveSpec::Power { theta } => PhiImp::Power { theta: in_range("theta", *theta, 0.0, 1.0)? },
            QuasiConcaveSpec::FromM { m, p } => {
                let m = OrliczFunction::from_spec(m.clone())?;
                return phi_from_m(&m, *p);
            }
            QuasiConcaveSpec::Grid { points } => {
                let mut t = Vec::with_capacity(points.len() + 1);
                let mut v = Vec::with_capacity(points.len() + 1);
                for &[a, b] in points {
                    if !(a > 0.0 && a <= 1.0 && b.is_finite() && b >= 0.0) {
                        return Err(Error::Malformed(format!("grid point ({a}, {b}) outside (0,1] x [0,inf)")));
                    }
                    if t.last().is_some_and(|&prev| a <= prev) {
                        return Err(Error::Malformed("grid abscissae must be strictly increasing".into()));
                    }
                    t.push(a);
                    v.push(b);
                }
                if t.last() != Some(&1.0) {
                    return Err(Error::Malformed("grid must end at t = 1".into()));
                }
                PhiImp::Grid { t, v }
            }
        };
        let f = Self { spec, imp };
        f.check()?;
        Ok(f)
    }

    pub fn power(theta: f64) -> Result<Self> {
        Self::from_spec(QuasiConcaveSpec::Power { theta })
    }

    pub fn spec(&self) -> &QuasiConcaveSpec {
        &self.spec
    }

    pub fn label(&self) -> String {
        match &self.spec {
            QuasiConcaveSpec::Power { theta } => format!("power(theta={theta})"),
            QuasiConcaveSpec::FromM { p, .. } => format!("phi_M(p={p})"),
            QuasiConcaveSpec::Grid { points } => format!("grid({} points)", points.len()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.imp {
            PhiImp::Power { theta } => t.powf(*theta),
            PhiImp::FromM { nm, p } => {
                let r = 1.0 / (2.0 - p);
                nm.eval(t.powf(r)) / t.powf(p * r)
            }
            PhiImp::Grid { t: ts, v } => {
                if t >= 1.0 {
                    return v[v.len() - 1];
                }
                let i = ts.partition_point(|&x| x <= t);
                let (t0, v0) = if i == 0 { (0.0, 0.0) } else { (ts[i - 1], v[i - 1]) };
                v0 + (v[i] - v0) * (t - t0) / (ts[i] - t0)
            }
        }
    }

    /// `lim_{t→∞} φ(t)`, when finite.
    pub fn limit_at_infinity(&self) -> f64 {
        match &self.imp {
            PhiImp::Power { theta } => {
                if *theta == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            PhiImp::FromM { nm, p } => match &nm.imp {
                Imp::NM { slope, .. } => slope / p,
                _ => f64::INFINITY,
            },
            PhiImp::Grid { v, .. } => v[v.len() - 1],
        }
    }

    /// Whether `φ'(0) = lim φ(t)/t` is finite, judged on the values at 1e-300
    /// and 1e-150 (a bounded ratio that has stopped growing).
    pub fn has_finite_derivative_at_zero(&self) -> bool {
        match &self.imp {
            PhiImp::Power { theta } => *theta >= 1.0,
            PhiImp::Grid { .. } => true,
            PhiImp::FromM { .. } => {
                let (a, b) = (1e-300, 1e-150);
                let (ra, rb) = (self.eval(a) / a, self.eval(b) / b);
                ra.is_finite() && ra <= rb * (1.0 + 1e-6)
            }
        }
    }

    /// Quasi-concavity invariants on 256 log points of [1e-12, 1].
    pub fn check(&self) -> Result<()> {
        if (self.eval(1.0) - 1.0).abs() > 1e-10 {
            return Err(Error::Certification(format!("{}: phi(1) = {} is not 1", self.label(), self.eval(1.0))));
        }
        let g = log_grid(1e-12, 1.0, 256);
        for w in g.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fa > fb * (1.0 + 1e-10) {
                return Err(Error::Certification(format!("{}: phi decreases on [{a:e}, {b:e}]", self.label())));
            }
            if fb / b > fa / a * (1.0 + 1e-10) {
                return Err(Error::Certification(format!("{}: phi(t)/t increases on [{a:e}, {b:e}]", self.label())));
            }
        }
        Ok(())
    }
}

/// `φ_M` for a normalized p-convex, 2-concave M.
pub fn phi_from_m(m: &OrliczFunction, p: f64) -> Result<QuasiConcaveFn> {
    let p = in_range("p", p, 1.0, 2.0)?;
    if p >= 2.0 {
        return Err(Error::InvalidArgument("phi_M needs p < 2".into()));
    }
    certify_class(m, p, 2.0)?;
    let nm = m.nm(p)?;
    let f = QuasiConcaveFn { spec: QuasiConcaveSpec::FromM { m: m.spec.clone(), p }, imp: PhiImp::FromM { nm, p } };
    f.check()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn all_families() -> Vec<OrliczFunction> {
        vec![
            OrliczFunction::power(1.0).unwrap(),
            OrliczFunction::power(1.7).unwrap(),
            OrliczFunction::mp(1.0).unwrap(),
            OrliczFunction::mp(1.5).unwrap(),
            OrliczFunction::nn(2.0, 4).unwrap(),
            OrliczFunction::mn(1.5, 8).unwrap(),
            make_mny(1.2, 4, &[1.0, 0.5, 0.25]).unwrap(),
            OrliczFunction::mp(1.3).unwrap().nm(1.3).unwrap(),
            OrliczFunction::max_p2(1.5).unwrap(),
            OrliczFunction::tabulated(&[(0.5, 0.25), (1.0, 1.0), (2.0, 4.5)]).unwrap(),
            OrliczFunction::integral(1.5, DecreasingStep::from_plateaus([(0.5, 2.0), (0.5, 0.5)]).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn closed_form_values() {
        let m = OrliczFunction::power(2.0).unwrap();
        assert_eq!(m.eval(3.0), 9.0);
        assert_relative_eq!(m.inverse(9.0).unwrap(), 3.0);
        let m = OrliczFunction::mp(1.0).unwrap();
        assert_eq!(m.eval(1.0), 1.0);
        assert_eq!(m.eval(2.0), 3.0);
        let m = OrliczFunction::nn(2.0, 4).unwrap();
        assert_relative_eq!(m.eval(0.25), 0.25);
        assert_relative_eq!(m.eval(1.0), 1.75);
    }

    #[test]
    fn inverse_rejects_negative() {
        assert!(OrliczFunction::mp(1.5).unwrap().inverse(-1.0).is_err());
    }

    #[test]
    fn inverse_round_trip_all_families() {
        for m in all_families() {
            for y in [1e-9, 1e-3, 0.3, 1.0, 2.5, 40.0, 1e6] {
                let t = m.inverse(y).unwrap();
                assert!((m.eval(t) - y).abs() <= 1e-12 * y.max(1.0), "{} at {y}", m.label());
            }
        }
    }

    #[test]
    fn families_are_convex() {
        for m in all_families() {
            m.check_convex().unwrap_or_else(|e| panic!("{}: {e}", m.label()));
            assert_eq!(m.eval(0.0), 0.0);
        }
        assert!(OrliczFunction::power(0.6).unwrap().check_convex().is_err());
    }

    #[test]
    fn left_derivative_matches_difference_quotient() {
        for m in all_families() {
            for t in [0.1, 0.7, 1.0, 1.9, 5.0] {
                let h = 1e-7 * t;
                let fd = (m.eval(t) - m.eval(t - h)) / h;
                let d = m.left_derivative(t);
                assert!((fd - d).abs() <= 1e-4 * d.max(1.0), "{} at {t}: {fd} vs {d}", m.label());
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(OrliczFunction::mp(0.5).is_err());
        assert!(OrliczFunction::mp(2.5).is_err());
        assert!(OrliczFunction::nn(2.0, 0).is_err());
        assert!(OrliczFunction::power(0.0).is_err());
        assert!(make_mny(1.5, 4, &[0.0, 0.0]).is_err());
        assert!(matches!(OrliczFunction::tabulated(&[(0.5, 0.25), (1.0, 1.0), (2.0, 1.5)]), Err(Error::NotConvex(_))));
    }

    #[test]
    fn json_specs() {
        let m = OrliczFunction::from_json(r#"{"family":"Mp","p":1.5}"#).unwrap();
        assert_eq!(m, OrliczFunction::mp(1.5).unwrap());
        let m = OrliczFunction::from_json(r#"{"family":"Nn","q":2,"n":8}"#).unwrap();
        assert_relative_eq!(m.eval(1.0), 2.0 - 1.0 / 8.0);
        let m = OrliczFunction::from_json(r#"{"family":"tabulated","points":[[0.5,0.25],[1,1],[2,4]]}"#).unwrap();
        assert_relative_eq!(m.eval(1.5), 2.25, max_relative = 1e-12);
        assert!(matches!(OrliczFunction::from_json(r#"{"family":"Mp","p":1.5,"x":1}"#), Err(Error::Malformed(_))));
        assert!(matches!(OrliczFunction::from_json(r#"{"family":"nope"}"#), Err(Error::Malformed(_))));
        let s = serde_json::to_string(&OrliczFunction::mp(1.5).unwrap()).unwrap();
        assert_eq!(s, r#"{"family":"Mp","p":1.5}"#);
        let nested = r#"{"family":"NM","p":1.5,"base":{"family":"Mp","p":1.5}}"#;
        assert!(OrliczFunction::from_json(nested).is_ok());
    }

    #[test]
    fn power_norm_is_lp_norm() {
        let x = [3.0, -4.0, 0.0, 1.0];
        for p in [1.0, 1.5, 2.0, 3.0] {
            let m = OrliczFunction::power(p).unwrap();
            let lp = x.iter().map(|v: &f64| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
            assert_relative_eq!(luxemburg_seq_norm(&m, &x), lp, max_relative = 1e-12);
        }
    }

    #[test]
    fn indicator_norm_is_reciprocal_inverse() {
        for m in all_families().into_iter().filter(OrliczFunction::is_normalized) {
            for k in [1usize, 2, 5, 17] {
                let x = vec![1.0; k];
                let expect = 1.0 / m.inverse(1.0 / k as f64).unwrap();
                assert_relative_eq!(luxemburg_seq_norm(&m, &x), expect, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn zero_has_zero_norm() {
        let m = OrliczFunction::mp(1.5).unwrap();
        assert_eq!(luxemburg_seq_norm(&m, &[0.0, 0.0]), 0.0);
        assert_eq!(luxemburg_fn_norm(&m, &DecreasingStep::zero()), 0.0);
    }

    #[test]
    fn function_norm_of_unit_indicator() {
        let chi = DecreasingStep::from_plateaus([(1.0, 1.0)]).unwrap();
        for m in all_families().into_iter().filter(OrliczFunction::is_normalized) {
            assert_relative_eq!(luxemburg_fn_norm(&m, &chi), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn kfunc_values() {
        let chi = DecreasingStep::from_plateaus([(1.0, 1.0)]).unwrap();
        assert_relative_eq!(lp_plus_l2_kfunc(&chi, 1.5), 1.0);
        let chi2 = DecreasingStep::from_plateaus([(2.0, 1.0)]).unwrap();
        assert_relative_eq!(lp_plus_l2_kfunc(&chi2, 1.0), 2.0);
    }

    #[test]
    fn mny_single_atom_is_mn_of_power() {
        let m = make_mny(1.25, 6, &[0.0, 3.0, 0.0]).unwrap();
        let mn = OrliczFunction::mn(2.0 / 1.25, 6).unwrap();
        for t in [0.01, 0.3, 1.0, 2.0] {
            assert_relative_eq!(m.eval(t), mn.eval(t.powf(1.25)), max_relative = 1e-12);
        }
        let m = make_mny(1.0, 2, &[1.0, 1.0]).unwrap();
        assert_relative_eq!(m.eval(1.0), 1.0, max_relative = 1e-10);
    }

    #[test]
    fn certificates_of_exact_families() {
        let g = default_cert_grid();
        for p in [1.0, 1.3, 2.0] {
            let m = OrliczFunction::power(p).unwrap();
            assert!(certify_p_convex(&m, p, &g).unwrap().passes(CERT_PASS));
            assert!(certify_q_concave(&m, p, &g).unwrap().passes(CERT_PASS));
        }
        for p in [1.0, 1.5] {
            let m = OrliczFunction::mp(p).unwrap();
            assert!(certify_p_convex(&m, p, &g).unwrap().passes(CERT_PASS));
            assert!(certify_q_concave(&m, 2.0, &g).unwrap().passes(CERT_PASS));
        }
        let y = [1.0, 0.7, 0.2, 0.05];
        let m = make_mny(1.4, 8, &y).unwrap();
        assert!(certify_class(&m, 1.4, 2.0).is_ok());
    }

    #[test]
    fn sub_linear_power_fails_p_convexity_increasingly() {
        let p = 1.2;
        let m = OrliczFunction::power(p / 2.0).unwrap();
        let c1 = certify_p_convex(&m, p, &log_grid(1e-3, 1.0, 64)).unwrap().constant;
        let c2 = certify_p_convex(&m, p, &log_grid(1e-6, 1.0, 64)).unwrap().constant;
        assert_relative_eq!(c1, 1e-3f64.powf(-p / 2.0), max_relative = 1e-9);
        assert!(c2 > c1 * 10.0);
    }

    #[test]
    fn small_grid_rejected() {
        let m = OrliczFunction::mp(1.5).unwrap();
        assert!(certify_p_convex(&m, 1.5, &log_grid(0.1, 1.0, 7)).is_err());
    }

    #[test]
    fn equivalence_constants() {
        let g = default_cert_grid();
        let m = OrliczFunction::mp(1.5).unwrap();
        assert_eq!(equivalent_on_unit(&m, &m, &g).unwrap(), 1.0);
        let nn = OrliczFunction::nn(1.6, 5).unwrap();
        let mn = OrliczFunction::mn(1.6, 5).unwrap();
        let c = equivalent_on_unit(&nn, &mn, &g).unwrap();
        assert_relative_eq!(c, nn.eval(1.0), max_relative = 1e-12);
        assert!((1.0..=2.0).contains(&c));
        // t^p against t² near 0: ratio t^{p-2} explodes on a deep enough grid
        let deep = log_grid(1e-40, 1.0, 128);
        assert!(equivalent_on_unit(&OrliczFunction::power(1.5).unwrap(), &m, &deep).is_err());
    }

    #[test]
    fn phi_of_square_is_identity() {
        let phi = phi_from_m(&OrliczFunction::power(2.0).unwrap(), 1.0).unwrap();
        for t in [1e-6, 0.1, 0.5, 1.0] {
            assert_relative_eq!(phi.eval(t), t, max_relative = 1e-12);
        }
    }

    #[test]
    fn phi_of_mp_is_quasi_concave() {
        let phi = phi_from_m(&OrliczFunction::mp(1.5).unwrap(), 1.5).unwrap();
        assert_relative_eq!(phi.eval(1.0), 1.0);
        phi.check().unwrap();
        assert!(phi_from_m(&OrliczFunction::nn(2.0, 4).unwrap(), 1.5).is_err());
    }

    #[test]
    fn quasi_concave_json() {
        let f: QuasiConcaveFn = serde_json::from_str(r#"{"form":"power","theta":0.5}"#).unwrap();
        assert_relative_eq!(f.eval(0.25), 0.5);
        let f: QuasiConcaveFn =
            serde_json::from_str(r#"{"form":"from_M","M":{"family":"Mp","p":1.3},"p":1.3}"#).unwrap();
        assert_relative_eq!(f.eval(1.0), 1.0);
        let f: QuasiConcaveFn = serde_json::from_str(r#"{"form":"grid","points":[[0.5,0.75],[1,1]]}"#).unwrap();
        assert_relative_eq!(f.eval(0.25), 0.375);
        assert!(serde_json::from_str::<QuasiConcaveFn>(r#"{"form":"grid","points":[[0.5,0.2],[1,1]]}"#).is_err());
        assert!(serde_json::from_str::<QuasiConcaveFn>(r#"{"form":"power","theta":1.5}"#).is_err());
    }

    fn family_strategy() -> impl Strategy<Value = OrliczFunction> {
        prop_oneof![
            (1.0f64..3.0).prop_map(|p| OrliczFunction::power(p).unwrap()),
            (1.0f64..2.0).prop_map(|p| OrliczFunction::mp(p).unwrap()),
            (1.0f64..2.0, 1u64..20).prop_map(|(q, n)| OrliczFunction::mn(q, n).unwrap()),
            (1.0f64..2.0).prop_map(|p| OrliczFunction::max_p2(p).unwrap()),
        ]
    }

    fn vec_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, 1..12)
    }

    proptest! {
        #[test]
        fn norm_is_homogeneous(m in family_strategy(), x in vec_strategy(), c in -10.0f64..10.0) {
            let n = luxemburg_seq_norm(&m, &x);
            let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
            prop_assert!((luxemburg_seq_norm(&m, &scaled) - c.abs() * n).abs() <= 1e-10 * n.max(1e-300) * c.abs().max(1.0));
        }

        #[test]
        fn norm_triangle_inequality(m in family_strategy(), x in prop::collection::vec(-5.0f64..5.0, 6), y in prop::collection::vec(-5.0f64..5.0, 6)) {
            let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let lhs = luxemburg_seq_norm(&m, &s);
            let rhs = luxemburg_seq_norm(&m, &x) + luxemburg_seq_norm(&m, &y);
            prop_assert!(lhs <= rhs * (1.0 + 1e-10));
        }

        #[test]
        fn norm_is_monotone(m in family_strategy(), x in vec_strategy(), bump in prop::collection::vec(0.0f64..2.0, 12)) {
            let y: Vec<f64> = x.iter().zip(&bump).map(|(a, b)| a.abs() + b).collect();
            prop_assert!(luxemburg_seq_norm(&m, &x) <= luxemburg_seq_norm(&m, &y) * (1.0 + 1e-12));
        }

        #[test]
        fn modular_is_one_at_norm(m in family_strategy(), x in vec_strategy()) {
            let n = luxemburg_seq_norm(&m, &x);
            prop_assume!(n > 0.0);
            let pieces: Vec<(f64, f64)> = x.iter().map(|&v| (1.0, v)).collect();
            prop_assert!((modular(&m, &pieces, n) - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn monotone_under_submajorization(q in 1.0f64..2.0, n in 1u64..10, a in prop::collection::vec(0.0f64..3.0, 2..8), mix in 0.0f64..1.0) {
            // b = a; a' = average of a pulled toward its mean is submajorized by a
            let m = OrliczFunction::mn(q.min(2.0), n).unwrap();
            let mean = a.iter().sum::<f64>() / a.len() as f64;
            let averaged: Vec<f64> = a.iter().map(|v| mix * v + (1.0 - mix) * mean).collect();
            let (fa, fb) = (crate::rearrange::rearrange_sequence(&averaged), crate::rearrange::rearrange_sequence(&a));
            prop_assert!(crate::rearrange::submajorizes(&fb, &fa, 1e-12));
            prop_assert!(luxemburg_seq_norm(&m, &averaged) <= luxemburg_seq_norm(&m, &a) * (1.0 + 1e-9));
        }

        #[test]
        fn smaller_function_gives_smaller_norm(p in 1.0f64..2.0, x in vec_strategy()) {
            // t^p ≤ max{t^p, t²} pointwise
            let small = luxemburg_seq_norm(&OrliczFunction::power(p).unwrap(), &x);
            let big = luxemburg_seq_norm(&OrliczFunction::max_p2(p).unwrap(), &x);
            prop_assert!(small <= big * (1.0 + 1e-12));
        }

        #[test]
        fn mp_norm_against_kfunc(p in 1.0f64..2.0, pieces in prop::collection::vec((0.01f64..3.0, 0.0f64..5.0), 1..8)) {
            let f = DecreasingStep::from_plateaus(pieces).unwrap();
            prop_assume!(!f.is_zero());
            let r = luxemburg_fn_norm(&OrliczFunction::mp(p).unwrap(), &f) / lp_plus_l2_kfunc(&f, p);
            prop_assert!(r >= 0.5 - 1e-12 && r <= 2.0 * (2.0 / p).powf(1.0 / p) + 1e-12, "ratio {}", r);
        }

        #[test]
        fn function_norm_homogeneous(p in 1.0f64..2.0, pieces in prop::collection::vec((0.01f64..3.0, 0.0f64..5.0), 1..8), c in 0.01f64..50.0) {
            let f = DecreasingStep::from_plateaus(pieces).unwrap();
            let m = OrliczFunction::mp(p).unwrap();
            let n = luxemburg_fn_norm(&m, &f);
            prop_assert!((luxemburg_fn_norm(&m, &f.scale(c)) - c * n).abs() <= 1e-10 * (c * n).max(1e-300));
        }
    }
}
