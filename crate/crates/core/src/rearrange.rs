//! Decreasing rearrangements, distribution functions, submajorization and the
//! dilation operators, on step functions and on matrix spectra.
//!
//! A [`DecreasingStep`] is the singular value function μ of a sequence, a step
//! function or a matrix: a finite list of plateaus `(length, value)` with
//! strictly decreasing nonnegative values. Past the last plateau the function is
//! zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Adjacent plateau values closer than this (relative) are merged.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "StepJson", into = "StepJson")]
pub struct DecreasingStep {
    plateaus: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepJson {
    plateaus: Vec<[f64; 2]>,
}

impl TryFrom<StepJson> for DecreasingStep {
    type Error = Error;
    fn try_from(j: StepJson) -> Result<Self> {
        Self::from_plateaus(j.plateaus.into_iter().map(|[l, v]| (l, v)))
    }
}

impl From<DecreasingStep> for StepJson {
    fn from(s: DecreasingStep) -> Self {
        StepJson { plateaus: s.plateaus.into_iter().map(|(l, v)| [l, v]).collect() }
    }
}

impl DecreasingStep {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Canonical rearrangement of arbitrary `(length, value)` pieces. Lengths
    /// must be finite and nonnegative, values finite and nonnegative.
    pub fn from_plateaus<I: IntoIterator<Item = (f64, f64)>>(pieces: I) -> Result<Self> {
        let mut v = Vec::new();
        for (len, val) in pieces {
            if !len.is_finite() || len < 0.0 {
                return Err(Error::Malformed(format!("plateau length {len} is not a finite nonnegative number")));
            }
            if !val.is_finite() || val < 0.0 {
                return Err(Error::Malformed(format!("plateau value {val} is not a finite nonnegative number")));
            }
            v.push((len, val));
        }
        Ok(Self::canonical(v))
    }

    /// Rearranges pieces that are already known to be valid.
    pub(crate) fn canonical(mut pieces: Vec<(f64, f64)>) -> Self {
        pieces.retain(|&(l, _)| l > 0.0);
        pieces.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
        for (len, val) in pieces {
            match out.last_mut() {
                Some(last) if last.1 - val <= MERGE_TOL * last.1 || (last.1 == 0.0 && val == 0.0) => {
                    last.0 += len;
                }
                _ => out.push((len, val)),
            }
        }
        Self { plateaus: out }
    }

    /// Decreasing rearrangement of `|x|` with respect to counting measure.
    pub fn from_sequence(x: &[f64]) -> Self {
        Self::canonical(x.iter().map(|v| (1.0, v.abs())).collect())
    }

    pub fn plateaus(&self) -> &[(f64, f64)] {
        &self.plateaus
    }

    pub fn len(&self) -> usize {
        self.plateaus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plateaus.is_empty()
    }

    /// True when the function vanishes identically.
    pub fn is_zero(&self) -> bool {
        self.plateaus.iter().all(|&(_, v)| v == 0.0)
    }

    pub fn total_length(&self) -> f64 {
        self.plateaus.iter().map(|p| p.0).sum()
    }

    /// Measure of the support (plateaus with positive value).
    pub fn support_length(&self) -> f64 {
        self.plateaus.iter().filter(|p| p.1 > 0.0).map(|p| p.0).sum()
    }

    pub fn max_value(&self) -> f64 {
        self.plateaus.first().map_or(0.0, |p| p.1)
    }

    /// Right end of every plateau.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.plateaus
            .iter()
            .map(|&(l, _)| {
                acc += l;
                acc
            })
            .collect()
    }

    /// μ(t), right-continuous; zero past the last plateau.
    pub fn value_at(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &(l, v) in &self.plateaus {
            acc += l;
            if t < acc {
                return v;
            }
        }
        0.0
    }

    /// ∫₀ᵗ μ(s) ds.
    pub fn integral_to(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut int = 0.0;
        for &(l, v) in &self.plateaus {
            if t <= acc + l {
                return int + (t - acc).max(0.0) * v;
            }
            acc += l;
            int += l * v;
        }
        int
    }

    pub fn l1_norm(&self) -> f64 {
        self.plateaus.iter().map(|&(l, v)| l * v).sum()
    }

    /// (∫ μ^p)^{1/p}.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.plateaus.iter().map(|&(l, v)| l * v.powf(p)).sum::<f64>().powf(1.0 / p)
    }

    pub fn scale(&self, c: f64) -> Self {
        let c = c.abs();
        Self::canonical(self.plateaus.iter().map(|&(l, v)| (l, v * c)).collect())
    }

    /// Applies an increasing map to the values (e.g. `v ↦ v^{1/p}`).
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self::canonical(self.plateaus.iter().map(|&(l, v)| (l, f(v))).collect())
    }

    /// Truncates or pads with zeros so that the total length becomes `len`.
    pub fn restrict_to(&self, len: f64) -> Self {
        let mut out = Vec::new();
        let mut acc = 0.0;
        for &(l, v) in &self.plateaus {
            if acc >= len {
                break;
            }
            let take = l.min(len - acc);
            out.push((take, v));
            acc += take;
        }
        if acc < len {
            out.push((len - acc, 0.0));
        }
        Self::canonical(out)
    }

    /// Values as a sequence, valid when every plateau length is an integer
    /// (counting measure).
    pub fn to_counting_sequence(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for &(l, v) in &self.plateaus {
            let n = l.round();
            if (l - n).abs() > 1e-9 {
                return Err(Error::Precondition(format!("plateau length {l} is not an integer")));
            }
            out.extend(std::iter::repeat_n(v, n as usize));
        }
        Ok(out)
    }
}

/// μ(|x|) for a finite real sequence.
pub fn rearrange_sequence(x: &[f64]) -> DecreasingStep {
    DecreasingStep::from_sequence(x)
}

/// Distribution function `d(s) = m{μ > s}` of a nonnegative step function.
///
/// `d(s) = below` for `s < steps[0].0`, and `d(s) = steps[i].1` for
/// `s ∈ [steps[i].0, steps[i+1].0)`; the last step has mass 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionFn {
    pub below: f64,
    pub steps: Vec<(f64, f64)>,
}

impl DistributionFn {
    pub fn eval(&self, s: f64) -> f64 {
        let idx = self.steps.partition_point(|&(th, _)| th <= s);
        if idx == 0 {
            self.below
        } else {
            self.steps[idx - 1].1
        }
    }
}

pub fn distribution_of(x: &DecreasingStep) -> DistributionFn {
    let total = x.total_length();
    let mut steps = Vec::with_capacity(x.len());
    // Walking plateaus from the smallest value up, the mass strictly above
    // value v_j is the length of the plateaus before j.
    let mut above: f64 = total;
    for &(l, v) in x.plateaus().iter().rev() {
        above -= l;
        steps.push((v, above.max(0.0)));
    }
    if let Some(last) = steps.last_mut() {
        last.1 = 0.0;
    }
    DistributionFn { below: total, steps }
}

/// `μ(t) = inf{s : d(s) ≤ t}` as a canonical step function.
pub fn right_inverse(d: &DistributionFn) -> DecreasingStep {
    let mut pieces = Vec::with_capacity(d.steps.len());
    let mut prev = d.below;
    for &(th, mass) in &d.steps {
        pieces.push(((prev - mass).max(0.0), th));
        prev = mass;
    }
    DecreasingStep::canonical(pieces)
}

/// Trace normalisation of a matrix algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceMode {
    Counting,
    Normalized,
}

impl TraceMode {
    pub fn unit_weight(self, d: usize) -> f64 {
        match self {
            TraceMode::Counting => 1.0,
            TraceMode::Normalized => 1.0 / d as f64,
        }
    }
}

/// A Hermitian matrix with its trace.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianElement {
    matrix: CMatrix,
    trace_mode: TraceMode,
}

impl HermitianElement {
    pub fn new(matrix: CMatrix, trace_mode: TraceMode) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NonSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        let tol = 1e-12 * matrix.max_abs().max(1.0);
        let defect = matrix.hermitian_defect();
        if defect > tol {
            return Err(Error::Precondition(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(Self { matrix, trace_mode })
    }

    pub fn diagonal(diag: &[f64], trace_mode: TraceMode) -> Self {
        Self { matrix: CMatrix::from_real_diag(diag), trace_mode }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace_mode(&self) -> TraceMode {
        self.trace_mode
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// τ(A): the trace with the element's normalisation.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re * self.trace_mode.unit_weight(self.dim())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix.hermitian_eigenvalues().expect("square by construction")
    }

    pub fn singular_values(&self) -> DecreasingStep {
        singular_values(&self.matrix, self.trace_mode).expect("square by construction")
    }
}

/// μ(A) for a square matrix: eigenvalues of |A|, each on a plateau of length 1
/// (counting trace) or 1/d (normalised trace).
pub fn singular_values(a: &CMatrix, mode: TraceMode) -> Result<DecreasingStep> {
    let s = a.singular_values()?;
    let w = mode.unit_weight(a.rows());
    Ok(DecreasingStep::canonical(s.into_iter().map(|v| (w, v)).collect()))
}

/// `D_n`: repeats every entry n times.
pub fn dilate_discrete(x: &[f64], n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("dilation factor must be at least 1".into()));
    }
    Ok(x.iter().flat_map(|&v| std::iter::repeat_n(v, n)).collect())
}

/// `D_{1/n}`: means of consecutive blocks of n entries; a short last block is
/// padded with zeros.
pub fn average_discrete(x: &[f64], n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("dilation factor must be at least 1".into()));
    }
    Ok(x.chunks(n).map(|c| c.iter().sum::<f64>() / n as f64).collect())
}

/// `(D_u f)(s) = f(s/u)`: plateau lengths scale by u.
pub fn dilate_continuous(f: &DecreasingStep, u: f64) -> Result<DecreasingStep> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::InvalidArgument(format!("dilation parameter {u} must be positive")));
    }
    Ok(DecreasingStep { plateaus: f.plateaus.iter().map(|&(l, v)| (l * u, v)).collect() })
}

/// Rearrangement of the disjoint union of the arguments.
pub fn direct_sum(fs: &[DecreasingStep]) -> DecreasingStep {
    DecreasingStep::canonical(fs.iter().flat_map(|f| f.plateaus.iter().copied()).collect())
}

/// Pointwise sum of decreasing functions on (0, ∞); the result is decreasing.
pub fn pointwise_sum(fs: &[DecreasingStep]) -> DecreasingStep {
    let mut cuts: Vec<f64> = fs.iter().flat_map(DecreasingStep::breakpoints).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut pieces = Vec::with_capacity(cuts.len());
    let mut cursors = vec![(0usize, 0.0f64); fs.len()];
    let mut prev = 0.0;
    for &c in &cuts {
        if c <= prev {
            continue;
        }
        let mid = 0.5 * (prev + c);
        let mut total = 0.0;
        for (f, cur) in fs.iter().zip(cursors.iter_mut()) {
            // advance this function's cursor to the plateau containing `mid`
            while cur.0 < f.plateaus.len() && cur.1 + f.plateaus[cur.0].0 <= mid {
                cur.1 += f.plateaus[cur.0].0;
                cur.0 += 1;
            }
            if cur.0 < f.plateaus.len() {
                total += f.plateaus[cur.0].1;
            }
        }
        pieces.push((c - prev, total));
        prev = c;
    }
    DecreasingStep::canonical(pieces)
}

/// Largest value of `∫₀ᵗ μ(b) − ∫₀ᵗ μ(a)` over the breakpoints of both
/// arguments (and hence over all t, by piecewise linearity of the integrals).
pub fn submajorization_gap(a: &DecreasingStep, b: &DecreasingStep) -> f64 {
    let mut ts: Vec<f64> = a.breakpoints();
    ts.extend(b.breakpoints());
    ts.sort_by(f64::total_cmp);
    let ia = PrefixIntegral::new(a);
    let ib = PrefixIntegral::new(b);
    ts.into_iter().map(|t| ib.at(t) - ia.at(t)).fold(0.0, f64::max)
}

/// True iff `b ≺≺ a`, i.e. `∫₀ᵗ μ(b) ≤ ∫₀ᵗ μ(a) + tol` for every t.
pub fn submajorizes(a: &DecreasingStep, b: &DecreasingStep, tol: f64) -> bool {
    submajorization_gap(a, b) <= tol
}

/// Checks `Σ μ(A_i) ≺≺ D_n Σ μ(A_i)` together with the pointwise form
/// `μ(t, Σ μ(A_i)) ≤ (D_n Σ μ(A_i))(t)`.
pub fn sum_dilation_bound(parts: &[DecreasingStep], n: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidArgument("dilation factor must be at least 1".into()));
    }
    let sum = pointwise_sum(parts);
    let dilated = dilate_continuous(&sum, n as f64)?;
    let pointwise = sum
        .breakpoints()
        .iter()
        .chain(dilated.breakpoints().iter())
        .flat_map(|&t| [t * (1.0 - 1e-12), t])
        .all(|t| sum.value_at(t) <= dilated.value_at(t) * (1.0 + 1e-12));
    Ok(pointwise && submajorizes(&dilated, &sum, 1e-12 * sum.l1_norm().max(1.0)))
}

/// Prefix integrals of a step function, for repeated `∫₀ᵗ` queries.
struct PrefixIntegral {
    ends: Vec<f64>,
    cum: Vec<f64>,
    values: Vec<f64>,
}

impl PrefixIntegral {
    fn new(f: &DecreasingStep) -> Self {
        let mut ends = Vec::with_capacity(f.len());
        let mut cum = Vec::with_capacity(f.len());
        let (mut e, mut c) = (0.0, 0.0);
        for &(l, v) in f.plateaus() {
            e += l;
            c += l * v;
            ends.push(e);
            cum.push(c);
        }
        Self { ends, cum, values: f.plateaus().iter().map(|p| p.1).collect() }
    }

    fn at(&self, t: f64) -> f64 {
        let idx = self.ends.partition_point(|&e| e <= t);
        if idx >= self.ends.len() {
            return self.cum.last().copied().unwrap_or(0.0);
        }
        let (start, base) = if idx == 0 { (0.0, 0.0) } else { (self.ends[idx - 1], self.cum[idx - 1]) };
        base + (t - start) * self.values[idx]
    }
}
