//! The truncated noncommutative Kruglov operator on a matrix algebra with
//! normalised trace, computed blockwise from the spectrum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::distribution::{DiscreteDistribution, ATOM_CAP};
use crate::combinat::{composition_count, compositions, factorial, poisson1_pmf, poisson1_tail};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::rearrange::{HermitianElement, TraceMode};
use crate::report::{ReportBuilder, VerificationReport};

/// Spectral law of a Hermitian element: eigenvalues weighted by the trace.
pub fn eigen_law(x: &HermitianElement) -> DiscreteDistribution {
    let w = x.trace_mode().unit_weight(x.dim());
    DiscreteDistribution::merged(x.eigenvalues().into_iter().map(|v| (v, w)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockBlock {
    pub k: usize,
    /// `e^{-1}/k!`, the trace of the block unit.
    pub weight: f64,
    /// Spectral law of `y_k(x)` under the normalised trace of the block.
    pub law: DiscreteDistribution,
}

/// `0 ⊕ y_1(x) ⊕ … ⊕ y_K(x)` described blockwise by spectra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedFockSum {
    pub blocks: Vec<FockBlock>,
    pub tail_mass: f64,
}

impl TruncatedFockSum {
    /// The law of the whole element: blocks mixed by their weights.
    pub fn flatten(&self) -> DiscreteDistribution {
        DiscreteDistribution::merged(
            self.blocks.iter().flat_map(|b| b.law.atoms().iter().map(move |&(v, m)| (v, m * b.weight))).collect(),
        )
    }

    /// `σ(𝒦x)`: the weighted trace of the truncated element.
    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight * b.law.mean()).sum()
    }
}

/// Law of `Σ_{m ≤ k} 1⊗…⊗x⊗…⊗1` by enumerating how many legs sit on each
/// eigenvalue: multinomial weights over weak compositions of k.
pub fn block_law(eig: &DiscreteDistribution, k: usize) -> Result<DiscreteDistribution> {
    let r = eig.len();
    let count = composition_count(k, r);
    if count > ATOM_CAP as f64 {
        return Err(Error::AtomExplosion { count: count.min(usize::MAX as f64) as usize, cap: ATOM_CAP });
    }
    let kf = factorial(k);
    let atoms = compositions(k, r)
        .into_iter()
        .map(|c| {
            let mut value = 0.0;
            let mut mass = kf;
            for (&ci, &(v, m)) in c.iter().zip(eig.atoms()) {
                value += ci as f64 * v;
                mass *= m.powi(ci as i32) / factorial(ci);
            }
            (value, mass)
        })
        .collect();
    Ok(DiscreteDistribution::merged(atoms))
}

/// Blocks `k = 0..=kmax` of `𝒦x` for x with normalised trace.
pub fn nc_kruglov_spectral(x: &HermitianElement, kmax: usize) -> Result<TruncatedFockSum> {
    if x.trace_mode() != TraceMode::Normalized {
        return Err(Error::Precondition("the Kruglov operator needs a normalised trace".into()));
    }
    if kmax == 0 {
        return Err(Error::InvalidArgument("kmax must be at least 1".into()));
    }
    let eig = eigen_law(x);
    let weights = poisson1_pmf(kmax);
    let mut blocks = Vec::with_capacity(kmax + 1);
    blocks.push(FockBlock { k: 0, weight: weights[0], law: DiscreteDistribution::dirac(0.0) });
    for (k, &w) in weights.iter().enumerate().skip(1) {
        blocks.push(FockBlock { k, weight: w, law: block_law(&eig, k)? });
    }
    Ok(TruncatedFockSum { blocks, tail_mass: poisson1_tail(kmax) })
}

/// `τ(exp(iA) − 1)` from the eigenvalues of a Hermitian A with normalised trace.
fn trace_exp_minus_one(a: &CMatrix) -> Result<Complex64> {
    let eig = a.hermitian_eigenvalues()?;
    let d = eig.len() as f64;
    Ok(eig.iter().map(|&v| Complex64::from_polar(1.0, v) - 1.0).sum::<Complex64>() / d)
}

/// Checks `exp(τ(e^{iΣλ_k x_k} − 1)) = Π_k exp(τ(e^{iλ_k x_k} − 1))` for
/// pairwise disjointly supported Hermitian pieces over `grid^m`.
pub fn check_independence_charfn(pieces: &[HermitianElement], grid: &[f64]) -> Result<VerificationReport> {
    if pieces.is_empty() {
        return Err(Error::InvalidArgument("need at least one piece".into()));
    }
    let d = pieces[0].dim();
    for p in pieces {
        if p.dim() != d || p.trace_mode() != TraceMode::Normalized {
            return Err(Error::Precondition("pieces must share one normalised matrix algebra".into()));
        }
    }
    for (i, a) in pieces.iter().enumerate() {
        for b in &pieces[i + 1..] {
            let prod = a.matrix().matmul(b.matrix()).max_abs();
            if prod > 1e-12 {
                return Err(Error::Precondition(format!("pieces are not disjointly supported (|x_j x_k| = {prod:e})")));
            }
        }
    }
    let m = pieces.len();
    let total = (grid.len() as f64).powi(m as i32);
    if total > 1e5 {
        return Err(Error::InvalidArgument(format!("grid^{m} has {total} points, cap is 1e5")));
    }
    let mut b = ReportBuilder::new("independence-charfn")
        .param("pieces", m)
        .param("dim", d)
        .param("grid", grid.len())
        .inputs(&pieces.iter().map(|p| p.matrix().to_rows()).collect::<Vec<_>>())
        .bound(1e-10);
    let mut idx = vec![0usize; m];
    loop {
        let lambdas: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
        let mut sum = CMatrix::zeros(d, d);
        let mut rhs = Complex64::new(1.0, 0.0);
        for (p, &l) in pieces.iter().zip(&lambdas) {
            sum.add_assign_scaled(p.matrix(), l);
            rhs *= trace_exp_minus_one(&p.matrix().scale(l))?.exp();
        }
        let lhs = trace_exp_minus_one(&sum)?.exp();
        b.deviation((lhs - rhs).norm());
        // odometer over the grid
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(b.finish());
            }
            idx[pos] += 1;
            if idx[pos] < grid.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
