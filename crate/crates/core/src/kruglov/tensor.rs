//! Dense tensor blocks, the symmetrization E_k and the algebraic identities
//! behind the noncommutative Kruglov operator.

use serde::Serialize;

use crate::combinat::{binomial, permutations};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::report::{ReportBuilder, VerificationReport};

/// Largest admissible tensor dimension `d^k`.
pub const TENSOR_CAP: usize = 81;

/// Largest admissible tensor order.
pub const MAX_ORDER: usize = 4;

/// Identity tolerance for the algebraic checks.
pub const IDENTITY_TOL: f64 = 1e-10;

/// A `d^k × d^k` matrix acting on `(ℂ^d)^{⊗k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorElement {
    pub order: usize,
    pub leg_dim: usize,
    pub matrix: CMatrix,
}

fn check_size(d: usize, k: usize) -> Result<usize> {
    if k > MAX_ORDER {
        return Err(Error::SizeCap { size: k, cap: MAX_ORDER });
    }
    let size = d.checked_pow(k as u32).unwrap_or(usize::MAX);
    if size > TENSOR_CAP {
        return Err(Error::SizeCap { size, cap: TENSOR_CAP });
    }
    Ok(size)
}

fn leg_dim(u: &[&CMatrix]) -> Result<usize> {
    let d = u.first().map_or(1, |m| m.rows());
    for m in u {
        if !m.is_square() {
            return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
        }
        if m.rows() != d {
            return Err(Error::InvalidArgument("tensor legs must share one dimension".into()));
        }
    }
    Ok(d)
}

impl TensorElement {
    pub fn new(matrix: CMatrix, leg_dim: usize, order: usize) -> Result<Self> {
        let size = check_size(leg_dim, order)?;
        if matrix.rows() != size || matrix.cols() != size {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{}, expected {size}x{size}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { order, leg_dim, matrix })
    }

    /// `u_1 ⊗ … ⊗ u_k`.
    pub fn elementary(u: &[&CMatrix]) -> Result<Self> {
        let d = leg_dim(u)?;
        check_size(d, u.len())?;
        Ok(Self { order: u.len(), leg_dim: d, matrix: CMatrix::kron_all(u) })
    }

    /// `τ^{⊗k}`, the normalised trace.
    pub fn trace(&self) -> num_complex::Complex64 {
        self.matrix.trace() / self.matrix.rows() as f64
    }

    /// `E_k(T) = (1/k!) Σ_ρ P_ρ T P_ρ*`, averaging over leg permutations.
    pub fn conditional_expectation(&self) -> Self {
        let (d, k) = (self.leg_dim, self.order);
        let n = self.matrix.rows();
        let perms = permutations(k);
        let maps: Vec<Vec<usize>> = perms.iter().map(|rho| leg_permutation(d, k, rho)).collect();
        let mut out = CMatrix::zeros(n, n);
        let w = 1.0 / perms.len() as f64;
        for map in &maps {
            for i in 0..n {
                for j in 0..n {
                    out[(map[i], map[j])] += self.matrix[(i, j)] * w;
                }
            }
        }
        Self { order: k, leg_dim: d, matrix: out }
    }
}

/// Index map of the leg permutation `ρ` on `(ℂ^d)^{⊗k}`: the multi-index
/// `(i_1, …, i_k)` goes to the one whose leg `ρ(m)` carries `i_m`.
fn leg_permutation(d: usize, k: usize, rho: &[usize]) -> Vec<usize> {
    let n = d.pow(k as u32);
    (0..n)
        .map(|idx| {
            let mut digits = vec![0usize; k];
            let mut rest = idx;
            for m in (0..k).rev() {
                digits[m] = rest % d;
                rest /= d;
            }
            let mut moved = vec![0usize; k];
            for m in 0..k {
                moved[rho[m]] = digits[m];
            }
            moved.iter().fold(0, |acc, &x| acc * d + x)
        })
        .collect()
}

/// `(1/k!) Σ_ρ u_{ρ(1)} ⊗ … ⊗ u_{ρ(k)}`.
pub fn symmetrize(u: &[&CMatrix]) -> Result<TensorElement> {
    let d = leg_dim(u)?;
    let k = u.len();
    let size = check_size(d, k)?;
    let mut out = CMatrix::zeros(size, size);
    let perms = permutations(k);
    for rho in &perms {
        let legs: Vec<&CMatrix> = rho.iter().map(|&i| u[i]).collect();
        out.add_assign_scaled(&CMatrix::kron_all(&legs), 1.0 / perms.len() as f64);
    }
    Ok(TensorElement { order: k, leg_dim: d, matrix: out })
}

/// `y_k(x) = Σ_m 1^{⊗(m−1)} ⊗ x ⊗ 1^{⊗(k−m)}`; `y_0 = 0` on a one-dimensional space.
pub fn nc_kruglov_tensor(x: &CMatrix, k: usize) -> Result<TensorElement> {
    let d = leg_dim(&[x])?;
    let size = check_size(d, k)?;
    if k == 0 {
        return Ok(TensorElement { order: 0, leg_dim: d, matrix: CMatrix::zeros(1, 1) });
    }
    let one = CMatrix::identity(d);
    let mut out = CMatrix::zeros(size, size);
    for m in 0..k {
        let legs: Vec<&CMatrix> = (0..k).map(|j| if j == m { x } else { &one }).collect();
        out.add_assign_scaled(&CMatrix::kron_all(&legs), 1.0);
    }
    Ok(TensorElement { order: k, leg_dim: d, matrix: out })
}

fn check_projection(e: &CMatrix) -> Result<()> {
    if !e.is_square() {
        return Err(Error::NonSquare { rows: e.rows(), cols: e.cols() });
    }
    let dev = e.matmul(e).max_abs_diff(e).max(e.hermitian_defect());
    if dev > 1e-10 {
        return Err(Error::Precondition(format!("e is not a projection (defect {dev:e})")));
    }
    Ok(())
}

fn rows_of(m: &CMatrix) -> Vec<Vec<(f64, f64)>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(|z| (z.re, z.im)).collect()).collect()
}

#[derive(Serialize)]
struct PairInputs {
    x: Vec<Vec<(f64, f64)>>,
    e: Vec<Vec<(f64, f64)>>,
}

/// Deviation in `Σ_k k·C(n,k)·E_n(x ⊗ e^{⊗(k−1)} ⊗ (1−e)^{⊗(n−k)}) = Σ_m 1⊗…⊗x⊗…⊗1`.
pub fn strange_equality_deviation(n: usize, x: &CMatrix, e: &CMatrix) -> Result<f64> {
    check_projection(e)?;
    let d = leg_dim(&[x, e])?;
    check_size(d, n)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let f = CMatrix::identity(d).sub(e);
    let size = d.pow(n as u32);
    let mut lhs = CMatrix::zeros(size, size);
    for k in 1..=n {
        let mut legs: Vec<&CMatrix> = vec![x];
        legs.extend(std::iter::repeat_n(e, k - 1));
        legs.extend(std::iter::repeat_n(&f, n - k));
        let t = TensorElement::elementary(&legs)?.conditional_expectation();
        lhs.add_assign_scaled(&t.matrix, k as f64 * binomial(n, k));
    }
    let rhs = nc_kruglov_tensor(x, n)?.matrix;
    Ok(lhs.max_abs_diff(&rhs))
}

pub fn check_strange_equality(n: usize, x: &CMatrix, e: &CMatrix) -> Result<VerificationReport> {
    let dev = strange_equality_deviation(n, x, e)?;
    let mut b = ReportBuilder::new("strange-equality")
        .param("n", n)
        .param("d", x.rows())
        .inputs(&PairInputs { x: rows_of(x), e: rows_of(e) })
        .bound(IDENTITY_TOL);
    b.deviation(dev);
    Ok(b.finish())
}

/// `α_{n,k}(x) = C(n,k) E_n(x^{⊗k} ⊗ (1−e)^{⊗(n−k)})`.
pub fn alpha(n: usize, k: usize, x: &CMatrix, e: &CMatrix) -> Result<CMatrix> {
    if k > n || k == 0 {
        return Err(Error::InvalidArgument(format!("need 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    let d = leg_dim(&[x, e])?;
    check_size(d, n)?;
    let f = CMatrix::identity(d).sub(e);
    let mut legs: Vec<&CMatrix> = vec![x; k];
    legs.extend(std::iter::repeat_n(&f, n - k));
    let t = TensorElement::elementary(&legs)?.conditional_expectation();
    Ok(t.matrix.scale(binomial(n, k)))
}

/// Checks `α_{n,k}(x)α_{n,k}(y) = α_{n,k}(xy)` on pairs compressed by e.
pub fn check_alpha_multiplicative(
    n: usize,
    k: usize,
    e: &CMatrix,
    samples: &[(CMatrix, CMatrix)],
) -> Result<VerificationReport> {
    check_projection(e)?;
    for (x, y) in samples {
        for z in [x, y] {
            let compressed = e.matmul(z).matmul(e);
            let dev = compressed.max_abs_diff(z);
            if dev > 1e-10 * z.max_abs().max(1.0) {
                return Err(Error::Precondition(format!("sample is not in eNe (|exe − x| = {dev:e})")));
            }
        }
    }
    let mut b = ReportBuilder::new("alpha-multiplicative")
        .param("n", n)
        .param("k", k)
        .param("d", e.rows())
        .inputs(&samples.iter().map(|(x, y)| (rows_of(x), rows_of(y))).collect::<Vec<_>>())
        .bound(IDENTITY_TOL);
    for (x, y) in samples {
        let lhs = alpha(n, k, x, e)?.matmul(&alpha(n, k, y, e)?);
        let rhs = alpha(n, k, &x.matmul(y), e)?;
        let scale = x.max_abs().max(1.0) * y.max_abs().max(1.0);
        b.deviation(lhs.max_abs_diff(&rhs) / scale);
    }
    Ok(b.finish())
}

/// Checks `[y_k(x), y_k(y)] = y_k([x, y])` on blocks `1 ≤ k ≤ kmax`.
pub fn check_commutator_identity(x: &CMatrix, y: &CMatrix, kmax: usize) -> Result<VerificationReport> {
    let d = leg_dim(&[x, y])?;
    let mut b = ReportBuilder::new("commutator-identity")
        .param("d", d)
        .param("kmax", kmax)
        .inputs(&(rows_of(x), rows_of(y)))
        .bound(IDENTITY_TOL);
    let c = x.commutator(y);
    for k in 1..=kmax {
        let (yx, yy) = (nc_kruglov_tensor(x, k)?, nc_kruglov_tensor(y, k)?);
        let lhs = yx.matrix.commutator(&yy.matrix);
        let rhs = nc_kruglov_tensor(&c, k)?.matrix;
        b.deviation(lhs.max_abs_diff(&rhs));
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kruglov::fock::{block_law, eigen_law};
    use crate::matrix::random_hermitian;
    use crate::rearrange::{HermitianElement, TraceMode};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_x() -> CMatrix {
        CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn pauli_z() -> CMatrix {
        CMatrix::from_real_diag(&[1.0, -1.0])
    }

    fn rank_one(d: usize, i: usize) -> CMatrix {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        CMatrix::from_real_diag(&v)
    }

    #[test]
    fn first_block_is_x() {
        let x = pauli_x();
        assert_eq!(nc_kruglov_tensor(&x, 1).unwrap().matrix, x);
    }

    #[test]
    fn second_block_of_diagonal_projection() {
        let y = nc_kruglov_tensor(&CMatrix::from_real_diag(&[1.0, 0.0]), 2).unwrap();
        assert_eq!(y.matrix, CMatrix::from_real_diag(&[2.0, 1.0, 1.0, 0.0]));
        assert!(y.conditional_expectation().matrix.max_abs_diff(&y.matrix) < 1e-15);
    }

    #[test]
    fn size_cap_enforced() {
        let x = CMatrix::identity(3);
        assert!(nc_kruglov_tensor(&x, 4).is_ok());
        assert!(matches!(nc_kruglov_tensor(&CMatrix::identity(4), 4), Err(Error::SizeCap { .. })));
        assert!(matches!(nc_kruglov_tensor(&CMatrix::identity(2), 5), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn symmetrize_two_legs() {
        let (x, z) = (pauli_x(), pauli_z());
        let s = symmetrize(&[&x, &z]).unwrap().matrix;
        let expect = x.kron(&z).add(&z.kron(&x)).scale(0.5);
        assert!(s.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn expectation_agrees_with_symmetrize() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..=4 {
            let legs: Vec<CMatrix> = (0..k).map(|_| random_hermitian(2, &mut rng)).collect();
            let refs: Vec<&CMatrix> = legs.iter().collect();
            let a = symmetrize(&refs).unwrap();
            let b = TensorElement::elementary(&refs).unwrap().conditional_expectation();
            assert!(a.matrix.max_abs_diff(&b.matrix) < 1e-12);
            // fixed point, idempotence and trace preservation
            let x = &legs[0];
            let power = TensorElement::elementary(&vec![x; k]).unwrap();
            assert!(power.conditional_expectation().matrix.max_abs_diff(&power.matrix) < 1e-12);
            let twice = b.conditional_expectation();
            assert!(twice.matrix.max_abs_diff(&b.matrix) < 1e-12);
            let t = TensorElement::elementary(&refs).unwrap();
            assert!((t.trace() - b.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn expectation_preserves_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let legs: Vec<CMatrix> = (0..3)
            .map(|_| {
                let h = random_hermitian(2, &mut rng);
                h.matmul(&h)
            })
            .collect();
        let refs: Vec<&CMatrix> = legs.iter().collect();
        let e = symmetrize(&refs).unwrap();
        let eig = e.matrix.hermitian_eigenvalues().unwrap();
        assert!(eig.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn block_spectra_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [2usize, 3] {
            let x = random_hermitian(d, &mut rng);
            let h = HermitianElement::new(x.clone(), TraceMode::Normalized).unwrap();
            let eig = eigen_law(&h);
            for k in 1..=4 {
                if d.pow(k as u32) > TENSOR_CAP {
                    continue;
                }
                let t = nc_kruglov_tensor(&x, k).unwrap();
                let mut tensor_eig = t.matrix.hermitian_eigenvalues().unwrap();
                tensor_eig.reverse();
                let law = block_law(&eig, k).unwrap();
                // expand the block law into a multiset of d^k eigenvalues
                let n = tensor_eig.len() as f64;
                let mut expanded = Vec::new();
                for &(v, m) in law.atoms() {
                    let c = (m * n).round() as usize;
                    expanded.extend(std::iter::repeat_n(v, c));
                }
                assert_eq!(expanded.len(), tensor_eig.len());
                for (a, b) in expanded.iter().zip(&tensor_eig) {
                    assert!((a - b).abs() < 1e-10, "d={d} k={k}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn strange_equality_cases() {
        let x = CMatrix::from_rows(vec![
            vec![Complex64::new(0.3, 0.0), Complex64::new(0.5, -0.2)],
            vec![Complex64::new(0.5, 0.2), Complex64::new(-1.1, 0.0)],
        ])
        .unwrap();
        let e = rank_one(2, 0);
        for n in 1..=4 {
            assert!(strange_equality_deviation(n, &x, &e).unwrap() < 1e-12);
            assert!(strange_equality_deviation(n, &e, &e).unwrap() < 1e-12);
        }
        // n = 2 by hand: x⊗1 + 1⊗x
        let one = CMatrix::identity(2);
        let expect = x.kron(&one).add(&one.kron(&x));
        assert!(nc_kruglov_tensor(&x, 2).unwrap().matrix.max_abs_diff(&expect) < 1e-15);
        assert!(check_strange_equality(3, &x, &e).unwrap().pass);
        assert!(matches!(check_strange_equality(2, &x, &x), Err(Error::Precondition(_))));
    }

    #[test]
    fn alpha_is_multiplicative_on_compressed_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let e = CMatrix::from_real_diag(&[1.0, 1.0, 0.0]);
        let mut samples = Vec::new();
        for _ in 0..5 {
            let x = e.matmul(&random_hermitian(3, &mut rng)).matmul(&e);
            let y = e.matmul(&random_hermitian(3, &mut rng)).matmul(&e);
            samples.push((x, y));
        }
        for (n, k) in [(3, 1), (3, 2), (4, 2), (2, 2)] {
            assert!(check_alpha_multiplicative(n, k, &e, &samples).unwrap().pass);
        }
        // projection image: α(e)² = α(e)
        let a = alpha(3, 1, &e, &e).unwrap();
        assert!(a.matmul(&a).max_abs_diff(&a) < 1e-12);
        let bad = vec![(random_hermitian(3, &mut rng), e.clone())];
        assert!(matches!(check_alpha_multiplicative(3, 1, &e, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn commutator_identity_cases() {
        let (x, z) = (pauli_x(), pauli_z());
        let r = check_commutator_identity(&x, &z, 3).unwrap();
        assert!(r.pass);
        assert!(check_commutator_identity(&x, &CMatrix::identity(2), 3).unwrap().pass);
        let d1 = CMatrix::from_real_diag(&[1.0, 2.0]);
        assert!(check_commutator_identity(&d1, &z, 3).unwrap().max_deviation.unwrap() == 0.0);
    }
}
