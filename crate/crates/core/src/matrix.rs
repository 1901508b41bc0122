//! Small dense complex matrices: the arithmetic needed by the tensor checks and a
//! cyclic Jacobi eigensolver for Hermitian input.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Sweep cap for the Jacobi iteration; convergence on the sizes used here takes < 15.
const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius mass, relative to the input norm.
const JACOBI_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Malformed("ragged matrix rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|row| row.iter().map(|&v| Complex64::new(v, 0.0)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.cols.max(1)).map(<[Complex64]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Kronecker product of a list of factors, left to right.
    pub fn kron_all(factors: &[&CMatrix]) -> Self {
        let mut acc = Self::identity(1);
        for f in factors {
            acc = acc.kron(f);
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise violation of `A = A*`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Eigenvalues in decreasing order. The input is symmetrised first, so tiny
    /// Hermitian defects are ignored.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        Ok(hermitian_eigenvalues(self))
    }

    /// Decreasing singular values, i.e. the eigenvalues of `|A|`.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut vals = if self.is_hermitian(1e-12 * scale.max(1.0)) {
            hermitian_eigenvalues(self).into_iter().map(f64::abs).collect::<Vec<_>>()
        } else {
            let gram = self.adjoint().matmul(self);
            hermitian_eigenvalues(&gram).into_iter().map(|v| v.max(0.0).sqrt()).collect()
        };
        vals.sort_by(|a, b| b.total_cmp(a));
        Ok(vals)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues of a Hermitian matrix through its real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of the input with every
/// eigenvalue doubled.
fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let n = a.rows;
    if n == 0 {
        return Vec::new();
    }
    let m = 2 * n;
    let mut s = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let h = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            s[i * m + j] = h.re;
            s[(i + n) * m + (j + n)] = h.re;
            s[i * m + (j + n)] = -h.im;
            s[(i + n) * m + j] = h.im;
        }
    }
    let mut eig = jacobi_symmetric(&mut s, m);
    eig.sort_by(|a, b| b.total_cmp(a));
    eig.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
}

/// Cyclic Jacobi on a dense real symmetric matrix (row-major, destroyed).
fn jacobi_symmetric(s: &mut [f64], m: usize) -> Vec<f64> {
    let total: f64 = s.iter().map(|v| v * v).sum::<f64>().sqrt();
    if total == 0.0 {
        return vec![0.0; m];
    }
    let threshold = JACOBI_TOL * total;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i * m + j] * s[i * m + j])
            .sum::<f64>()
            .sqrt();
        if off < threshold {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = s[p * m + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let akp = s[k * m + p];
                    let akq = s[k * m + q];
                    s[k * m + p] = c * akp - sn * akq;
                    s[k * m + q] = sn * akp + c * akq;
                }
                for k in 0..m {
                    let apk = s[p * m + k];
                    let aqk = s[q * m + k];
                    s[p * m + k] = c * apk - sn * aqk;
                    s[q * m + k] = sn * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| s[i * m + i]).collect()
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..d {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random unitary from Gram-Schmidt on a random complex matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> =
            (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for u in &cols {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let mut u = CMatrix::zeros(d, d);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}
