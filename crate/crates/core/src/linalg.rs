//! Dense complex 2×2 / 4×4 linear algebra.
//!
//! Two-qubit operators use the computational basis ordered
//! `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`, with subsystem A as the slow index.
//! Everything here is allocation-light and pure; no general n×n support.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity slack accepted by [`hermitian_eigen`].
pub const EIGEN_HERMITIAN_TOL: f64 = 1e-10;
/// Hermiticity and trace slack for a [`DensityMatrix`].
pub const STATE_TOL: f64 = 1e-12;
/// Negative eigenvalues down to this are treated as rounding noise.
pub const CLAMP_SLACK: f64 = 1e-10;
/// Eigenvalues below `-NEGATIVE_EIGEN_LIMIT` mean the input is genuinely not PSD.
pub const NEGATIVE_EIGEN_LIMIT: f64 = 1e-8;

const MAX_SWEEPS: usize = 64;

/// Shorthand for `Complex64::new`.
#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix of dimension 2 or 4, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::input(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        debug_assert!(dim == 2 || dim == 4);
        Self {
            dim,
            data: vec![Complex64::default(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        check_dim(diag.len())?;
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = c(d, 0.0);
        }
        Ok(m)
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        check_dim(u.len())?;
        if u.len() != v.len() {
            return Err(Error::input("outer product of vectors of different length"));
        }
        Ok(Self::from_fn(u.len(), |i, j| u[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// Entrywise complex conjugate in the fixed basis.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `‖M − M†‖_HS`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(M + M†)/2`, with an exactly real diagonal.
    pub fn hermitian_part(&self) -> Self {
        let mut m = Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        for i in 0..self.dim {
            m[(i, i)].im = 0.0;
        }
        m
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Transpose on the B (fast) index of a 4×4 operator.
    pub fn partial_transpose_b(&self) -> Result<Self> {
        if self.dim != 4 {
            return Err(Error::input("partial transpose needs a 4x4 operator"));
        }
        Ok(Self::from_fn(4, |i, j| {
            let (ia, ib) = (i / 2, i % 2);
            let (ja, jb) = (j / 2, j % 2);
            self[(2 * ia + jb, 2 * ja + ib)]
        }))
    }

    /// Quadratic form `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::default();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += v[i].conj() * self[(i, j)] * v[j];
            }
        }
        acc
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::input(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::input(format!("unsupported matrix dimension {dim}")))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

// Arithmetic operators panic on dimension mismatch; the fallible entry points
// (tensor_product, hs_distance, ...) validate first.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::default() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn sigma_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 1)] = c(0.0, -1.0);
    m[(1, 0)] = c(0.0, 1.0);
    m
}

pub fn sigma_z() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 1)] = c(-1.0, 0.0);
    m
}

/// Pauli matrices indexed 1 = x, 2 = y, 3 = z.
pub fn pauli(axis: usize) -> ComplexMatrix {
    match axis {
        1 => sigma_x(),
        2 => sigma_y(),
        3 => sigma_z(),
        _ => panic!("pauli axis must be 1, 2 or 3, got {axis}"),
    }
}

/// `n·σ` for a real 3-vector `n`.
pub fn pauli_dot(n: [f64; 3]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 0)] = c(n[2], 0.0);
    m[(1, 1)] = c(-n[2], 0.0);
    m[(0, 1)] = c(n[0], -n[1]);
    m[(1, 0)] = c(n[0], n[1]);
    m
}

/// Kronecker product of two single-qubit operators, A as the slow index.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != 2 || b.dim != 2 {
        return Err(Error::input(format!(
            "tensor product expects two 2x2 factors, got {}x{} and {}x{}",
            a.dim, a.dim, b.dim, b.dim
        )));
    }
    Ok(ComplexMatrix::from_fn(4, |i, j| {
        a[(i / 2, j / 2)] * b[(i % 2, j % 2)]
    }))
}

/// Spectrum of a Hermitian matrix: eigenvalues in descending order, with the
/// matching orthonormal eigenvectors as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V · diag(f(λ)) · V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * mapped[k] * self.vectors[(j, k)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }
}

/// Cyclic complex Jacobi diagonalization.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let dev = h.hermitian_deviation();
    if dev > EIGEN_HERMITIAN_TOL {
        return Err(Error::input(format!(
            "matrix is not Hermitian (‖M − M†‖ = {dev:.3e})"
        )));
    }
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.hs_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Zeroes `a[p][q]` with the unitary `J = diag(1, e^{-iφ}) · R(θ)` acting on
/// the (p, q) plane, where `a[p][q] = r e^{iφ}`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    let j_pp = c(cs, 0.0);
    let j_pq = c(sn, 0.0);
    let j_qp = phase.conj() * (-sn);
    let j_qq = phase.conj() * cs;

    let n = a.dim();
    // a ← a J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    // a ← J† a
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::default();
    a[(q, p)] = Complex64::default();
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    // v ← v J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}

/// Principal square root of a PSD Hermitian matrix.
///
/// Eigenvalues above `-NEGATIVE_EIGEN_LIMIT` but below zero are clamped to
/// zero; anything more negative is reported as a domain error. Eigenvalues
/// under the rounding floor `4·n·ε·max|λ|` are also set to zero, since their
/// square roots would be pure noise at the `√ε` level.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    let min = eig.min_value();
    if min < -NEGATIVE_EIGEN_LIMIT {
        return Err(Error::domain(format!(
            "matrix is not positive semidefinite (min eigenvalue {min:.3e})"
        )));
    }
    let scale = eig.values.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
    let floor = 4.0 * m.dim() as f64 * f64::EPSILON * scale;
    Ok(eig
        .map_spectrum(|l| if l <= floor { 0.0 } else { l.sqrt() })
        .hermitian_part())
}

/// `⟨A, B⟩ = tr(A† B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    a.same_dim(b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// `‖A − B‖ = √tr((A−B)†(A−B))`.
pub fn hs_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.same_dim(b)?;
    Ok((a - b).hs_norm())
}

/// Two-qubit density matrix: 4×4, Hermitian, unit trace, PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.dim() != 4 {
            return Err(Error::input("a two-qubit density matrix is 4x4"));
        }
        let herm = m.hermitian_deviation();
        if herm > STATE_TOL {
            return Err(Error::input(format!(
                "density matrix is not Hermitian (‖M − M†‖ = {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::input(format!(
                "density matrix trace is {:.15}, expected 1",
                tr.re
            )));
        }
        let min = hermitian_eigen(&m)?.min_value();
        if min < -CLAMP_SLACK {
            return Err(Error::input(format!(
                "density matrix is not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self(m))
    }

    /// Normalizes a Hermitian PSD operator by its trace, then validates.
    pub fn from_unnormalized(m: &ComplexMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if tr.abs() < 1e-300 {
            return Err(Error::domain("operator has zero trace"));
        }
        Self::new(m.scale(1.0 / tr).hermitian_part())
    }

    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        if psi.len() != 4 {
            return Err(Error::input("a two-qubit pure state has 4 amplitudes"));
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::input("zero state vector"));
        }
        let scaled: Vec<Complex64> = psi.iter().map(|z| z / norm.sqrt()).collect();
        Self::new(ComplexMatrix::outer(&scaled, &scaled)?.hermitian_part())
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix::identity(4).scale(0.25))
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_valid(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

pub fn partial_transpose_b(rho: &DensityMatrix) -> ComplexMatrix {
    rho.0
        .partial_transpose_b()
        .expect("density matrices are 4x4")
}
