//! Dense complex matrix kernel.
//!
//! Matrices are stored row-major. Eigen- and singular-value problems are
//! delegated to `nalgebra`; everything bipartite (partial transpose, partial
//! trace, Kronecker product) is index arithmetic over the row-major buffer.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Default tolerance below zero that PSD operations clamp instead of reject.
pub const DEFAULT_CLAMP_TOL: f64 = 1e-9;

/// Subsystem dimensions of a bipartite Hilbert space `H_A ⊗ H_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteDims {
    pub a: usize,
    pub b: usize,
}

impl BipartiteDims {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidDimension(a));
        }
        if b == 0 {
            return Err(Error::InvalidDimension(b));
        }
        Ok(Self { a, b })
    }

    /// `d ⊗ d` system.
    pub fn square(d: usize) -> Result<Self> {
        Self::new(d, d)
    }

    pub fn total(&self) -> usize {
        self.a * self.b
    }

    /// Dimension used in negativity denominators.
    pub fn min_dim(&self) -> usize {
        self.a.min(self.b)
    }

    pub fn is_square(&self) -> bool {
        self.a == self.b
    }

    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
        }
    }
}

impl fmt::Display for BipartiteDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}⊗{}", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(
            n,
            n,
            |i, j| {
                if i == j {
                    C64::new(diag[i], 0.0)
                } else {
                    ZERO
                }
            },
        )
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn column_vector(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        debug_assert_eq!(v.len(), self.rows);
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            self.shape(),
            other.shape(),
            "shape mismatch in max_abs_diff"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M - M†|`; infinite for non-square input.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `max |M†M - I|`
    pub fn unitarity_deviation(&self) -> f64 {
        let g = self.adjoint().matmul(self);
        g.max_abs_diff(&Self::identity(self.cols))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ in matmul");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matvec");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `⟨v|M|v⟩`
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.matvec(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    /// `Re tr(A† B)`, the real Frobenius inner product.
    pub fn real_inner(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// Hermitian part `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + adj[(i, j)]) * 0.5
        })
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

fn require_square(m: &ComplexMatrix) -> Result<usize> {
    if m.is_square() {
        Ok(m.rows)
    } else {
        Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        })
    }
}

fn require_bipartite(m: &ComplexMatrix, dims: BipartiteDims) -> Result<()> {
    require_square(m)?;
    if m.rows != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: m.rows,
        });
    }
    Ok(())
}

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `Q diag(f(λ)) Q†`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let q = &self.vectors;
        let w: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| q[(i, k)] * q[(j, k)].conj() * w[k])
                .sum::<C64>()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

pub fn hermitian_eig(m: &ComplexMatrix, hermiticity_tol: f64) -> Result<HermitianEigen> {
    let n = require_square(m)?;
    let deviation = m.hermiticity_deviation();
    if deviation > hermiticity_tol {
        return Err(Error::NotHermitian {
            deviation,
            tol: hermiticity_tol,
        });
    }
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let eig = m.hermitian_part().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Thin singular value decomposition `M = U diag(s) V†` with `s` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

pub fn svd(m: &ComplexMatrix) -> Svd {
    let k = m.rows.min(m.cols);
    if k == 0 {
        return Svd {
            u: ComplexMatrix::zeros(m.rows, 0),
            singular_values: Vec::new(),
            v: ComplexMatrix::zeros(m.cols, 0),
        };
    }
    let dec = m.to_nalgebra().svd(true, true);
    let u = dec.u.expect("svd computed with u");
    let v_t = dec.v_t.expect("svd computed with v_t");
    let s = dec.singular_values;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    Svd {
        u: ComplexMatrix::from_fn(m.rows, k, |i, j| u[(i, order[j])]),
        singular_values: order.iter().map(|&j| s[j]).collect(),
        v: ComplexMatrix::from_fn(m.cols, k, |i, j| v_t[(order[j], i)].conj()),
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows.min(m.cols) == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    require_square(m)?;
    Ok(singular_values(m).iter().sum())
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-clamp_tol, 0)`
/// are treated as zero; anything further below zero is rejected.
pub fn matrix_sqrt_psd(m: &ComplexMatrix, clamp_tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m, hermiticity_tol_for(m))?;
    check_clamp(&eig.values, clamp_tol)?;
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// Eigenvalues of a PSD matrix with noise in `[-clamp_tol, 0)` set to zero.
pub fn psd_eigenvalues(m: &ComplexMatrix, clamp_tol: f64) -> Result<Vec<f64>> {
    let eig = hermitian_eig(m, hermiticity_tol_for(m))?;
    check_clamp(&eig.values, clamp_tol)?;
    Ok(eig.values.into_iter().map(|l| l.max(0.0)).collect())
}

fn check_clamp(values: &[f64], clamp_tol: f64) -> Result<()> {
    match values.last() {
        Some(&min) if min < -clamp_tol => Err(Error::NegativeEigenvalue {
            value: min,
            tol: clamp_tol,
        }),
        _ => Ok(()),
    }
}

/// Hermiticity tolerance scaled to the matrix magnitude.
pub(crate) fn hermiticity_tol_for(m: &ComplexMatrix) -> f64 {
    1e-10 * m.max_norm().max(1.0)
}

/// `⟨i,j|M^{T_B}|k,l⟩ = ⟨i,l|M|k,j⟩`
pub fn partial_transpose(m: &ComplexMatrix, dims: BipartiteDims) -> Result<ComplexMatrix> {
    require_bipartite(m, dims)?;
    let (da, db) = (dims.a, dims.b);
    let mut out = ComplexMatrix::zeros(m.rows, m.cols);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(i * db + j, k * db + l)] = m[(i * db + l, k * db + j)];
                }
            }
        }
    }
    Ok(out)
}

/// Traces out the subsystem `which`, returning the reduced matrix on the other one.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: BipartiteDims,
    which: Subsystem,
) -> Result<ComplexMatrix> {
    require_bipartite(m, dims)?;
    let (da, db) = (dims.a, dims.b);
    Ok(match which {
        Subsystem::B => ComplexMatrix::from_fn(da, da, |i, k| {
            (0..db).map(|j| m[(i * db + j, k * db + j)]).sum()
        }),
        Subsystem::A => ComplexMatrix::from_fn(db, db, |j, l| {
            (0..da).map(|i| m[(i * db + j, i * db + l)]).sum()
        }),
    })
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = b.shape();
    ComplexMatrix::from_fn(a.rows * rb, a.cols * cb, |r, c| {
        a[(r / rb, c / cb)] * b[(r % rb, c % cb)]
    })
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨v|w⟩`
pub fn inner(v: &[C64], w: &[C64]) -> C64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

pub fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| standard_complex_normal(rng))
}

/// Orthonormalizes the columns in place with two passes of modified
/// Gram-Schmidt. Returns `false` if a column collapsed to zero.
pub fn orthonormalize_columns(m: &mut ComplexMatrix) -> bool {
    let (rows, cols) = m.shape();
    for j in 0..cols {
        let mut v = m.column(j);
        for _ in 0..2 {
            for p in 0..j {
                let q = m.column(p);
                let proj = inner(&q, &v);
                for (vi, qi) in v.iter_mut().zip(&q) {
                    *vi -= proj * qi;
                }
            }
        }
        let n = vector_norm(&v);
        if n < 1e-300 || !n.is_finite() {
            return false;
        }
        for vi in v.iter_mut() {
            *vi /= n;
        }
        debug_assert_eq!(v.len(), rows);
        m.set_column(j, &v);
    }
    true
}

/// Haar-random `rows × cols` isometry (`rows >= cols`); `cols == rows` gives a
/// Haar unitary.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    loop {
        let mut g = gaussian_matrix(rows, cols, rng);
        if orthonormalize_columns(&mut g) {
            return g;
        }
    }
}

/// Extends orthonormal columns to a full unitary by Gram-Schmidt against the
/// computational basis.
pub fn complete_to_unitary(thin: &ComplexMatrix) -> ComplexMatrix {
    let (n, k) = thin.shape();
    let mut out = ComplexMatrix::zeros(n, n);
    for j in 0..k {
        out.set_column(j, &thin.column(j));
    }
    let mut filled = k;
    for e in 0..n {
        if filled == n {
            break;
        }
        let mut v = vec![ZERO; n];
        v[e] = ONE;
        for _ in 0..2 {
            for p in 0..filled {
                let q = out.column(p);
                let proj = inner(&q, &v);
                for (vi, qi) in v.iter_mut().zip(&q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = vector_norm(&v);
        if norm > 1e-6 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            out.set_column(filled, &v);
            filled += 1;
        }
    }
    out
}
