//! Dense symmetric linear algebra.
//!
//! Everything here works on [`SymMat`], a thin wrapper around a square
//! `nalgebra` matrix that is kept exactly symmetric.

mod eig;
mod extreme;
mod func;
mod ldl;

pub use eig::{eig_sym, SpectralDecomp};
pub use extreme::lanczos_extreme;
pub use func::{exp_base, matrix_power_int, power_scaled, shifted_inverse, Side};
pub use ldl::{ldl, LdlFactors};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance used when accepting user-supplied matrices as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Dense real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMat {
    m: DMatrix<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        SymMat { m: DMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        SymMat { m: DMatrix::identity(n, n) }
    }

    pub fn from_diag(d: &[f64]) -> Self {
        SymMat { m: DMatrix::from_diagonal(&DVector::from_column_slice(d)) }
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle and mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMat { m }
    }

    /// Validates squareness, finiteness and symmetry, then averages out the
    /// remaining asymmetry.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidMatrix(format!("non-finite entry at ({i}, {j})")));
                }
                m[(i, j)] = v;
            }
        }
        let scale = 1.0 + m.amax();
        for i in 0..n {
            for j in (i + 1)..n {
                if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SymMat::from_matrix(m))
    }

    /// Wraps a square matrix, replacing it by `(M + Mᵀ)/2`.
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "SymMat needs a square matrix");
        let mut m = m;
        let n = m.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMat { m }
    }

    /// `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        let v = DVector::from_column_slice(v);
        SymMat::from_matrix(&v * v.transpose())
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| (0..self.n()).map(|j| self.m[(i, j)]).collect()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.m.diagonal().iter().copied().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Trace inner product `A • B = Tr(AB)`.
    pub fn dot(&self, other: &SymMat) -> f64 {
        assert_eq!(self.n(), other.n(), "dimension mismatch in dot");
        self.m.dot(&other.m)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.amax()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.m.norm_squared()
    }

    pub fn scale(&self, c: f64) -> SymMat {
        SymMat { m: &self.m * c }
    }

    pub fn add(&self, other: &SymMat) -> SymMat {
        SymMat { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &SymMat) -> SymMat {
        SymMat { m: &self.m - &other.m }
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &SymMat) {
        self.m.zip_apply(&other.m, |x, y| *x += a * y);
    }

    /// `self ← (1 − τ)·self + τ·other`.
    pub fn blend(&mut self, tau: f64, other: &SymMat) {
        self.m.zip_apply(&other.m, |x, y| *x = (1.0 - tau) * *x + tau * y);
    }

    /// `self + c·I`.
    pub fn shift(&self, c: f64) -> SymMat {
        let mut m = self.m.clone();
        for i in 0..self.n() {
            m[(i, i)] += c;
        }
        SymMat { m }
    }

    /// Product of two symmetric matrices, re-symmetrized. Only meaningful when
    /// the factors commute or the caller wants the symmetric part.
    pub fn sym_product(&self, other: &SymMat) -> SymMat {
        SymMat::from_matrix(&self.m * &other.m)
    }

    /// `W · self · Wᵀ` for a rectangular `W`.
    pub fn congruence(&self, w: &DMatrix<f64>) -> SymMat {
        assert_eq!(w.ncols(), self.n(), "dimension mismatch in congruence");
        SymMat::from_matrix(w * &self.m * w.transpose())
    }

    /// `vᵀ · self · v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        (v.transpose() * &self.m * &v)[(0, 0)]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(v);
        (&self.m * v).iter().copied().collect()
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// PSD test with tolerance `tol · max(1, |λ|max)`.
    pub fn is_psd(&self, tol: f64) -> bool {
        let ev = self.eigenvalues();
        let scale = ev.iter().fold(1.0_f64, |a, &l| a.max(l.abs()));
        ev.first().is_none_or(|&l| l >= -tol * scale)
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &SymMat) -> f64 {
        (&self.m - &other.m).amax()
    }
}
