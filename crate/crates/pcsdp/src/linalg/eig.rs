use nalgebra::{DMatrix, SymmetricEigen};

use super::SymMat;
use crate::error::{Error, Result};

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// as columns of `basis`.
#[derive(Clone, Debug)]
pub struct SpectralDecomp {
    pub eigenvalues: Vec<f64>,
    pub basis: DMatrix<f64>,
}

impl SpectralDecomp {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `basis · diag(f(λ)) · basisᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMat {
        let mut scaled = self.basis.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fl = f(l);
            scaled.column_mut(j).scale_mut(fl);
        }
        SymMat::from_matrix(scaled * self.basis.transpose())
    }

    pub fn reconstruct(&self) -> SymMat {
        self.map(|l| l)
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.basis.column(j).iter().copied().collect()
    }
}

pub fn eig_sym(m: &SymMat) -> Result<SpectralDecomp> {
    if !m.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    let n = m.n();
    let se = SymmetricEigen::new(m.as_matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut basis = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok(SpectralDecomp { eigenvalues, basis })
}
