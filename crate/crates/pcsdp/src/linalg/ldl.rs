use nalgebra::DMatrix;

use super::SymMat;
use crate::error::{Error, Result};

/// `M = L · diag(d) · Lᵀ` with `L` unit lower triangular.
#[derive(Clone, Debug)]
pub struct LdlFactors {
    pub l: DMatrix<f64>,
    pub d: Vec<f64>,
    /// `true` where the pivot was treated as zero.
    pub zero_mask: Vec<bool>,
}

impl LdlFactors {
    pub fn reconstruct(&self) -> SymMat {
        let mut ld = self.l.clone();
        for (j, &dj) in self.d.iter().enumerate() {
            ld.column_mut(j).scale_mut(dj);
        }
        SymMat::from_matrix(ld * self.l.transpose())
    }

    pub fn has_zero_pivot(&self) -> bool {
        self.zero_mask.iter().any(|&z| z)
    }

    /// `L⁻¹`, by forward substitution against the identity.
    pub fn l_inverse(&self) -> DMatrix<f64> {
        let n = self.d.len();
        self.l
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .expect("unit lower triangular factor is invertible")
    }
}

/// Unpivoted LDLᵀ factorization of a PSD matrix. Pivots with
/// `|d| ≤ 1e−10 · max(D)` are set to zero together with the column of `L`
/// below them.
pub fn ldl(m: &SymMat) -> Result<LdlFactors> {
    let n = m.n();
    let lmin = m.lambda_min();
    if !lmin.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    if lmin < -1e-8 {
        return Err(Error::NotPsd(lmin));
    }
    let a = m.as_matrix();
    let max_diag = (0..n).fold(0.0_f64, |acc, i| acc.max(a[(i, i)]));
    let tol = 1e-10 * max_diag;
    let mut l = DMatrix::<f64>::identity(n, n);
    let mut d = vec![0.0; n];
    let mut zero_mask = vec![false; n];
    for j in 0..n {
        let mut dj = a[(j, j)];
        for k in 0..j {
            dj -= l[(j, k)] * l[(j, k)] * d[k];
        }
        if dj.abs() <= tol {
            zero_mask[j] = true;
            d[j] = 0.0;
            continue;
        }
        if dj < 0.0 {
            return Err(Error::NotPsd(dj));
        }
        d[j] = dj;
        for i in (j + 1)..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)] * d[k];
            }
            l[(i, j)] = v / dj;
        }
    }
    Ok(LdlFactors { l, d, zero_mask })
}
