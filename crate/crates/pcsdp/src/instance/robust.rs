use super::check_psd;
use crate::error::{Error, Result};
use crate::linalg::SymMat;

/// Set of admissible perturbation coefficients `δ ∈ ℝ^k`.
#[derive(Clone, Debug)]
pub enum UncertaintySet {
    /// `{δ : (δ − δ₀)ᵀ D⁻¹ (δ − δ₀) ≤ 1}`.
    Ellipsoid { delta0: Vec<f64>, d: SymMat },
    /// `{δ ≥ 0 : ‖δ − δ₀‖₁ ≤ ρ}`.
    Box { delta0: Vec<f64>, rho: f64 },
}

impl UncertaintySet {
    pub fn center(&self) -> &[f64] {
        match self {
            UncertaintySet::Ellipsoid { delta0, .. } | UncertaintySet::Box { delta0, .. } => delta0,
        }
    }

    pub fn k(&self) -> usize {
        self.center().len()
    }

    /// Membership with slack `tol`.
    pub fn contains(&self, delta: &[f64], tol: f64) -> bool {
        if delta.len() != self.k() {
            return false;
        }
        match self {
            UncertaintySet::Ellipsoid { delta0, d } => {
                let diff: Vec<f64> = delta.iter().zip(delta0).map(|(a, b)| a - b).collect();
                let Some(chol) = d.as_matrix().clone().cholesky() else { return false };
                let z = chol.solve(&nalgebra::DVector::from_column_slice(&diff));
                let q: f64 = diff.iter().zip(z.iter()).map(|(a, b)| a * b).sum();
                q <= 1.0 + tol
            }
            UncertaintySet::Box { delta0, rho } => {
                let l1: f64 = delta.iter().zip(delta0).map(|(a, b)| (a - b).abs()).sum();
                delta.iter().all(|&x| x >= -tol) && l1 <= rho + tol
            }
        }
    }
}

/// Affinely perturbed constraint `A(δ) = A₀ + Σ_r δ_r A^r`.
#[derive(Clone, Debug)]
pub struct UncertainConstraint {
    pub a0: SymMat,
    pub perturbations: Vec<SymMat>,
    pub set: UncertaintySet,
}

impl UncertainConstraint {
    pub fn realize(&self, delta: &[f64]) -> SymMat {
        let mut a = self.a0.clone();
        for (p, &d) in self.perturbations.iter().zip(delta) {
            a.axpy(d, p);
        }
        a
    }

    pub(crate) fn scaled(&self, c: f64) -> Self {
        UncertainConstraint {
            a0: self.a0.scale(c),
            perturbations: self.perturbations.iter().map(|p| p.scale(c)).collect(),
            set: self.set.clone(),
        }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        if self.a0.n() != n {
            return Err(Error::Validation(format!("A0 is {0}x{0}, expected {n}x{n}", self.a0.n())));
        }
        check_psd(&self.a0, "A0")?;
        for (r, p) in self.perturbations.iter().enumerate() {
            if p.n() != n {
                return Err(Error::Validation(format!("perturbation {r} has wrong dimension")));
            }
            check_psd(p, &format!("perturbation {r}"))?;
        }
        let k = self.perturbations.len();
        if self.set.k() != k {
            return Err(Error::InvalidUncertaintySet(format!(
                "delta0 has {} entries for {k} perturbations",
                self.set.k()
            )));
        }
        match &self.set {
            UncertaintySet::Ellipsoid { delta0, d } => {
                if d.n() != k {
                    return Err(Error::InvalidUncertaintySet("D has wrong dimension".into()));
                }
                if k > 0 && d.lambda_min() <= 0.0 {
                    return Err(Error::InvalidUncertaintySet("D is not positive definite".into()));
                }
                for (r, c) in delta0.iter().enumerate() {
                    if c - d.get(r, r).sqrt() < -1e-10 {
                        return Err(Error::InvalidUncertaintySet(format!(
                            "ellipsoid leaves the nonnegative orthant in coordinate {r}"
                        )));
                    }
                }
            }
            UncertaintySet::Box { delta0, rho } => {
                if !(rho.is_finite() && *rho > 0.0) {
                    return Err(Error::InvalidUncertaintySet("rho must be positive".into()));
                }
                if delta0.iter().any(|&x| !(x >= 0.0)) {
                    return Err(Error::InvalidUncertaintySet("delta0 must be nonnegative".into()));
                }
            }
        }
        if self.realize(self.set.center()).max_abs() == 0.0 {
            return Err(Error::Validation("nominal realization is the zero matrix".into()));
        }
        Ok(())
    }
}

/// Worst case of `A(δ) • Y` over the uncertainty set.
///
/// With gains `g_r = A^r • Y ≥ 0` the problem is linear in `δ`. On an
/// ellipsoid the maximizer is `δ₀ + Dg/√(gᵀDg)`; on the L1 box the whole
/// budget goes to the coordinate with the largest gain.
pub fn robust_worst_case(uc: &UncertainConstraint, y: &SymMat) -> Result<(Vec<f64>, f64)> {
    let g: Vec<f64> = uc.perturbations.iter().map(|p| p.dot(y)).collect();
    let base = uc.a0.dot(y);
    let delta = match &uc.set {
        UncertaintySet::Ellipsoid { delta0, d } => {
            if d.n() != g.len() || (!g.is_empty() && d.lambda_min() <= 0.0) {
                return Err(Error::InvalidUncertaintySet("D is not positive definite".into()));
            }
            let dg = d.mul_vec(&g);
            let q: f64 = g.iter().zip(&dg).map(|(a, b)| a * b).sum();
            if q > 0.0 {
                let s = q.sqrt();
                delta0.iter().zip(&dg).map(|(d0, v)| d0 + v / s).collect()
            } else {
                delta0.clone()
            }
        }
        UncertaintySet::Box { delta0, rho } => {
            let mut delta = delta0.clone();
            let mut best: Option<(usize, f64)> = None;
            for (r, &gr) in g.iter().enumerate() {
                if best.is_none_or(|(_, b)| gr > b) {
                    best = Some((r, gr));
                }
            }
            if let Some((r, _)) = best {
                delta[r] += rho;
            }
            delta
        }
    };
    let value = base + delta.iter().zip(&g).map(|(d, gr)| d * gr).sum::<f64>();
    Ok((delta, value))
}
