use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::{discover_initial_support, NormalizedFamily, NormalizedInstance, TransformKind, TransformRecord};
use crate::error::{Error, Result};
use crate::instance::{robust_worst_case, ConstraintFamily, ConstraintOracle, PackCoverInstance, Variant};
use crate::linalg::{ldl, SymMat};

/// Smallest perturbation applied to zero pivots of `C`.
pub const MIN_DELTA: f64 = 1e-300;

/// Brings a trace-constrained packing instance to `C = I`.
///
/// With `C = L·diag(D)·Lᵀ`, zero pivots are lifted to `δ` so that the
/// perturbed objective `C(δ)` is positive definite, where
/// `δ = ε·ζ / (τ·‖L‖²_F)`, `ζ = C•I / max_i A_i•I` and `τ = r/λ_min(Ā)` bounds
/// the trace of any feasible primal. The constraints are then mapped by the
/// congruence `W = D(δ)^{-1/2} L⁻¹`.
pub fn normalize_type1(instance: &PackCoverInstance, eps: f64) -> Result<NormalizedInstance> {
    if instance.variant() != Variant::TypeI {
        return Err(Error::Validation("normalize_type1 needs a type1 instance".into()));
    }
    let n = instance.n();
    let m = instance.m();
    let family = instance.constraints();
    let support = discover_initial_support(family)?;
    let mut abar = SymMat::zeros(n);
    for &i in &support {
        abar.axpy(1.0, &family.nominal(i).matrix);
    }
    let trace_bound = support.len() as f64 / abar.lambda_min();

    let c = instance.c();
    let f = ldl(c)?;
    let max_trace = match family {
        ConstraintFamily::Explicit(mats) => mats.iter().map(SymMat::trace).fold(0.0, f64::max),
        ConstraintFamily::Robust(ucs) => {
            let id = SymMat::identity(n);
            let mut best = 0.0_f64;
            for uc in ucs {
                best = best.max(robust_worst_case(uc, &id)?.1);
            }
            best
        }
    };
    let zeta = c.trace() / max_trace;
    let delta = if f.has_zero_pivot() {
        (eps * zeta / (trace_bound * f.l.norm_squared())).max(MIN_DELTA)
    } else {
        0.0
    };
    let d: Vec<f64> = f
        .d
        .iter()
        .zip(&f.zero_mask)
        .map(|(&dj, &z)| if z { dj + delta } else { dj })
        .collect();
    let inv_sqrt = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        d.iter().map(|x| 1.0 / x.sqrt()),
    ));
    let w = inv_sqrt * f.l_inverse();

    let family = match family {
        ConstraintFamily::Explicit(mats) => {
            NormalizedFamily::Explicit(mats.iter().map(|a| a.congruence(&w)).collect())
        }
        ConstraintFamily::Robust(ucs) => NormalizedFamily::Robust { constraints: ucs.clone(), w: w.clone() },
    };
    let record = TransformRecord {
        kind: TransformKind::Type1,
        n,
        dim: n,
        l: f.l,
        d,
        columns: (0..n).collect(),
        delta,
        zeta,
        trace_bound,
        kept: (0..m).collect(),
        dropped: Vec::new(),
        trimmed: Vec::new(),
        shift: 0.0,
        beta_prime: 0.0,
        eps,
        scale_b: instance.rhs().to_vec(),
        w,
    };
    Ok(NormalizedInstance { variant: Variant::TypeI, dim: n, family, record, initial_support: support })
}

/// `X = Wᵀ·X′·W`; dual weights carry over unchanged.
pub fn pull_back_type1(
    record: &TransformRecord,
    x: &SymMat,
    y: &BTreeMap<usize, f64>,
) -> (SymMat, BTreeMap<usize, f64>) {
    (record.lift(x), y.clone())
}
