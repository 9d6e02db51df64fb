use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::{start_index, NormalizedFamily, NormalizedInstance, TransformKind, TransformRecord};
use crate::error::{Error, Result};
use crate::instance::{ConstraintFamily, PackCoverInstance, Variant};
use crate::linalg::{eig_sym, lanczos_extreme, ldl, SymMat};

/// Outcome of the range test `range(A) ⊆ range(C)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Support {
    Contained,
    /// Unit vector with `Cx = 0` and `Ax ≠ 0`.
    Witness(Vec<f64>),
}

/// Decides `range(A) ⊆ range(C)` through the kernel of `C`: with `N` an
/// orthonormal basis of the kernel, the inclusion fails exactly when `NᵀAN`
/// is nonzero, and its top eigenvector gives the witness.
pub fn check_support(c: &SymMat, a: &SymMat) -> Support {
    let dc = eig_sym(c).expect("finite matrix");
    let cutoff = 1e-10 * dc.max().max(0.0);
    let kernel: Vec<usize> = (0..c.n()).filter(|&j| dc.eigenvalues[j] <= cutoff).collect();
    if kernel.is_empty() {
        return Support::Contained;
    }
    let nb = DMatrix::from_fn(c.n(), kernel.len(), |i, k| dc.basis[(i, kernel[k])]);
    let inner = a.congruence(&nb.transpose());
    let di = eig_sym(&inner).expect("finite matrix");
    let u = DVector::from_column_slice(&di.vector(kernel.len() - 1));
    let x: Vec<f64> = (&nb * u).iter().copied().collect();
    let ax_norm = a.mul_vec(&x).iter().map(|v| v * v).sum::<f64>().sqrt();
    if ax_norm > 1e-6 * a.lambda_max().max(0.0) {
        Support::Witness(x)
    } else {
        Support::Contained
    }
}

/// Brings a Löwner-bounded packing instance to `C = I` in dimension
/// `n′ = rank(C)`, then trims constraints whose top eigenvalue is far above
/// the smallest one and shifts the rest by `εβ′/n′ · I`.
pub fn normalize_type2(instance: &PackCoverInstance, eps: f64, seed: u64) -> Result<NormalizedInstance> {
    if instance.variant() != Variant::TypeII {
        return Err(Error::Validation("normalize_type2 needs a type2 instance".into()));
    }
    let ConstraintFamily::Explicit(mats) = instance.constraints() else {
        return Err(Error::Validation("robust families are not supported for type2".into()));
    };
    let n = instance.n();
    let c = instance.c();

    let mut in_range = Vec::new();
    let mut dropped = Vec::new();
    for (i, a) in mats.iter().enumerate() {
        match check_support(c, a) {
            Support::Contained => in_range.push(i),
            Support::Witness(x) => dropped.push((i, x)),
        }
    }
    if in_range.is_empty() {
        return Err(Error::EmptyAfterSupportFilter);
    }

    let f = ldl(c)?;
    let columns: Vec<usize> = (0..n).filter(|&j| !f.zero_mask[j]).collect();
    let dim = columns.len();
    let linv = f.l_inverse();
    let d: Vec<f64> = columns.iter().map(|&j| f.d[j]).collect();
    let w = DMatrix::from_fn(dim, n, |k, j| linv[(columns[k], j)] / d[k].sqrt());

    let reduced: Vec<SymMat> = in_range.iter().map(|&i| mats[i].congruence(&w)).collect();
    let mut top = Vec::with_capacity(reduced.len());
    for (k, a) in reduced.iter().enumerate() {
        let est = match lanczos_extreme(a, 0.5, seed.wrapping_add(k as u64)) {
            Ok((v, _)) => v,
            Err(Error::ConvergenceFailure { .. }) => a.lambda_max(),
            Err(e) => return Err(e),
        };
        top.push(est);
    }
    let beta_prime = top.iter().copied().fold(f64::INFINITY, f64::min);
    let limit = dim as f64 * beta_prime / eps;
    let shift = eps * beta_prime / dim as f64;

    let mut kept = Vec::new();
    let mut trimmed = Vec::new();
    let mut shifted = Vec::new();
    for (k, &i) in in_range.iter().enumerate() {
        if top[k] <= limit {
            kept.push(i);
            shifted.push(reduced[k].shift(shift));
        } else {
            trimmed.push(i);
        }
    }
    let initial_support = vec![start_index(&shifted)];
    let record = TransformRecord {
        kind: TransformKind::Type2,
        n,
        dim,
        l: f.l,
        d,
        columns,
        delta: 0.0,
        zeta: 0.0,
        trace_bound: 0.0,
        kept,
        dropped,
        trimmed,
        shift,
        beta_prime,
        eps,
        scale_b: instance.rhs().to_vec(),
        w,
    };
    Ok(NormalizedInstance {
        variant: Variant::TypeII,
        dim,
        family: NormalizedFamily::Explicit(shifted),
        record,
        initial_support,
    })
}

/// Lifts a covering solution of the trimmed, shifted problem to the original
/// instance.
///
/// `X = (X_lift + (ε/(β′n′))·WᵀW) / (1 − ε)` accounts for the identity shift
/// and covers the trimmed constraints; each constraint dropped by the range
/// test gets the rank-one repair `x xᵀ / (A_i • x xᵀ)`. Should any original
/// constraint still be short of 1 the whole matrix is rescaled so the
/// smallest `A_i • X` equals 1.
pub fn pull_back_type2(
    record: &TransformRecord,
    instance: &PackCoverInstance,
    x: &SymMat,
    y: &BTreeMap<usize, f64>,
) -> Result<(SymMat, BTreeMap<usize, f64>)> {
    let ConstraintFamily::Explicit(mats) = instance.constraints() else {
        return Err(Error::Validation("robust families are not supported for type2".into()));
    };
    let mut out = record.lift(x);
    if record.shift > 0.0 {
        let wtw = SymMat::from_matrix(record.w.transpose() * &record.w);
        out.axpy(record.eps / (record.beta_prime * record.dim as f64), &wtw);
        out = out.scale(1.0 / (1.0 - record.eps));
    }
    for (i, v) in &record.dropped {
        let q = mats[*i].quad_form(v);
        out.axpy(1.0 / q, &SymMat::outer(v));
    }
    let worst = mats.iter().map(|a| a.dot(&out)).fold(f64::INFINITY, f64::min);
    if worst < 1.0 && worst > 0.0 {
        out = out.scale(1.0 / worst);
    }
    let y = y.iter().map(|(&k, &w)| (record.kept[k], w)).collect();
    Ok((out, y))
}
