//! Independent certificate checks, duality gaps and brute-force reference
//! optima for tiny instances.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{
    oracle_query, ConstraintFamily, ConstraintOracle, PackCoverInstance, PrimalDualPair, Variant,
};
use crate::linalg::SymMat;
use crate::normalize::{NormalizedFamily, NormalizedInstance};

/// Absolute tolerance on primal violation and dual residual.
pub const CERT_TOL: f64 = 1e-7;

/// Which solver produced a pair; selects the optimality constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Log,
    Mwu,
}

/// Acceptable range for `primal objective / dual objective`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum GapBound {
    AtLeast(f64),
    AtMost(f64),
}

impl GapBound {
    /// Ratio guaranteed on the normalized instance at working accuracy `eps`.
    pub fn claim(variant: Variant, solver: SolverKind, eps: f64) -> GapBound {
        match (variant, solver) {
            (Variant::TypeI, _) => GapBound::AtLeast(((1.0 - eps) / (1.0 + eps)).powi(2)),
            (Variant::TypeII, SolverKind::Log) => GapBound::AtMost((1.0 + eps) / (1.0 - 2.0 * eps).powi(2)),
            (Variant::TypeII, SolverKind::Mwu) => GapBound::AtMost(1.0 / (1.0 - 1.5 * eps)),
        }
    }

    /// Ratio guaranteed on the original instance after normalization at
    /// accuracy `eps` and pull-back.
    ///
    /// Type1 loses at most `εζ ≤ ε·Σy` to the perturbation of `C`. Type2 pays
    /// `(ε/β′)/(1−ε)` for undoing the identity shift, and `ε/β′` is at most
    /// `2ε(1+ε)` times the normalized optimum because `β′` is a half-accurate
    /// estimate of a top eigenvalue.
    pub fn pipeline(variant: Variant, solver: SolverKind, eps: f64) -> GapBound {
        match GapBound::claim(variant, solver, eps) {
            GapBound::AtLeast(r) => GapBound::AtLeast(r - eps),
            GapBound::AtMost(k) => GapBound::AtMost(k * (1.0 + 2.0 * eps * (1.0 + eps)) / (1.0 - eps)),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            GapBound::AtLeast(v) | GapBound::AtMost(v) => v,
        }
    }

    pub fn holds(self, ratio: f64, slack: f64) -> bool {
        match self {
            GapBound::AtLeast(v) => ratio >= v - slack,
            GapBound::AtMost(v) => ratio <= v + slack,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// Variant I: `max_i A_i•X − b_i` relative to `b_i`; variant II:
    /// `b_i − min_i A_i•X` relative to `b_i`.
    pub max_primal_violation: f64,
    /// Variant I: `−λ_min(Σ y_i A_i − C)`; variant II: `−λ_min(C − Σ y_i A_i)`;
    /// both divided by `λ_max(C)`.
    pub dual_spectral_residual: f64,
    pub gap_ratio: f64,
    pub gap_bound: GapBound,
    pub support_size: usize,
    pub iter_bound_satisfied: bool,
    pub passed: bool,
}

/// What a pair is checked against.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Original(&'a PackCoverInstance),
    Normalized(&'a NormalizedInstance),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub solver: SolverKind,
    /// Accuracy used for the gap constant; for normalized targets this is the
    /// solver's working accuracy, for original targets the requested one.
    pub eps: f64,
    pub iteration_bound: Option<u64>,
}

impl CertifyOptions {
    pub fn new(solver: SolverKind, eps: f64) -> Self {
        CertifyOptions { solver, eps, iteration_bound: None }
    }
}

/// Recomputes feasibility and the duality gap of `pair` from scratch.
pub fn certify(target: Target<'_>, pair: &PrimalDualPair, opts: &CertifyOptions) -> Result<Certificate> {
    let (variant, n, c) = match target {
        Target::Original(inst) => (inst.variant(), inst.n(), inst.c().clone()),
        Target::Normalized(norm) => (norm.variant, norm.dim, SymMat::identity(norm.dim)),
    };
    if pair.x.n() != n {
        return Err(Error::Validation(format!("primal has dimension {}, instance {n}", pair.x.n())));
    }
    let m = match target {
        Target::Original(inst) => inst.m(),
        Target::Normalized(norm) => norm.count(),
    };
    if let Some((&k, _)) = pair.y.iter().next_back() {
        if k >= m {
            return Err(Error::Validation(format!("dual index {k} out of range for {m} constraints")));
        }
    }

    let mode = variant.oracle_mode();
    let worst = match target {
        Target::Original(inst) => oracle_query(inst, &pair.x, mode)?.value,
        Target::Normalized(norm) => norm.query(&pair.x, mode)?.value,
    };
    let max_primal_violation = match variant {
        Variant::TypeI => worst - 1.0,
        Variant::TypeII => 1.0 - worst,
    };

    let combo = dual_combination(target, pair)?;
    let slack = match variant {
        Variant::TypeI => combo.sub(&c),
        Variant::TypeII => c.sub(&combo),
    };
    let dual_spectral_residual = -slack.lambda_min() / c.lambda_max();

    let dual = match target {
        Target::Original(inst) => pair.y.iter().map(|(&i, &w)| w * inst.rhs()[i]).sum::<f64>(),
        Target::Normalized(_) => pair.y.values().sum(),
    };
    let primal = c.dot(&pair.x);
    let gap_ratio = if dual > 0.0 { primal / dual } else { f64::INFINITY };
    let gap_bound = match target {
        Target::Original(_) => GapBound::pipeline(variant, opts.solver, opts.eps),
        Target::Normalized(_) => GapBound::claim(variant, opts.solver, opts.eps),
    };
    let iter_bound_satisfied = opts.iteration_bound.is_none_or(|b| pair.iterations <= b);
    let passed = max_primal_violation <= CERT_TOL
        && dual_spectral_residual <= CERT_TOL
        && gap_bound.holds(gap_ratio, 1e-9)
        && iter_bound_satisfied;
    Ok(Certificate {
        max_primal_violation,
        dual_spectral_residual,
        gap_ratio,
        gap_bound,
        support_size: pair.support_size(),
        iter_bound_satisfied,
        passed,
    })
}

/// `Σ y_i A_i` in the target's units; robust duals are realized atom by atom.
fn dual_combination(target: Target<'_>, pair: &PrimalDualPair) -> Result<SymMat> {
    let mut out = SymMat::zeros(pair.x.n());
    match target {
        Target::Original(inst) => {
            let b = inst.rhs();
            match inst.constraints() {
                ConstraintFamily::Explicit(mats) => {
                    for (&i, &w) in &pair.y {
                        out.axpy(w * b[i], &mats[i]);
                    }
                }
                ConstraintFamily::Robust(ucs) => {
                    for (&i, &w) in &pair.y {
                        match pair.measures.get(&i) {
                            Some(atoms) => {
                                for a in atoms {
                                    out.axpy(a.weight * b[i], &ucs[i].realize(&a.delta));
                                }
                            }
                            None => out.axpy(w * b[i], &ucs[i].realize(ucs[i].set.center())),
                        }
                    }
                }
            }
        }
        Target::Normalized(norm) => match &norm.family {
            NormalizedFamily::Explicit(mats) => {
                for (&i, &w) in &pair.y {
                    out.axpy(w, &mats[i]);
                }
            }
            NormalizedFamily::Robust { constraints, w: cong } => {
                for (&i, &w) in &pair.y {
                    match pair.measures.get(&i) {
                        Some(atoms) => {
                            for a in atoms {
                                out.axpy(a.weight, &constraints[i].realize(&a.delta).congruence(cong));
                            }
                        }
                        None => out.axpy(w, &norm.nominal(i).matrix),
                    }
                }
            }
        },
    }
    Ok(out)
}

/// `primal objective / dual objective`.
pub fn duality_gap(pair: &PrimalDualPair) -> Result<f64> {
    if !(pair.dual_objective > 0.0) {
        return Err(Error::DegenerateDual);
    }
    Ok(pair.primal_objective / pair.dual_objective)
}

/// Optimal value of a normalized instance with at most three explicit
/// constraints, by grid search over the simplex.
///
/// Writing `y = s·w` with `w` on the simplex, the best scale is
/// `s = 1/λ_min(Σ w_i A_i)` for the covering dual of variant I and
/// `s = 1/λ_max(Σ w_i A_i)` for the packing problem of variant II, so the
/// optimum is the min (resp. max) of that expression over `w`. `grid` is the
/// number of points per simplex axis.
pub fn reference_optimum(normalized: &NormalizedInstance, grid: usize) -> Result<f64> {
    let Some(mats) = normalized.matrices() else {
        return Err(Error::Validation("reference optimum needs explicit constraints".into()));
    };
    let m = mats.len();
    if m > 3 {
        return Err(Error::TooLarge(format!("reference optimum handles m ≤ 3, got {m}")));
    }
    if normalized.dim > 8 {
        return Err(Error::TooLarge(format!("reference optimum handles n ≤ 8, got {}", normalized.dim)));
    }
    let steps = grid.max(2) - 1;
    let value = |w: &[f64]| {
        let mut f = SymMat::zeros(normalized.dim);
        for (a, &wi) in mats.iter().zip(w) {
            f.axpy(wi, a);
        }
        match normalized.variant {
            Variant::TypeI => 1.0 / f.lambda_min(),
            Variant::TypeII => 1.0 / f.lambda_max(),
        }
    };
    let mut best = match normalized.variant {
        Variant::TypeI => f64::INFINITY,
        Variant::TypeII => f64::NEG_INFINITY,
    };
    let mut consider = |v: f64| {
        if v.is_nan() || v <= 0.0 {
            return;
        }
        best = match normalized.variant {
            Variant::TypeI => best.min(v),
            Variant::TypeII => best.max(v),
        };
    };
    let h = 1.0 / steps as f64;
    match m {
        1 => consider(value(&[1.0])),
        2 => {
            for k in 0..=steps {
                let a = k as f64 * h;
                consider(value(&[a, 1.0 - a]));
            }
        }
        _ => {
            for i in 0..=steps {
                for j in 0..=(steps - i) {
                    let (a, b) = (i as f64 * h, j as f64 * h);
                    consider(value(&[a, b, (1.0 - a - b).max(0.0)]));
                }
            }
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::NumericalFailure("no grid point gives a finite value".into()))
    }
}
