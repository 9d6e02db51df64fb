//! Problem instances, constraint oracles and the dual-solution container.

mod json;
mod robust;

pub use json::{
    load_instance, load_solution, save_instance, save_solution, InstanceDoc, SolutionDoc,
};
pub(crate) use json::{solution_doc, variant_name};
pub use robust::{robust_worst_case, UncertainConstraint, UncertaintySet};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::SymMat;

/// Tolerance used when accepting input matrices as PSD.
pub const PSD_TOL: f64 = 1e-8;

/// Which primal/dual pair an instance belongs to.
///
/// `TypeI` is the trace-constrained packing problem `max C•X, A_i•X ≤ b_i`
/// with covering dual `min bᵀy, Σ y_i A_i ⪰ C`. `TypeII` is the Löwner-bounded
/// packing problem `max bᵀy, Σ y_i A_i ⪯ C` with covering dual
/// `min C•X, A_i•X ≥ b_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    TypeI,
    TypeII,
}

impl Variant {
    /// Oracle direction used by the solvers for this variant.
    pub fn oracle_mode(self) -> OracleMode {
        match self {
            Variant::TypeI => OracleMode::Max,
            Variant::TypeII => OracleMode::Min,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    Max,
    Min,
}

#[derive(Clone, Debug)]
pub enum ConstraintFamily {
    Explicit(Vec<SymMat>),
    Robust(Vec<UncertainConstraint>),
}

impl ConstraintFamily {
    pub fn len(&self) -> usize {
        match self {
            ConstraintFamily::Explicit(v) => v.len(),
            ConstraintFamily::Robust(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_robust(&self) -> bool {
        matches!(self, ConstraintFamily::Robust(_))
    }
}

/// One answer of a constraint oracle.
#[derive(Clone, Debug)]
pub struct OracleAnswer {
    pub index: usize,
    /// Worst-case perturbation for robust constraints.
    pub delta: Option<Vec<f64>>,
    pub matrix: SymMat,
    /// `matrix • Y` for the queried `Y`.
    pub value: f64,
}

/// Access to a family of PSD constraint matrices through Max/Min queries.
pub trait ConstraintOracle {
    fn dim(&self) -> usize;

    fn count(&self) -> usize;

    fn query(&self, y: &SymMat, mode: OracleMode) -> Result<OracleAnswer>;

    /// The nominal realization of constraint `index` (the matrix itself for
    /// explicit families, the centre of the uncertainty set otherwise).
    /// `value` is left at zero.
    fn nominal(&self, index: usize) -> OracleAnswer;
}

impl ConstraintOracle for ConstraintFamily {
    fn dim(&self) -> usize {
        match self {
            ConstraintFamily::Explicit(v) => v.first().map_or(0, SymMat::n),
            ConstraintFamily::Robust(v) => v.first().map_or(0, |u| u.a0.n()),
        }
    }

    fn count(&self) -> usize {
        self.len()
    }

    fn query(&self, y: &SymMat, mode: OracleMode) -> Result<OracleAnswer> {
        match self {
            ConstraintFamily::Explicit(mats) => {
                let (index, value) = scan(mats.iter().map(|a| a.dot(y)), mode)?;
                Ok(OracleAnswer { index, delta: None, matrix: mats[index].clone(), value })
            }
            ConstraintFamily::Robust(ucs) => query_robust(ucs, y, mode),
        }
    }

    fn nominal(&self, index: usize) -> OracleAnswer {
        match self {
            ConstraintFamily::Explicit(mats) => OracleAnswer {
                index,
                delta: None,
                matrix: mats[index].clone(),
                value: 0.0,
            },
            ConstraintFamily::Robust(ucs) => {
                let delta = ucs[index].set.center().to_vec();
                let matrix = ucs[index].realize(&delta);
                OracleAnswer { index, delta: Some(delta), matrix, value: 0.0 }
            }
        }
    }
}

/// Worst-case realization of every constraint, then the outer arg-max/arg-min.
pub(crate) fn query_robust(ucs: &[UncertainConstraint], y: &SymMat, mode: OracleMode) -> Result<OracleAnswer> {
    let mut worst = Vec::with_capacity(ucs.len());
    for uc in ucs {
        worst.push(robust_worst_case(uc, y)?);
    }
    let (index, value) = scan(worst.iter().map(|w| w.1), mode)?;
    let delta = worst.swap_remove(index).0;
    let matrix = ucs[index].realize(&delta);
    Ok(OracleAnswer { index, delta: Some(delta), matrix, value })
}

/// Arg-max or arg-min with the lowest index winning ties.
pub(crate) fn scan(values: impl Iterator<Item = f64>, mode: OracleMode) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        let better = match (best, mode) {
            (None, _) => true,
            (Some((_, b)), OracleMode::Max) => v > b,
            (Some((_, b)), OracleMode::Min) => v < b,
        };
        if better {
            best = Some((i, v));
        }
    }
    best.ok_or(Error::EmptyFamily)
}

/// Exact Max/Min query against an instance's constraint family.
pub fn oracle_query(instance: &PackCoverInstance, y: &SymMat, mode: OracleMode) -> Result<OracleAnswer> {
    instance.constraints.query(y, mode)
}

/// A packing/covering instance with right-hand sides folded into the
/// constraints (`A_i ← A_i / b_i`). The original `b` is kept in `rhs` so that
/// dual weights can be reported in the caller's units.
#[derive(Clone, Debug)]
pub struct PackCoverInstance {
    variant: Variant,
    c: SymMat,
    rhs: Vec<f64>,
    constraints: ConstraintFamily,
}

impl PackCoverInstance {
    /// Validates and rescales. Constraint matrices must be PSD and nonzero,
    /// `C` PSD and nonzero, every `b_i > 0`.
    pub fn new(variant: Variant, c: SymMat, b: Vec<f64>, constraints: ConstraintFamily) -> Result<Self> {
        let n = c.n();
        let m = constraints.len();
        if m == 0 {
            return Err(Error::Validation("constraint list is empty".into()));
        }
        if b.len() != m {
            return Err(Error::Validation(format!(
                "b has {} entries but there are {m} constraints",
                b.len()
            )));
        }
        if let Some(i) = b.iter().position(|&bi| !(bi > 0.0 && bi.is_finite())) {
            return Err(Error::Validation(format!(
                "b[{i}] = {} but every right-hand side must be positive",
                b[i]
            )));
        }
        check_psd(&c, "C")?;
        if c.max_abs() == 0.0 {
            return Err(Error::Validation("C is the zero matrix".into()));
        }
        let constraints = match constraints {
            ConstraintFamily::Explicit(mats) => {
                let mut scaled = Vec::with_capacity(m);
                for (i, a) in mats.into_iter().enumerate() {
                    check_dim(&a, n, &format!("A[{i}]"))?;
                    check_psd(&a, &format!("A[{i}]"))?;
                    if a.max_abs() == 0.0 {
                        return Err(Error::Validation(format!("A[{i}] is the zero matrix")));
                    }
                    scaled.push(a.scale(1.0 / b[i]));
                }
                ConstraintFamily::Explicit(scaled)
            }
            ConstraintFamily::Robust(ucs) => {
                if variant == Variant::TypeII {
                    return Err(Error::Validation(
                        "robust constraint families are only supported for type1".into(),
                    ));
                }
                let mut scaled = Vec::with_capacity(m);
                for (i, uc) in ucs.into_iter().enumerate() {
                    uc.validate(n).map_err(|e| match e {
                        Error::InvalidUncertaintySet(s) => {
                            Error::InvalidUncertaintySet(format!("constraint {i}: {s}"))
                        }
                        Error::Validation(s) => Error::Validation(format!("constraint {i}: {s}")),
                        other => other,
                    })?;
                    scaled.push(uc.scaled(1.0 / b[i]));
                }
                ConstraintFamily::Robust(scaled)
            }
        };
        Ok(PackCoverInstance { variant, c, rhs: b, constraints })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn c(&self) -> &SymMat {
        &self.c
    }

    /// Original right-hand sides.
    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Constraints after division by `b`.
    pub fn constraints(&self) -> &ConstraintFamily {
        &self.constraints
    }

    pub fn n(&self) -> usize {
        self.c.n()
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }
}

fn check_dim(a: &SymMat, n: usize, what: &str) -> Result<()> {
    if a.n() != n {
        return Err(Error::Validation(format!("{what} is {}x{0}, expected {n}x{n}", a.n())));
    }
    Ok(())
}

pub(crate) fn check_psd(a: &SymMat, what: &str) -> Result<()> {
    if !a.is_psd(PSD_TOL) {
        return Err(Error::Validation(format!(
            "{what} is not positive semidefinite (smallest eigenvalue {:e})",
            a.lambda_min()
        )));
    }
    Ok(())
}

/// One atom of a robust dual measure: a realized perturbation and its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct DualAtom {
    pub delta: Vec<f64>,
    pub weight: f64,
}

/// Feasibility and gap figures attached to a solution.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CertificateSummary {
    pub max_violation: f64,
    /// Smallest eigenvalue of the relative dual slack; nonnegative means the
    /// dual is feasible.
    pub dual_min_eig: f64,
    pub gap: f64,
}

/// Primal matrix, sparse dual weights and bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimalDualPair {
    pub x: SymMat,
    pub y: BTreeMap<usize, f64>,
    /// Per-constraint realizations for robust families; empty otherwise.
    pub measures: BTreeMap<usize, Vec<DualAtom>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: u64,
    pub phases: u32,
    /// Accuracy actually reached (the last working accuracy of the solver).
    pub epsilon: f64,
    pub certificates: CertificateSummary,
}

impl PrimalDualPair {
    pub fn support_size(&self) -> usize {
        self.y.values().filter(|&&w| w > 0.0).count()
    }

    pub fn dual_sum(&self) -> f64 {
        self.y.values().sum()
    }
}
