//! Reduction of general instances to the normalized form `C = I`, `b = 1`,
//! and the matching pull-back of solutions.

mod type1;
mod type2;

pub use type1::{normalize_type1, pull_back_type1};
pub use type2::{check_support, normalize_type2, pull_back_type2, Support};

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::instance::{
    ConstraintFamily, ConstraintOracle, DualAtom, OracleAnswer, OracleMode, PackCoverInstance,
    PrimalDualPair, UncertainConstraint, Variant,
};
use crate::instance::{query_robust, scan};
use crate::linalg::SymMat;

/// Smallest eigenvalue a prefix sum must exceed to count as positive definite.
pub const PD_PREFIX_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    Type1,
    Type2,
}

/// Everything needed to map a normalized solution back to the original
/// instance.
#[derive(Clone, Debug)]
pub struct TransformRecord {
    pub kind: TransformKind,
    /// Original dimension.
    pub n: usize,
    /// Dimension after reduction.
    pub dim: usize,
    /// Unit lower triangular factor of `C = L·diag(D)·Lᵀ`.
    pub l: DMatrix<f64>,
    /// Type1: the perturbed pivots `D + δĪ`. Type2: the positive pivots only.
    pub d: Vec<f64>,
    /// Pivot positions that survive into the reduced space.
    pub columns: Vec<usize>,
    /// Perturbation added to the zero pivots of `C` (type1).
    pub delta: f64,
    /// `C•I / max_i A_i•I` (type1).
    pub zeta: f64,
    /// Upper bound `r/λ_min(Σ_{i≤r} A_i)` on the trace of a feasible primal (type1).
    pub trace_bound: f64,
    /// Original indices of the normalized constraints, in order.
    pub kept: Vec<usize>,
    /// Constraints removed by the range test, with their witness vectors.
    pub dropped: Vec<(usize, Vec<f64>)>,
    /// Constraints removed because their top eigenvalue was too large (type2).
    pub trimmed: Vec<usize>,
    /// Identity shift `εβ′/n′` added to kept constraints (type2).
    pub shift: f64,
    /// Smallest estimated top eigenvalue over the reduced constraints (type2).
    pub beta_prime: f64,
    pub eps: f64,
    /// Original right-hand sides.
    pub scale_b: Vec<f64>,
    /// Congruence `W` (`dim × n`) with `A′ = W·A·Wᵀ` and `X = Wᵀ·X′·W`.
    pub w: DMatrix<f64>,
}

impl TransformRecord {
    pub fn identity(n: usize, m: usize) -> Self {
        TransformRecord {
            kind: TransformKind::Type1,
            n,
            dim: n,
            l: DMatrix::identity(n, n),
            d: vec![1.0; n],
            columns: (0..n).collect(),
            delta: 0.0,
            zeta: 0.0,
            trace_bound: 0.0,
            kept: (0..m).collect(),
            dropped: Vec::new(),
            trimmed: Vec::new(),
            shift: 0.0,
            beta_prime: 0.0,
            eps: 0.0,
            scale_b: vec![1.0; m],
            w: DMatrix::identity(n, n),
        }
    }

    /// `Wᵀ·X′·W`.
    pub fn lift(&self, x: &SymMat) -> SymMat {
        x.congruence(&self.w.transpose())
    }
}

/// Constraint family of a normalized instance.
#[derive(Clone, Debug)]
pub enum NormalizedFamily {
    Explicit(Vec<SymMat>),
    /// Robust constraints stay in original coordinates; queries are mapped
    /// through the congruence `w`.
    Robust { constraints: Vec<UncertainConstraint>, w: DMatrix<f64> },
}

/// Instance with `C = I` and `b = 1`.
#[derive(Clone, Debug)]
pub struct NormalizedInstance {
    pub variant: Variant,
    pub dim: usize,
    pub family: NormalizedFamily,
    pub record: TransformRecord,
    /// Type1: indices whose matrices sum to a positive definite matrix.
    /// Type2: the single start index.
    pub initial_support: Vec<usize>,
}

impl NormalizedInstance {
    /// Wraps matrices that are already normalized, with an identity record.
    pub fn from_matrices(variant: Variant, matrices: Vec<SymMat>) -> Result<Self> {
        let Some(first) = matrices.first() else { return Err(Error::EmptyFamily) };
        let n = first.n();
        if matrices.iter().any(|a| a.n() != n) {
            return Err(Error::Validation("constraint matrices differ in dimension".into()));
        }
        let fam = ConstraintFamily::Explicit(matrices);
        let initial_support = match variant {
            Variant::TypeI => discover_initial_support(&fam)?,
            Variant::TypeII => {
                let ConstraintFamily::Explicit(mats) = &fam else { unreachable!() };
                vec![start_index(mats)]
            }
        };
        let ConstraintFamily::Explicit(mats) = fam else { unreachable!() };
        let m = mats.len();
        let mut record = TransformRecord::identity(n, m);
        record.kind = match variant {
            Variant::TypeI => TransformKind::Type1,
            Variant::TypeII => TransformKind::Type2,
        };
        Ok(NormalizedInstance {
            variant,
            dim: n,
            family: NormalizedFamily::Explicit(mats),
            record,
            initial_support,
        })
    }

    pub fn matrices(&self) -> Option<&[SymMat]> {
        match &self.family {
            NormalizedFamily::Explicit(m) => Some(m),
            NormalizedFamily::Robust { .. } => None,
        }
    }

    pub fn is_robust(&self) -> bool {
        matches!(self.family, NormalizedFamily::Robust { .. })
    }

    /// The normalized problem as a standalone instance with `C = I`, `b = 1`.
    pub fn to_instance(&self) -> Result<PackCoverInstance> {
        let family = match &self.family {
            NormalizedFamily::Explicit(mats) => ConstraintFamily::Explicit(mats.clone()),
            NormalizedFamily::Robust { constraints, w } => ConstraintFamily::Robust(
                constraints
                    .iter()
                    .map(|uc| UncertainConstraint {
                        a0: uc.a0.congruence(w),
                        perturbations: uc.perturbations.iter().map(|p| p.congruence(w)).collect(),
                        set: uc.set.clone(),
                    })
                    .collect(),
            ),
        };
        let m = self.count();
        PackCoverInstance::new(self.variant, SymMat::identity(self.dim), vec![1.0; m], family)
    }
}

impl ConstraintOracle for NormalizedInstance {
    fn dim(&self) -> usize {
        self.dim
    }

    fn count(&self) -> usize {
        match &self.family {
            NormalizedFamily::Explicit(m) => m.len(),
            NormalizedFamily::Robust { constraints, .. } => constraints.len(),
        }
    }

    fn query(&self, y: &SymMat, mode: OracleMode) -> Result<OracleAnswer> {
        match &self.family {
            NormalizedFamily::Explicit(mats) => {
                let (index, value) = scan(mats.iter().map(|a| a.dot(y)), mode)?;
                Ok(OracleAnswer { index, delta: None, matrix: mats[index].clone(), value })
            }
            NormalizedFamily::Robust { constraints, w } => {
                let y_orig = y.congruence(&w.transpose());
                let mut ans = query_robust(constraints, &y_orig, mode)?;
                ans.matrix = ans.matrix.congruence(w);
                Ok(ans)
            }
        }
    }

    fn nominal(&self, index: usize) -> OracleAnswer {
        match &self.family {
            NormalizedFamily::Explicit(mats) => OracleAnswer {
                index,
                delta: None,
                matrix: mats[index].clone(),
                value: 0.0,
            },
            NormalizedFamily::Robust { constraints, w } => {
                let uc = &constraints[index];
                let delta = uc.set.center().to_vec();
                let matrix = uc.realize(&delta).congruence(w);
                OracleAnswer { index, delta: Some(delta), matrix, value: 0.0 }
            }
        }
    }
}

/// First prefix `0..r` of nominal constraint matrices whose sum is positive
/// definite.
pub fn discover_initial_support(oracle: &impl ConstraintOracle) -> Result<Vec<usize>> {
    let n = oracle.dim();
    let mut sum = SymMat::zeros(n);
    for i in 0..oracle.count() {
        sum.axpy(1.0, &oracle.nominal(i).matrix);
        if sum.lambda_min() > PD_PREFIX_TOL {
            return Ok((0..=i).collect());
        }
    }
    Err(Error::NoPositiveDefiniteSubset)
}

/// Start index for the covering solver: smallest top eigenvalue, lowest index
/// on ties.
pub fn start_index(mats: &[SymMat]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, a) in mats.iter().enumerate() {
        let l = a.lambda_max();
        if l < best.1 {
            best = (i, l);
        }
    }
    best.0
}

/// Maps a solution of the normalized instance back to `instance`, reporting
/// dual weights in the caller's units (divided by `b`) and recomputing both
/// objectives on the original data.
pub fn pull_back(
    instance: &PackCoverInstance,
    normalized: &NormalizedInstance,
    pair: &PrimalDualPair,
) -> Result<PrimalDualPair> {
    let (x, y_scaled) = match normalized.record.kind {
        TransformKind::Type1 => pull_back_type1(&normalized.record, &pair.x, &pair.y),
        TransformKind::Type2 => pull_back_type2(&normalized.record, instance, &pair.x, &pair.y)?,
    };
    let b = instance.rhs();
    let y: BTreeMap<usize, f64> = y_scaled.iter().map(|(&i, &w)| (i, w / b[i])).collect();
    let measures = pair
        .measures
        .iter()
        .map(|(&k, atoms)| {
            let i = normalized.record.kept[k];
            let atoms = atoms
                .iter()
                .map(|a| DualAtom { delta: a.delta.clone(), weight: a.weight / b[i] })
                .collect();
            (i, atoms)
        })
        .collect();
    let dual_objective = y.iter().map(|(&i, &w)| w * b[i]).sum();
    Ok(PrimalDualPair {
        primal_objective: instance.c().dot(&x),
        dual_objective,
        x,
        y,
        measures,
        iterations: pair.iterations,
        phases: pair.phases,
        epsilon: pair.epsilon,
        certificates: pair.certificates,
    })
}

/// Normalizes according to the instance's variant.
pub fn normalize(instance: &PackCoverInstance, eps: f64, seed: u64) -> Result<NormalizedInstance> {
    match instance.variant() {
        Variant::TypeI => normalize_type1(instance, eps),
        Variant::TypeII => normalize_type2(instance, eps, seed),
    }
}
