use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    CertificateSummary, ConstraintFamily, DualAtom, PackCoverInstance, PrimalDualPair,
    UncertainConstraint, UncertaintySet, Variant,
};
use crate::error::{Error, Result};
use crate::linalg::SymMat;

type Rows = Vec<Vec<f64>>;

/// On-disk instance layout. Matrices are dense, row-major.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub variant: String,
    pub n: usize,
    #[serde(rename = "C")]
    pub c: Rows,
    pub b: Vec<f64>,
    pub constraints: Vec<ConstraintDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstraintDoc {
    Explicit {
        #[serde(rename = "A")]
        a: Rows,
    },
    Robust {
        #[serde(rename = "A0")]
        a0: Rows,
        perturbations: Vec<Rows>,
        set: SetDoc,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SetDoc {
    Ellipsoid {
        delta0: Vec<f64>,
        #[serde(rename = "D")]
        d: Rows,
    },
    Box {
        delta0: Vec<f64>,
        rho: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub max_violation: f64,
    pub dual_min_eig: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomDoc {
    pub delta: Vec<f64>,
    pub weight: f64,
}

/// On-disk solution layout.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionDoc {
    #[serde(rename = "X")]
    pub x: Rows,
    pub y: BTreeMap<usize, f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: u64,
    pub phases: u32,
    pub epsilon: f64,
    pub certificates: CertificateDoc,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measures: BTreeMap<usize, Vec<AtomDoc>>,
    /// Free-form run report (claim constants, bounds); ignored on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<serde_json::Value>,
}

fn variant_from_str(s: &str) -> Result<Variant> {
    match s {
        "type1" => Ok(Variant::TypeI),
        "type2" => Ok(Variant::TypeII),
        other => Err(Error::Validation(format!("unknown variant {other:?}"))),
    }
}

pub(crate) fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::TypeI => "type1",
        Variant::TypeII => "type2",
    }
}

fn matrix(rows: &Rows, n: usize, what: &str) -> Result<SymMat> {
    if rows.len() != n {
        return Err(Error::Validation(format!("{what} has {} rows, expected {n}", rows.len())));
    }
    SymMat::from_rows(rows).map_err(|e| Error::Validation(format!("{what}: {e}")))
}

pub fn load_instance(text: &str) -> Result<PackCoverInstance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    instance_from_doc(&doc)
}

pub(crate) fn instance_from_doc(doc: &InstanceDoc) -> Result<PackCoverInstance> {
    let variant = variant_from_str(&doc.variant)?;
    let n = doc.n;
    if n == 0 {
        return Err(Error::Validation("n must be positive".into()));
    }
    let c = matrix(&doc.c, n, "C")?;
    let explicit = doc.constraints.iter().filter(|c| matches!(c, ConstraintDoc::Explicit { .. })).count();
    if explicit != 0 && explicit != doc.constraints.len() {
        return Err(Error::Validation("explicit and robust constraints cannot be mixed".into()));
    }
    let family = if explicit == doc.constraints.len() {
        let mut mats = Vec::with_capacity(explicit);
        for (i, cd) in doc.constraints.iter().enumerate() {
            if let ConstraintDoc::Explicit { a } = cd {
                mats.push(matrix(a, n, &format!("A[{i}]"))?);
            }
        }
        ConstraintFamily::Explicit(mats)
    } else {
        let mut ucs = Vec::with_capacity(doc.constraints.len());
        for (i, cd) in doc.constraints.iter().enumerate() {
            let ConstraintDoc::Robust { a0, perturbations, set } = cd else { unreachable!() };
            let a0 = matrix(a0, n, &format!("A0[{i}]"))?;
            let mut ps = Vec::with_capacity(perturbations.len());
            for (r, p) in perturbations.iter().enumerate() {
                ps.push(matrix(p, n, &format!("perturbation {r} of constraint {i}"))?);
            }
            let set = match set {
                SetDoc::Ellipsoid { delta0, d } => UncertaintySet::Ellipsoid {
                    delta0: delta0.clone(),
                    d: SymMat::from_rows(d).map_err(|e| {
                        Error::InvalidUncertaintySet(format!("constraint {i}: D: {e}"))
                    })?,
                },
                SetDoc::Box { delta0, rho } => UncertaintySet::Box { delta0: delta0.clone(), rho: *rho },
            };
            ucs.push(UncertainConstraint { a0, perturbations: ps, set });
        }
        ConstraintFamily::Robust(ucs)
    };
    PackCoverInstance::new(variant, c, doc.b.clone(), family)
}

/// Serializes an instance in its original units (constraints multiplied back
/// by `b`).
pub fn save_instance(inst: &PackCoverInstance) -> String {
    let b = inst.rhs().to_vec();
    let constraints = match inst.constraints() {
        ConstraintFamily::Explicit(mats) => mats
            .iter()
            .zip(&b)
            .map(|(a, bi)| ConstraintDoc::Explicit { a: a.scale(*bi).to_rows() })
            .collect(),
        ConstraintFamily::Robust(ucs) => ucs
            .iter()
            .zip(&b)
            .map(|(u, bi)| ConstraintDoc::Robust {
                a0: u.a0.scale(*bi).to_rows(),
                perturbations: u.perturbations.iter().map(|p| p.scale(*bi).to_rows()).collect(),
                set: match &u.set {
                    UncertaintySet::Ellipsoid { delta0, d } => {
                        SetDoc::Ellipsoid { delta0: delta0.clone(), d: d.to_rows() }
                    }
                    UncertaintySet::Box { delta0, rho } => {
                        SetDoc::Box { delta0: delta0.clone(), rho: *rho }
                    }
                },
            })
            .collect(),
    };
    let doc = InstanceDoc {
        variant: variant_name(inst.variant()).into(),
        n: inst.n(),
        c: inst.c().to_rows(),
        b,
        constraints,
    };
    serde_json::to_string_pretty(&doc).expect("instance serializes")
}

pub(crate) fn solution_doc(pair: &PrimalDualPair) -> SolutionDoc {
    SolutionDoc {
        x: pair.x.to_rows(),
        y: pair.y.clone(),
        primal_objective: pair.primal_objective,
        dual_objective: pair.dual_objective,
        iterations: pair.iterations,
        phases: pair.phases,
        epsilon: pair.epsilon,
        certificates: CertificateDoc {
            max_violation: pair.certificates.max_violation,
            dual_min_eig: pair.certificates.dual_min_eig,
            gap: pair.certificates.gap,
        },
        measures: pair
            .measures
            .iter()
            .map(|(&i, atoms)| {
                (i, atoms.iter().map(|a| AtomDoc { delta: a.delta.clone(), weight: a.weight }).collect())
            })
            .collect(),
        report: None,
    }
}

pub fn save_solution(pair: &PrimalDualPair) -> String {
    serde_json::to_string_pretty(&solution_doc(pair)).expect("solution serializes")
}

pub fn load_solution(text: &str) -> Result<PrimalDualPair> {
    let doc: SolutionDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let x = SymMat::from_rows(&doc.x).map_err(|e| Error::Validation(format!("X: {e}")))?;
    Ok(PrimalDualPair {
        x,
        y: doc.y,
        measures: doc
            .measures
            .into_iter()
            .map(|(i, atoms)| {
                (i, atoms.into_iter().map(|a| DualAtom { delta: a.delta, weight: a.weight }).collect())
            })
            .collect(),
        primal_objective: doc.primal_objective,
        dual_objective: doc.dual_objective,
        iterations: doc.iterations,
        phases: doc.phases,
        epsilon: doc.epsilon,
        certificates: CertificateSummary {
            max_violation: doc.certificates.max_violation,
            dual_min_eig: doc.certificates.dual_min_eig,
            gap: doc.certificates.gap,
        },
    })
}
