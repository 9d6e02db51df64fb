//! Matrix multiplicative-weights solver for the normalized covering pair
//! `min I•X, A_i•X ≥ 1` / `max 1ᵀy, Σ y_i A_i ⪯ I`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{CertificateSummary, ConstraintOracle, OracleMode, PrimalDualPair, Variant};
use crate::linalg::{exp_base, SymMat};
use crate::normalize::NormalizedInstance;

/// Stopping level `T` for `λ_max(F)`: `ε⁻²·ln n`, or `ε⁻²` when `n = 1`.
pub fn mwu_threshold(n: usize, eps: f64) -> f64 {
    let log = if n >= 2 { (n as f64).ln() } else { 1.0 };
    log / (eps * eps)
}

/// `⌈n·T⌉`.
pub fn mwu_iteration_bound(n: usize, eps: f64) -> u64 {
    (n as f64 * mwu_threshold(n, eps)).ceil() as u64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MwuRecord {
    pub t: u64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "L_running")]
    pub l_running: f64,
    pub delta: f64,
    pub oracle_index: usize,
    /// `I•X` after the update.
    #[serde(skip)]
    pub trace_x: f64,
    /// `Tr F` after the update.
    #[serde(skip)]
    pub trace_f: f64,
    #[serde(skip)]
    pub delta_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct MwuTrace {
    pub records: Vec<MwuRecord>,
}

impl MwuTrace {
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("plain record"));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct MwuRun {
    pub pair: PrimalDualPair,
    pub trace: MwuTrace,
    pub threshold: f64,
    pub iteration_bound: u64,
    /// `L/M` at termination.
    pub ratio: f64,
}

/// Runs the multiplicative-weights solver on a normalized type2 instance.
pub fn solve_mwu(instance: &NormalizedInstance, eps: f64) -> Result<MwuRun> {
    if instance.variant != Variant::TypeII {
        return Err(Error::Validation("the MWU solver handles type2 instances only".into()));
    }
    solve_mwu_with_oracle(instance, eps)
}

/// As [`solve_mwu`], against any Min oracle in normalized form.
pub fn solve_mwu_with_oracle<O: ConstraintOracle>(oracle: &O, eps: f64) -> Result<MwuRun> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::Validation(format!("eps must lie in (0, 0.5], got {eps}")));
    }
    let n = oracle.dim();
    if oracle.count() == 0 {
        return Err(Error::EmptyFamily);
    }
    let threshold = mwu_threshold(n, eps);
    let bound = mwu_iteration_bound(n, eps);

    let mut x = SymMat::zeros(n);
    let mut f = SymMat::zeros(n);
    let mut y: BTreeMap<usize, f64> = BTreeMap::new();
    let mut top_cache: HashMap<usize, f64> = HashMap::new();
    let mut records = Vec::new();
    let mut big_m = 0.0_f64;
    let mut delta_sum = 0.0;
    let mut ans = oracle.query(&SymMat::identity(n).scale(1.0 / n as f64), OracleMode::Min)?;
    let mut t: u64 = 0;

    while big_m < threshold {
        // The cap guards against a broken oracle; the bound itself always holds.
        if t > bound.saturating_mul(4) {
            return Err(Error::IterationCapExceeded { iterations: t, trace: MwuTrace { records }.to_ndjson() });
        }
        let p = exp_base(&f.shift(-big_m), 1.0 + eps)?;
        let p = p.scale(1.0 / p.trace());
        let top = match ans.delta {
            None => *top_cache.entry(ans.index).or_insert_with(|| ans.matrix.lambda_max()),
            Some(_) => ans.matrix.lambda_max(),
        };
        if !(top > 0.0) {
            return Err(Error::NumericalFailure(format!("constraint {} has no positive eigenvalue", ans.index)));
        }
        let delta = 1.0 / top;
        x.axpy(delta, &p);
        f.axpy(delta, &ans.matrix);
        *y.entry(ans.index).or_insert(0.0) += delta;
        delta_sum += delta;
        big_m = f.lambda_max();
        let index = ans.index;
        ans = oracle.query(&x, OracleMode::Min)?;
        records.push(MwuRecord {
            t,
            m: big_m,
            l_running: ans.value,
            delta,
            oracle_index: index,
            trace_x: x.trace(),
            trace_f: f.trace(),
            delta_sum,
        });
        t += 1;
    }

    let l = ans.value;
    if !(l > 0.0) {
        return Err(Error::NumericalFailure("final primal covers no constraint".into()));
    }
    let x_hat = x.scale(1.0 / l);
    let y_hat: BTreeMap<usize, f64> = y.iter().map(|(&i, &w)| (i, w / big_m)).collect();
    let primal_objective = x_hat.trace();
    let dual_objective: f64 = y_hat.values().sum();
    let pair = PrimalDualPair {
        x: x_hat,
        y: y_hat,
        measures: BTreeMap::new(),
        primal_objective,
        dual_objective,
        iterations: t,
        phases: 1,
        epsilon: eps,
        certificates: CertificateSummary {
            max_violation: 0.0,
            dual_min_eig: 1.0 - f.lambda_max() / big_m,
            gap: primal_objective / dual_objective,
        },
    };
    Ok(MwuRun { pair, trace: MwuTrace { records }, threshold, iteration_bound: bound, ratio: l / big_m })
}

/// `ln(1+ε)/ε − ε`, the guaranteed lower bound on `L/M`.
pub fn mwu_ratio_bound(eps: f64) -> f64 {
    eps.ln_1p() / eps - eps
}
