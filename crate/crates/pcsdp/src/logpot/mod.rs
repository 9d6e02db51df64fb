//! Logarithmic-potential primal-dual solvers for both problem variants, with
//! scaling phases `ε_{s+1} = ε_s/2`.

mod bound;
mod theta;

pub use bound::{iteration_bound, phase_count, phase_eps};
pub use theta::{
    find_theta, find_theta_with, g_cholesky, g_from_eigs, potential, primal_from_theta, theta_star,
    ThetaStrategy, DIRECT_ROOT_MAX_N,
};

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{
    CertificateSummary, ConstraintOracle, DualAtom, OracleAnswer, OracleMode, PrimalDualPair, Variant,
};
use crate::linalg::{eig_sym, SymMat};
use crate::normalize::NormalizedInstance;

/// Iterations between full recomputations of `F = Σ y_i A_i`.
pub const REFRESH_EVERY: u64 = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub eps: f64,
    pub seed: u64,
    /// Hard cap on oracle calls; 0 means four times [`iteration_bound`].
    pub max_iterations: u64,
    pub theta_strategy: ThetaStrategy,
    /// Start from uniform weights over all constraints instead of a sparse
    /// support.
    pub dense_init: bool,
    /// Check the spectrum-side invariant with a fresh eigendecomposition
    /// after every update.
    pub debug_checks: bool,
}

impl SolverConfig {
    pub fn new(eps: f64) -> Self {
        SolverConfig {
            eps,
            seed: 0,
            max_iterations: 0,
            theta_strategy: ThetaStrategy::BinarySearch,
            dense_init: false,
            debug_checks: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(Error::Validation(format!("eps must lie in (0, 0.5), got {}", self.eps)));
        }
        Ok(())
    }
}

/// One oracle call of the solver.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: u64,
    pub s: u32,
    pub eps_s: f64,
    pub theta: f64,
    pub nu: f64,
    pub oracle_index: usize,
    /// Potential at the exact root `θ*` for the current `F`.
    pub phi: f64,
    #[serde(skip)]
    pub g_theta: f64,
    #[serde(skip)]
    pub x_dot_f: f64,
    #[serde(skip)]
    pub x_dot_a: f64,
    #[serde(skip)]
    pub y_sum: f64,
    /// Whether the dual was updated after this call (false ends the phase).
    #[serde(skip)]
    pub updated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialTrace {
    pub variant: Variant,
    pub n: usize,
    pub records: Vec<TraceRecord>,
}

impl PotentialTrace {
    /// One JSON object per line with fields `t, s, eps_s, theta, nu,
    /// oracle_index, phi`.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("plain record"));
            out.push('\n');
        }
        out
    }

    /// Largest shortfall of the per-step potential progress
    /// `±(Φ(t+1) − Φ(t)) ≥ ε_s ν²/(40n)` within phases; nonpositive when the
    /// bound holds everywhere.
    pub fn worst_progress_shortfall(&self) -> f64 {
        let sign = match self.variant {
            Variant::TypeI => 1.0,
            Variant::TypeII => -1.0,
        };
        self.records
            .windows(2)
            .filter(|w| w[0].updated && w[0].s == w[1].s)
            .map(|w| {
                let need = w[0].eps_s * w[0].nu * w[0].nu / (40.0 * self.n as f64);
                need - sign * (w[1].phi - w[0].phi)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct LogPotentialRun {
    pub pair: PrimalDualPair,
    pub trace: PotentialTrace,
    pub psi: f64,
    pub iteration_bound: u64,
    pub initial_support: Vec<usize>,
}

struct Atoms {
    index: Vec<usize>,
    delta: Vec<Option<Vec<f64>>>,
    matrix: Vec<SymMat>,
    weight: Vec<f64>,
    lookup: HashMap<(usize, Vec<u64>), usize>,
}

impl Atoms {
    fn new() -> Self {
        Atoms { index: vec![], delta: vec![], matrix: vec![], weight: vec![], lookup: HashMap::new() }
    }

    fn slot(&mut self, ans: &OracleAnswer) -> usize {
        let bits = ans.delta.as_ref().map_or_else(Vec::new, |d| d.iter().map(|v| v.to_bits()).collect());
        let key = (ans.index, bits);
        if let Some(&k) = self.lookup.get(&key) {
            return k;
        }
        let k = self.index.len();
        self.index.push(ans.index);
        self.delta.push(ans.delta.clone());
        self.matrix.push(ans.matrix.clone());
        self.weight.push(0.0);
        self.lookup.insert(key, k);
        k
    }

    fn combination(&self, n: usize) -> SymMat {
        let mut f = SymMat::zeros(n);
        for (a, &w) in self.matrix.iter().zip(&self.weight) {
            f.axpy(w, a);
        }
        f
    }
}

/// Candidate output: the last iterate examined before a phase ended.
struct Candidate {
    x: SymMat,
    theta: f64,
    weight: Vec<f64>,
    eps_s: f64,
}

/// Runs the solver on a normalized instance.
pub fn solve(instance: &NormalizedInstance, config: &SolverConfig) -> Result<LogPotentialRun> {
    solve_with_oracle(instance, instance.variant, &instance.initial_support, config)
}

/// Runs the solver against any constraint oracle in normalized form
/// (`C = I`, `b = 1`). `initial_support` lists the constraints carrying the
/// starting weight; variant II uses its first entry only.
pub fn solve_with_oracle<O: ConstraintOracle>(
    oracle: &O,
    variant: Variant,
    initial_support: &[usize],
    config: &SolverConfig,
) -> Result<LogPotentialRun> {
    config.validate()?;
    let n = oracle.dim();
    let m = oracle.count();
    if m == 0 {
        return Err(Error::EmptyFamily);
    }
    let mode = variant.oracle_mode();

    let support: Vec<usize> = if config.dense_init {
        (0..m).collect()
    } else {
        match variant {
            Variant::TypeI => initial_support.to_vec(),
            Variant::TypeII => initial_support.first().copied().into_iter().collect(),
        }
    };
    if support.is_empty() || support.iter().any(|&i| i >= m) {
        return Err(Error::Validation("initial support is empty or out of range".into()));
    }
    let mut atoms = Atoms::new();
    for &i in &support {
        let k = atoms.slot(&oracle.nominal(i));
        atoms.weight[k] += 1.0 / support.len() as f64;
    }
    let mut f = atoms.combination(n);
    let f0_eigs = f.eigenvalues();
    match variant {
        Variant::TypeI if !(f0_eigs[0] > 0.0) => {
            return Err(Error::Validation("initial dual combination is not positive definite".into()))
        }
        Variant::TypeII if !(f0_eigs[n - 1] > 0.0) => {
            return Err(Error::Validation("initial dual combination is zero".into()))
        }
        _ => {}
    }

    let mut records: Vec<TraceRecord> = Vec::new();
    let mut psi = f64::NAN;
    let mut bound = u64::MAX;
    let mut cap = if config.max_iterations > 0 { config.max_iterations } else { u64::MAX };
    let mut t: u64 = 0;
    let mut s: u32 = 0;
    let mut cand: Candidate;

    loop {
        let eps_s = phase_eps(variant, s);
        let delta_s = eps_s.powi(3) / (32.0 * n as f64);
        loop {
            if t >= cap {
                let trace = PotentialTrace { variant, n, records };
                return Err(Error::IterationCapExceeded { iterations: t, trace: trace.to_ndjson() });
            }
            if t > 0 && t.is_multiple_of(REFRESH_EVERY) {
                f = atoms.combination(n);
            }
            let dec = eig_sym(&f)?;
            let eigs = &dec.eigenvalues;
            let seed_t = config.seed ^ t.wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let theta = find_theta_with(&f, Some(eigs), eps_s, delta_s, variant, seed_t, config.theta_strategy)?;
            let scale = eps_s * theta / n as f64;
            let x = match variant {
                Variant::TypeI => dec.map(|l| scale / (l - theta)),
                Variant::TypeII => dec.map(|l| scale / (theta - l)),
            };
            let ans = oracle.query(&x, mode)?;
            let xa = ans.value;
            let xf = x.dot(&f);
            let nu = match variant {
                Variant::TypeI => (xa - xf) / (xa + xf),
                Variant::TypeII => (xf - xa) / (xa + xf),
            };
            let exact = theta_star(eigs, eps_s, variant)?;
            let phi = potential(eigs, exact, eps_s, variant);
            let g_theta = g_from_eigs(eigs, theta, eps_s, variant);
            let y_sum: f64 = atoms.weight.iter().sum();

            if t == 0 {
                let a_eigs = ans.matrix.eigenvalues();
                psi = match variant {
                    Variant::TypeI => a_eigs[n - 1] / f0_eigs[0],
                    Variant::TypeII => f0_eigs[n - 1] / a_eigs[0],
                };
                if !(psi > 0.0) {
                    psi = f64::INFINITY;
                }
                bound = iteration_bound(n, psi, config.eps, variant);
                if config.max_iterations == 0 {
                    cap = bound.saturating_mul(4);
                }
            }

            let updated = nu > eps_s;
            records.push(TraceRecord {
                t,
                s,
                eps_s,
                theta,
                nu,
                oracle_index: ans.index,
                phi,
                g_theta,
                x_dot_f: xf,
                x_dot_a: xa,
                y_sum,
                updated,
            });
            t += 1;

            if config.debug_checks {
                check_iterate(variant, eps_s, theta, g_theta, xf, y_sum)?;
            }

            if !updated {
                cand = Candidate { x, theta, weight: atoms.weight.clone(), eps_s };
                break;
            }
            let tau = eps_s * theta * nu / (4.0 * n as f64 * (xa + xf));
            let k = atoms.slot(&ans);
            for w in atoms.weight.iter_mut() {
                *w *= 1.0 - tau;
            }
            atoms.weight[k] += tau;
            f.blend(tau, &ans.matrix);

            if config.debug_checks {
                let e = f.eigenvalues();
                let ok = match variant {
                    Variant::TypeI => exact < e[0],
                    Variant::TypeII => exact > e[n - 1],
                };
                if !ok {
                    return Err(Error::NumericalFailure(format!(
                        "θ* = {exact} crossed the spectrum [{}, {}] at iteration {t}",
                        e[0],
                        e[n - 1]
                    )));
                }
            }
        }
        if phase_eps(variant, s) <= config.eps {
            break;
        }
        s += 1;
    }

    let pair = finish(oracle, variant, &atoms, cand, t, s + 1)?;
    Ok(LogPotentialRun {
        pair,
        trace: PotentialTrace { variant, n, records },
        psi,
        iteration_bound: bound,
        initial_support: support,
    })
}

fn check_iterate(variant: Variant, eps: f64, theta: f64, g: f64, xf: f64, y_sum: f64) -> Result<()> {
    if (y_sum - 1.0).abs() > 1e-10 {
        return Err(Error::NumericalFailure(format!("dual weights sum to {y_sum}")));
    }
    if !(g > 1.0 - eps && g <= 1.0 + 1e-12) {
        return Err(Error::NumericalFailure(format!("g(θ) = {g} outside ({}, 1]", 1.0 - eps)));
    }
    let window = match variant {
        Variant::TypeI => xf > theta * (1.0 - 1e-12) && xf < (1.0 + eps) * theta * (1.0 + 1e-12),
        Variant::TypeII => xf > (1.0 - 2.0 * eps) * theta * (1.0 - 1e-12) && xf <= (1.0 - eps) * theta * (1.0 + 1e-12),
    };
    if !window {
        return Err(Error::NumericalFailure(format!("X•F = {xf} outside the window around θ = {theta}")));
    }
    Ok(())
}

/// Scales the candidate iterate to the final primal-dual pair.
fn finish<O: ConstraintOracle>(
    oracle: &O,
    variant: Variant,
    atoms: &Atoms,
    cand: Candidate,
    iterations: u64,
    phases: u32,
) -> Result<PrimalDualPair> {
    let n = oracle.dim();
    let e = cand.eps_s;
    let factor = match variant {
        Variant::TypeI => (1.0 - e) / ((1.0 + e) * (1.0 + e) * cand.theta),
        Variant::TypeII => (1.0 + e) / ((1.0 - 2.0 * e) * (1.0 - 2.0 * e) * cand.theta),
    };
    let x = cand.x.scale(factor);

    let mut y: BTreeMap<usize, f64> = BTreeMap::new();
    let mut measures: BTreeMap<usize, Vec<DualAtom>> = BTreeMap::new();
    let mut slack = SymMat::zeros(n);
    for k in 0..atoms.index.len() {
        let w = cand.weight.get(k).copied().unwrap_or(0.0) / cand.theta;
        if w <= 0.0 {
            continue;
        }
        slack.axpy(w, &atoms.matrix[k]);
        *y.entry(atoms.index[k]).or_insert(0.0) += w;
        if let Some(d) = &atoms.delta[k] {
            measures.entry(atoms.index[k]).or_default().push(DualAtom { delta: d.clone(), weight: w });
        }
    }

    let primal_objective = x.trace();
    let dual_objective: f64 = y.values().sum();
    let (max_violation, dual_min_eig) = match variant {
        Variant::TypeI => {
            let worst = oracle.query(&x, OracleMode::Max)?.value;
            ((worst - 1.0).max(0.0), slack.lambda_min() - 1.0)
        }
        Variant::TypeII => {
            let worst = oracle.query(&x, OracleMode::Min)?.value;
            ((1.0 - worst).max(0.0), 1.0 - slack.lambda_max())
        }
    };
    Ok(PrimalDualPair {
        x,
        y,
        measures,
        primal_objective,
        dual_objective,
        iterations,
        phases,
        epsilon: e,
        certificates: CertificateSummary { max_violation, dual_min_eig, gap: primal_objective / dual_objective },
    })
}
