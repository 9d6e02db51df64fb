//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::DMatrix;
use pcsdp::instance::{robust_worst_case, UncertainConstraint, UncertaintySet, Variant};
use pcsdp::linalg::{exp_base, lanczos_extreme, ldl, matrix_power_int, SymMat};
use pcsdp::logpot::{self, find_theta_with, LogPotentialRun, SolverConfig, ThetaStrategy};
use pcsdp::mwu::{solve_mwu, MwuRun};
use pcsdp::normalize::{normalize_type1, normalize_type2, pull_back, NormalizedInstance};
use pcsdp::verify::reference_optimum;
use rand::Rng;
use rand_distr::StandardNormal;

use common::*;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// Test-side iteration bounds with the explicit constants written out again.
fn bound_log(variant: Variant, n: usize, psi: f64, eps: f64) -> f64 {
    let n = n as f64;
    let phases = (1.0 / eps).log2().ceil() as i32;
    match variant {
        Variant::TypeI => {
            480.0 * n * (2.0 * psi).ln() + (1..=phases).map(|s| 600.0 * n * 4f64.powi(s + 1)).sum::<f64>()
        }
        Variant::TypeII => {
            1920.0 * n * (9.0 * psi / 8.0).ln()
                + (4.0f64 / 3.0).ln()
                + (1..=phases).map(|s| 1400.0 * n * 4f64.powi(s + 2)).sum::<f64>()
        }
    }
}

fn bound_mwu(n: usize, eps: f64) -> f64 {
    let t = if n >= 2 { (n as f64).ln() } else { 1.0 } / (eps * eps);
    (n as f64 * t).ceil()
}

fn solve_log(inst: &NormalizedInstance, eps: f64) -> Result<LogPotentialRun, String> {
    logpot::solve(inst, &SolverConfig::new(eps)).map_err(|e| format!("solver error: {e}"))
}

struct LogCase {
    label: String,
    inst: NormalizedInstance,
    eps: f64,
    run: Result<LogPotentialRun, String>,
}

struct MwuCase {
    label: String,
    inst: NormalizedInstance,
    eps: f64,
    run: Result<MwuRun, String>,
}

struct Matrix {
    log: Vec<LogCase>,
    mwu: Vec<MwuCase>,
}

const MATRIX_EPS: [f64; 3] = [0.25, 0.1, 0.05];

fn matrix_instances() -> Vec<(usize, Vec<SymMat>)> {
    let mut r = rng(2024);
    (0..10)
        .map(|_| {
            let n = r.random_range(2..=10);
            let m = r.random_range(2..=20);
            (n, (0..m).map(|_| random_pd(n, &mut r)).collect())
        })
        .collect()
}

/// `{ε ∈ {0.25, 0.1, 0.05}} × {10 random instances, n ≤ 10, m ≤ 20}` for both
/// log-potential variants and the MWU solver.
fn test_matrix() -> &'static Matrix {
    static CELL: OnceLock<Matrix> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut log = Vec::new();
        let mut mwu = Vec::new();
        for (k, (n, mats)) in matrix_instances().into_iter().enumerate() {
            for &eps in &MATRIX_EPS {
                for variant in [Variant::TypeI, Variant::TypeII] {
                    let inst = NormalizedInstance::from_matrices(variant, mats.clone()).expect("instance");
                    let run = solve_log(&inst, eps);
                    log.push(LogCase { label: format!("{variant:?} #{k} n={n} eps={eps}"), inst, eps, run });
                }
                let inst = NormalizedInstance::from_matrices(Variant::TypeII, mats.clone()).expect("instance");
                let run = solve_mwu(&inst, eps).map_err(|e| format!("solver error: {e}"));
                mwu.push(MwuCase { label: format!("MWU #{k} n={n} eps={eps}"), inst, eps, run });
            }
        }
        Matrix { log, mwu }
    })
}

fn log_runs() -> Result<Vec<(&'static LogCase, &'static LogPotentialRun)>, String> {
    test_matrix()
        .log
        .iter()
        .map(|c| c.run.as_ref().map(|r| (c, r)).map_err(|e| format!("{}: {e}", c.label)))
        .collect()
}

fn mwu_runs() -> Result<Vec<(&'static MwuCase, &'static MwuRun)>, String> {
    test_matrix()
        .mwu
        .iter()
        .map(|c| c.run.as_ref().map(|r| (c, r)).map_err(|e| format!("{}: {e}", c.label)))
        .collect()
}

fn dual_combination(mats: &[SymMat], y: &std::collections::BTreeMap<usize, f64>) -> SymMat {
    let mut f = SymMat::zeros(mats[0].n());
    for (&i, &w) in y {
        f.axpy(w, &mats[i]);
    }
    f
}

fn criterion_1() -> Check {
    let eps = 0.1;
    let mut r = rng(1);
    let mut worst: f64 = 1.0;
    let mut ref_gap: f64 = 0.0;
    for k in 0..20 {
        let n = r.random_range(1..=6);
        let a = random_diag(n, 0.5, 3.0, &mut r);
        let b = random_diag(n, 0.5, 3.0, &mut r);
        for variant in [Variant::TypeI, Variant::TypeII] {
            let inst = NormalizedInstance::from_matrices(variant, vec![a.clone(), b.clone()]).unwrap();
            let reference = reference_optimum(&inst, 10001).map_err(|e| e.to_string())?;
            let lp = diagonal_lp_optimum(variant, &a.diagonal(), &b.diagonal());
            ref_gap = ref_gap.max((reference - lp).abs() / lp);
            ensure((reference - lp).abs() <= 1e-3 * lp, || {
                format!("instance {k} {variant:?}: grid reference {reference} vs LP vertex optimum {lp}")
            })?;
            let run = solve_log(&inst, eps)?;
            let dual = run.pair.dual_objective;
            let ratio = dual / reference;
            worst = if (ratio - 1.0).abs() > (worst - 1.0).abs() { ratio } else { worst };
            ensure(ratio >= 1.0 - 6.0 * eps && ratio <= 1.0 + 6.0 * eps, || {
                format!("instance {k} {variant:?}: dual {dual} vs reference {reference}")
            })?;
        }
    }
    Ok(format!("40 runs, worst dual/reference {worst:.4}, grid vs LP vertex oracle {ref_gap:.1e}"))
}

fn criterion_2() -> Check {
    let mut count = 0;
    for (case, run) in log_runs()? {
        let mats = case.inst.matrices().unwrap();
        let p = &run.pair;
        let dual = dual_combination(mats, &p.y);
        match case.inst.variant {
            Variant::TypeI => {
                let worst = mats.iter().map(|a| a.dot(&p.x)).fold(f64::NEG_INFINITY, f64::max);
                ensure(worst <= 1.0 + 1e-9, || format!("{}: max A•X = {worst}", case.label))?;
                let lmin = dual.lambda_min();
                ensure(lmin >= 1.0, || format!("{}: λ_min(ΣyA) = {lmin}", case.label))?;
            }
            Variant::TypeII => {
                let worst = mats.iter().map(|a| a.dot(&p.x)).fold(f64::INFINITY, f64::min);
                ensure(worst >= 1.0 - 1e-9, || format!("{}: min A•X = {worst}", case.label))?;
                let lmax = dual.lambda_max();
                ensure(lmax <= 1.0 + 1e-12, || format!("{}: λ_max(ΣyA) = {lmax}", case.label))?;
            }
        }
        count += 1;
    }
    for (case, run) in mwu_runs()? {
        let mats = case.inst.matrices().unwrap();
        let p = &run.pair;
        let worst = mats.iter().map(|a| a.dot(&p.x)).fold(f64::INFINITY, f64::min);
        ensure(worst >= 1.0 - 1e-9, || format!("{}: min A•X = {worst}", case.label))?;
        let lmax = dual_combination(mats, &p.y).lambda_max();
        ensure(lmax <= 1.0 + 1e-12, || format!("{}: λ_max(ΣyA) = {lmax}", case.label))?;
        count += 1;
    }
    Ok(format!("{count} runs, zero failures"))
}

fn criterion_3() -> Check {
    let mut slack_i = f64::INFINITY;
    let mut slack_ii = f64::INFINITY;
    let mut slack_mwu = f64::INFINITY;
    for (case, run) in log_runs()? {
        let p = &run.pair;
        let e = p.epsilon;
        let ratio = p.x.trace() / p.y.values().sum::<f64>();
        match case.inst.variant {
            Variant::TypeI => {
                let bound = ((1.0 - e) / (1.0 + e)).powi(2);
                ensure(ratio >= bound - 1e-9, || format!("{}: ratio {ratio} < {bound}", case.label))?;
                slack_i = slack_i.min(ratio - bound);
            }
            Variant::TypeII => {
                let bound = (1.0 + e) / (1.0 - 2.0 * e).powi(2);
                ensure(ratio <= bound + 1e-9, || format!("{}: ratio {ratio} > {bound}", case.label))?;
                slack_ii = slack_ii.min(bound - ratio);
            }
        }
    }
    for (case, run) in mwu_runs()? {
        let p = &run.pair;
        let e = case.eps;
        let lm = p.y.values().sum::<f64>() / p.x.trace();
        let bound = (1.0 + e).ln() / e - e;
        ensure(lm >= bound - 1e-9, || format!("{}: L/M {lm} < {bound}", case.label))?;
        slack_mwu = slack_mwu.min(lm - bound);
    }
    Ok(format!("smallest slack: type1 {slack_i:.2e}, type2 {slack_ii:.2e}, mwu {slack_mwu:.2e}"))
}

fn criterion_4() -> Check {
    let mut worst: f64 = 0.0;
    for (case, run) in log_runs()? {
        let mats = case.inst.matrices().unwrap();
        let n = case.inst.dim;
        let first = run.trace.records[0].oracle_index;
        let psi = match case.inst.variant {
            Variant::TypeI => {
                let support = &run.initial_support;
                let mut abar = SymMat::zeros(n);
                for &i in support {
                    abar.axpy(1.0, &mats[i]);
                }
                support.len() as f64 * mats[first].lambda_max() / abar.lambda_min()
            }
            Variant::TypeII => mats[run.initial_support[0]].lambda_max() / mats[first].lambda_min(),
        };
        let bound = bound_log(case.inst.variant, n, psi, case.eps);
        let iters = run.pair.iterations as f64;
        ensure(iters <= bound, || format!("{}: {iters} iterations > bound {bound}", case.label))?;
        ensure(iters == run.trace.records.len() as f64, || format!("{}: trace length mismatch", case.label))?;
        worst = worst.max(iters / bound);
    }
    let mut worst_mwu: f64 = 0.0;
    for (case, run) in mwu_runs()? {
        let bound = bound_mwu(case.inst.dim, case.eps);
        let iters = run.pair.iterations as f64;
        ensure(iters <= bound, || format!("{}: {iters} iterations > bound {bound}", case.label))?;
        worst_mwu = worst_mwu.max(iters / bound);
    }
    Ok(format!("largest iterations/bound: log {worst:.2e}, mwu {worst_mwu:.3}"))
}

fn criterion_5() -> Check {
    let runs = log_runs()?;
    for (case, run) in &runs {
        let supp = run.pair.support_size() as u64;
        let extra = match case.inst.variant {
            Variant::TypeI => run.initial_support.len() as u64,
            Variant::TypeII => 1,
        };
        ensure(supp <= run.pair.iterations + extra, || {
            format!("{}: support {supp} > {} + {extra}", case.label, run.pair.iterations)
        })?;
    }
    let mut worst: f64 = 0.0;
    for (a, ra) in &runs {
        if a.eps != 0.1 {
            continue;
        }
        let (b, rb) = runs
            .iter()
            .find(|(b, _)| b.eps == 0.05 && b.inst.variant == a.inst.variant && same_instance(&a.inst, &b.inst))
            .expect("paired run");
        let (s1, s2) = (ra.pair.support_size() as f64, rb.pair.support_size() as f64);
        worst = worst.max(s2 / s1);
        ensure(s2 <= 4.5 * s1, || format!("{} -> {}: support {s1} -> {s2}", a.label, b.label))?;
    }
    Ok(format!("support bound holds on {} runs, largest growth 0.1 -> 0.05 is x{worst:.2}", runs.len()))
}

fn same_instance(a: &NormalizedInstance, b: &NormalizedInstance) -> bool {
    a.matrices().unwrap() == b.matrices().unwrap()
}

fn criterion_6() -> Check {
    let mut sampled = 0;
    for (case, run) in log_runs()? {
        for r in run.trace.records.iter().filter(|r| r.t % 10 == 0) {
            let e = r.eps_s;
            let here = || format!("{} t={}", case.label, r.t);
            ensure(r.g_theta > 1.0 - e && r.g_theta <= 1.0, || format!("{}: g = {}", here(), r.g_theta))?;
            ensure((r.y_sum - 1.0).abs() <= 1e-10, || format!("{}: Σy = {}", here(), r.y_sum))?;
            let ok = match case.inst.variant {
                Variant::TypeI => r.theta < r.x_dot_f && r.x_dot_f < (1.0 + e) * r.theta,
                Variant::TypeII => (1.0 - 2.0 * e) * r.theta < r.x_dot_f && r.x_dot_f <= (1.0 - e) * r.theta,
            };
            ensure(ok, || format!("{}: X•F = {} vs θ = {}", here(), r.x_dot_f, r.theta))?;
            sampled += 1;
        }
    }
    Ok(format!("{sampled} sampled iterations inside all windows"))
}

fn criterion_7() -> Check {
    for n in [1usize, 2, 5, 10, 20] {
        for strategy in [ThetaStrategy::BinarySearch, ThetaStrategy::DirectRoot] {
            let f = SymMat::identity(n);
            let e = 0.5;
            let d = e * e * e / (32.0 * n as f64);
            let t = find_theta_with(&f, None, e, d, Variant::TypeI, 7, strategy).map_err(|e| e.to_string())?;
            ensure((t - 2.0 / 3.0).abs() <= d * 2.0 / 3.0, || format!("n={n} {strategy:?}: θ = {t}"))?;
            let e = 0.25;
            let d = e * e * e / (32.0 * n as f64);
            let t = find_theta_with(&f, None, e, d, Variant::TypeII, 7, strategy).map_err(|e| e.to_string())?;
            ensure(t >= 4.0 / 3.0 && t <= (1.0 + d) * 4.0 / 3.0, || format!("n={n} {strategy:?}: θ = {t}"))?;
        }
    }
    Ok("n in {1, 2, 5, 10, 20}, both root finders".into())
}

fn naive_power(m: &SymMat, k: u32) -> DMatrix<f64> {
    let mut p = m.as_matrix().clone();
    for _ in 1..k {
        p = &p * m.as_matrix();
    }
    p
}

fn criterion_8() -> Check {
    let mut r = rng(8);
    let e = std::f64::consts::E;
    for k in 0..100 {
        let b = random_sym(4, &mut r);
        let c = random_sym(4, &mut r);
        let lhs = exp_base(&b.add(&c), e).map_err(|x| x.to_string())?.trace();
        let rhs = exp_base(&b, e).unwrap().dot(&exp_base(&c, e).unwrap());
        ensure(lhs <= rhs + 1e-8, || format!("Golden-Thompson case {k}: {lhs} > {rhs}"))?;
    }
    for k in 0..100 {
        let n = r.random_range(1..=6);
        let b = random_psd_rank(n, r.random_range(1..=n), &mut r);
        let b = b.scale(r.random_range(0.05..=1.0) / b.lambda_max());
        let eps = [0.1, 0.5, 1.0][k % 3];
        let gap = SymMat::identity(n).add(&b.scale(eps)).sub(&exp_base(&b, 1.0 + eps).unwrap());
        ensure(gap.lambda_min() >= -1e-8, || format!("PSD dominance case {k}: λ_min = {}", gap.lambda_min()))?;
    }
    for n in 1..=6 {
        for k in 1..=8u32 {
            let m = random_psd_rank(n, n, &mut r).shift(0.2);
            let fast = matrix_power_int(&m, k);
            let slow = SymMat::from_matrix(naive_power(&m, k));
            let rel = fast.max_abs_diff(&slow) / slow.max_abs();
            ensure(rel <= 1e-7, || format!("matrix power n={n} k={k}: relative error {rel}"))?;
        }
    }
    for k in 0..100 {
        let n = r.random_range(1..=8);
        let rank = r.random_range(1..=n);
        let m = random_psd_rank(n, rank, &mut r);
        let f = ldl(&m).map_err(|e| e.to_string())?;
        let err = f.reconstruct().max_abs_diff(&m);
        ensure(err <= 1e-8 * m.max_abs().max(1.0), || format!("LDL case {k} (rank {rank}/{n}): error {err}"))?;
    }
    let mut fallbacks = 0;
    for k in 0..100u64 {
        let n = r.random_range(2..=12);
        let m = random_psd_rank(n, r.random_range(1..=n + 2), &mut r);
        let gamma = r.random_range(0.05..0.5);
        match lanczos_extreme(&m, gamma, k) {
            Ok((v, _)) => {
                let top = m.lambda_max();
                ensure(v >= (1.0 - gamma) * top, || format!("Lanczos case {k}: {v} < (1-{gamma})·{top}"))?;
            }
            Err(_) => fallbacks += 1,
        }
    }
    ensure(fallbacks <= 2, || format!("{fallbacks} Lanczos fallbacks"))?;
    Ok(format!("all five families hold, {fallbacks} Lanczos fallbacks"))
}

fn criterion_9() -> Check {
    let eps = 0.1;
    let mut r = rng(9);
    let mut worst_obj: f64 = 0.0;
    for k in 0..30 {
        let n = r.random_range(2..=6);
        let rank = r.random_range(1..n);
        let c = random_psd_rank(n, rank, &mut r);
        let m = r.random_range(1..=6);
        let mats: Vec<SymMat> = (0..m).map(|_| random_pd(n, &mut r)).collect();
        let b: Vec<f64> = (0..m).map(|_| r.random_range(0.5..2.0)).collect();
        let inst = instance(Variant::TypeI, c.clone(), b.clone(), mats.clone());
        let norm = normalize_type1(&inst, eps).map_err(|e| format!("type1 case {k}: {e}"))?;
        let run = solve_log(&norm, eps)?;
        let back = pull_back(&inst, &norm, &run.pair).map_err(|e| e.to_string())?;
        for (i, a) in mats.iter().enumerate() {
            let v = a.dot(&back.x);
            ensure(v <= b[i] * (1.0 + 1e-7), || format!("type1 case {k}: A_{i}•X = {v} > b = {}", b[i]))?;
        }
        ensure(back.x.lambda_min() >= -1e-9 * back.x.max_abs(), || format!("type1 case {k}: X not PSD"))?;
        let rec = &norm.record;
        let cd = SymMat::from_matrix(&rec.l * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(rec.d.clone())) * rec.l.transpose());
        let target = run.pair.x.trace();
        let lifted = cd.dot(&back.x);
        worst_obj = worst_obj.max((lifted - target).abs() / target.max(1.0));
        ensure((lifted - target).abs() <= 1e-7 * target.max(1.0), || {
            format!("type1 case {k}: C(δ)•X = {lifted} vs I•X′ = {target}")
        })?;
        let plain = c.dot(&back.x);
        ensure(plain >= target - eps * rec.zeta - 1e-9, || {
            format!("type1 case {k}: C•X = {plain} below I•X′ − εζ = {}", target - eps * rec.zeta)
        })?;
    }
    let mut dropped_total = 0;
    for k in 0..30 {
        let n = r.random_range(2..=6);
        let rank = r.random_range(1..n);
        let g = DMatrix::from_fn(n, rank, |_, _| r.sample::<f64, _>(StandardNormal));
        let c = SymMat::from_matrix(&g * g.transpose());
        let inside = r.random_range(1..=4);
        let outside = r.random_range(1..=3);
        let mut mats: Vec<SymMat> = (0..inside).map(|_| random_pd(rank, &mut r).congruence(&g)).collect();
        mats.extend((0..outside).map(|_| random_pd(n, &mut r)));
        let m = mats.len();
        let b: Vec<f64> = (0..m).map(|_| r.random_range(0.5..2.0)).collect();
        let inst = instance(Variant::TypeII, c, b.clone(), mats.clone());
        let norm = normalize_type2(&inst, eps, k).map_err(|e| format!("type2 case {k}: {e}"))?;
        ensure(norm.record.dropped.len() == outside as usize, || {
            format!("type2 case {k}: dropped {} of {outside} out-of-range constraints", norm.record.dropped.len())
        })?;
        dropped_total += norm.record.dropped.len();
        let run = solve_log(&norm, eps)?;
        let back = pull_back(&inst, &norm, &run.pair).map_err(|e| e.to_string())?;
        for (i, a) in mats.iter().enumerate() {
            let v = a.dot(&back.x);
            ensure(v >= b[i] * (1.0 - 1e-7), || format!("type2 case {k}: A_{i}•X = {v} < b = {}", b[i]))?;
        }
    }
    Ok(format!(
        "30 + 30 instances feasible, C(δ)•X matches I•X′ to {worst_obj:.1e}, {dropped_total} dropped constraints repaired"
    ))
}

fn random_constraint(n: usize, k: usize, ellipsoid: bool, r: &mut rand_chacha::ChaCha8Rng) -> UncertainConstraint {
    let a0 = random_psd_rank(n, n, r);
    let perturbations: Vec<SymMat> = (0..k).map(|_| random_psd_rank(n, r.random_range(1..=n), r)).collect();
    let set = if ellipsoid {
        let d = random_psd_rank(k, k + 1, r).shift(0.05);
        let delta0 = (0..k).map(|j| d.get(j, j).sqrt() + r.random_range(0.0..1.0)).collect();
        UncertaintySet::Ellipsoid { delta0, d }
    } else {
        let delta0 = (0..k).map(|_| r.random_range(0.0..1.0)).collect();
        UncertaintySet::Box { delta0, rho: r.random_range(0.1..2.0) }
    };
    UncertainConstraint { a0, perturbations, set }
}

fn criterion_10() -> Check {
    let mut r = rng(10);
    let mut margin = f64::INFINITY;
    for case in 0..50 {
        let n = r.random_range(1..=5);
        let k = r.random_range(1..=4);
        let uc = random_constraint(n, k, true, &mut r);
        let y = random_psd_rank(n, n, &mut r);
        let (star, value) = robust_worst_case(&uc, &y).map_err(|e| e.to_string())?;
        ensure(uc.set.contains(&star, 1e-10), || format!("ellipsoid case {case}: δ* outside the set"))?;
        let UncertaintySet::Ellipsoid { delta0, d } = &uc.set else { unreachable!() };
        let chol = d.as_matrix().clone().cholesky().unwrap();
        let l = chol.l();
        for _ in 0..1000 {
            let g: Vec<f64> = (0..k).map(|_| r.sample(StandardNormal)).collect();
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            let radius = r.random_range(0.0f64..1.0).powf(1.0 / k as f64);
            let u = nalgebra::DVector::from_iterator(k, g.iter().map(|v| v / norm * radius));
            let off = &l * u;
            let delta: Vec<f64> = (0..k).map(|j| delta0[j] + off[j]).collect();
            let v = uc.realize(&delta).dot(&y);
            margin = margin.min(value - v);
            ensure(v <= value + 1e-10 * value.abs().max(1.0), || {
                format!("ellipsoid case {case}: sample {v} beats closed form {value}")
            })?;
        }
    }
    for case in 0..50 {
        let n = r.random_range(1..=5);
        let k = r.random_range(1..=4);
        let uc = random_constraint(n, k, false, &mut r);
        let y = random_psd_rank(n, n, &mut r);
        let (star, value) = robust_worst_case(&uc, &y).map_err(|e| e.to_string())?;
        ensure(uc.set.contains(&star, 1e-10), || format!("box case {case}: δ* outside the set"))?;
        let UncertaintySet::Box { delta0, rho } = &uc.set else { unreachable!() };
        for j in 0..k {
            let mut delta = delta0.clone();
            delta[j] += rho;
            let v = uc.realize(&delta).dot(&y);
            ensure(v <= value + 1e-12 * value.abs().max(1.0), || {
                format!("box case {case}: coordinate {j} gives {v} > {value}")
            })?;
        }
        for _ in 0..1000 {
            let w: Vec<f64> = (0..k).map(|_| r.random_range(0.0..1.0f64)).collect();
            let total = w.iter().sum::<f64>() / (rho * r.random_range(0.0..1.0f64));
            let delta: Vec<f64> = (0..k)
                .map(|j| {
                    let step = w[j] / total;
                    if r.random_bool(0.5) { delta0[j] + step } else { (delta0[j] - step).max(0.0) }
                })
                .collect();
            ensure(uc.set.contains(&delta, 1e-12), || format!("box case {case}: sampler left the set"))?;
            let v = uc.realize(&delta).dot(&y);
            margin = margin.min(value - v);
            ensure(v <= value + 1e-12 * value.abs().max(1.0), || {
                format!("box case {case}: sample {v} beats closed form {value}")
            })?;
        }
    }
    Ok(format!("50 ellipsoid and 50 box cases, 1000 samples each, closest sample {margin:.2e} below"))
}

fn criterion_11() -> Check {
    let mut r = rng(11);
    let mut worst: f64 = 1.0;
    for k in 0..10 {
        let n = r.random_range(2..=8);
        let m = r.random_range(2..=10);
        let mats: Vec<SymMat> = (0..m).map(|_| random_pd(n, &mut r)).collect();
        let inst = NormalizedInstance::from_matrices(Variant::TypeII, mats).unwrap();
        let a = solve_log(&inst, 0.1)?.pair.dual_objective;
        let b = solve_mwu(&inst, 0.1).map_err(|e| e.to_string())?.pair.dual_objective;
        let ratio = a.max(b) / a.min(b);
        worst = worst.max(ratio);
        ensure(ratio <= 1.5, || format!("instance {k}: log {a} vs mwu {b}"))?;
    }
    Ok(format!("10 instances, largest disagreement factor {worst:.3}"))
}

type Criterion = (u32, &'static str, fn() -> Check);

fn main() {
    let checks: [Criterion; 11] = [
        (1, "eps-optimality against ground truth", criterion_1),
        (2, "feasibility certificates", criterion_2),
        (3, "optimality ratios", criterion_3),
        (4, "iteration bounds", criterion_4),
        (5, "dual sparsity", criterion_5),
        (6, "per-iteration windows", criterion_6),
        (7, "root finder analytic check", criterion_7),
        (8, "linear-algebra properties", criterion_8),
        (9, "normalization round trip", criterion_9),
        (10, "robust oracle optimality", criterion_10),
        (11, "cross-solver agreement", criterion_11),
    ];
    let mut failed = 0;
    for (id, name, check) in checks {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {why} ({secs:.1}s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
