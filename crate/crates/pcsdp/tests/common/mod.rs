#![allow(dead_code)]

use pcsdp::instance::{ConstraintFamily, PackCoverInstance, Variant};
use pcsdp::linalg::SymMat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric matrix with entries uniform in `[-1, 1]`.
pub fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> SymMat {
    SymMat::from_fn(n, |_, _| rng.random_range(-1.0..=1.0))
}

/// `G·Gᵀ/k` with `G` an `n × k` Gaussian matrix.
pub fn random_psd_rank(n: usize, k: usize, rng: &mut ChaCha8Rng) -> SymMat {
    let mut m = SymMat::zeros(n);
    for _ in 0..k {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        m.axpy(1.0 / k as f64, &SymMat::outer(&v));
    }
    m
}

/// Well-conditioned positive definite matrix with a random scale in `[0.5, 2]`.
pub fn random_pd(n: usize, rng: &mut ChaCha8Rng) -> SymMat {
    let scale = rng.random_range(0.5..2.0);
    random_psd_rank(n, n + 2, rng).shift(0.1).scale(scale)
}

pub fn random_diag(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> SymMat {
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
    SymMat::from_diag(&d)
}

pub fn instance(variant: Variant, c: SymMat, b: Vec<f64>, mats: Vec<SymMat>) -> PackCoverInstance {
    PackCoverInstance::new(variant, c, b, ConstraintFamily::Explicit(mats)).expect("valid instance")
}

/// Optimum of the two-variable LP that a diagonal instance with two
/// constraints reduces to, by enumerating the vertices of the dual polygon.
///
/// Variant I: `min y₁ + y₂` s.t. `y₁a_j + y₂b_j ≥ 1` for every diagonal
/// position `j`, `y ≥ 0`. Variant II: `max y₁ + y₂` s.t. `y₁a_j + y₂b_j ≤ 1`.
pub fn diagonal_lp_optimum(variant: Variant, a: &[f64], b: &[f64]) -> f64 {
    // lines p·y₁ + q·y₂ = r
    let mut lines: Vec<(f64, f64, f64)> = a.iter().zip(b).map(|(&p, &q)| (p, q, 1.0)).collect();
    lines.push((1.0, 0.0, 0.0));
    lines.push((0.0, 1.0, 0.0));
    let feasible = |y1: f64, y2: f64| {
        y1 >= -1e-12
            && y2 >= -1e-12
            && a.iter().zip(b).all(|(&p, &q)| match variant {
                Variant::TypeI => p * y1 + q * y2 >= 1.0 - 1e-12,
                Variant::TypeII => p * y1 + q * y2 <= 1.0 + 1e-12,
            })
    };
    let mut best = match variant {
        Variant::TypeI => f64::INFINITY,
        Variant::TypeII => f64::NEG_INFINITY,
    };
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (p1, q1, r1) = lines[i];
            let (p2, q2, r2) = lines[j];
            let det = p1 * q2 - p2 * q1;
            if det.abs() < 1e-14 {
                continue;
            }
            let y1 = (r1 * q2 - r2 * q1) / det;
            let y2 = (p1 * r2 - p2 * r1) / det;
            if feasible(y1, y2) {
                best = match variant {
                    Variant::TypeI => best.min(y1 + y2),
                    Variant::TypeII => best.max(y1 + y2),
                };
            }
        }
    }
    best
}
