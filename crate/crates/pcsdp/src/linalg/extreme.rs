use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::SymMat;
use crate::error::{Error, Result};

/// Estimate of the top eigenpair of a PSD matrix by Lanczos iteration with
/// full reorthogonalization from a random Gaussian start.
///
/// Returns `(vᵀMv, v)` with `‖v‖ = 1`, where `v` is the top Ritz vector of a
/// Krylov space of dimension `min(n, 10·⌈max(ln n, 1)/√γ⌉)`. Stopping as soon
/// as the Ritz residual looks small is unsafe: a start vector nearly
/// orthogonal to the top eigenvector gives a converged-looking lower
/// eigenvalue. A non-finite estimate yields [`Error::ConvergenceFailure`].
pub fn lanczos_extreme(m: &SymMat, gamma: f64, seed: u64) -> Result<(f64, Vec<f64>)> {
    assert!(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    let n = m.n();
    let scale = m.max_abs();
    if scale == 0.0 {
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        return Ok((0.0, e1));
    }
    let cap = 10 * ((n as f64).ln().max(1.0) / gamma.sqrt()).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut q);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let steps = cap.min(n);
    for step in 0..steps {
        let mut w = m.mul_vec(&q);
        let a = dot(&w, &q);
        basis.push(q);
        alpha.push(a);
        // Two passes of Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = normalize(&mut w);
        if b <= 1e-12 * scale || step + 1 == steps {
            break;
        }
        beta.push(b);
        q = w;
    }
    let (_, s) = top_ritz(&alpha, &beta);
    let (rho, v) = ritz_pair(m, &basis, &s);
    if !rho.is_finite() {
        return Err(Error::ConvergenceFailure { iterations: alpha.len() });
    }
    Ok((rho, v))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest eigenpair of the tridiagonal matrix with diagonal `alpha` and
/// off-diagonal `beta`.
fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let top = eig.eigenvalues.imax();
    (eig.eigenvalues[top], eig.eigenvectors.column(top).iter().copied().collect())
}

fn ritz_pair(m: &SymMat, basis: &[Vec<f64>], s: &[f64]) -> (f64, Vec<f64>) {
    let n = m.n();
    let mut v = vec![0.0; n];
    for (b, &c) in basis.iter().zip(s) {
        v.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
    }
    normalize(&mut v);
    (m.quad_form(&v), v)
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}
