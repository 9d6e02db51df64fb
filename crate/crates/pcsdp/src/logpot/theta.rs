//! The scalar root `θ*` of `g(θ) = (εθ/n)·Tr((±(F − θI))⁻¹) = 1`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::instance::Variant;
use crate::linalg::{lanczos_extreme, power_scaled, SymMat};

/// How `θ` is located.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ThetaStrategy {
    /// Extreme-eigenvalue estimate from a high matrix power, then binary
    /// search on a geometric grid of ratio `1 + δ`.
    #[default]
    BinarySearch,
    /// Safeguarded Newton iteration on the eigenvalues of `F`.
    DirectRoot,
}

/// Largest dimension for which [`ThetaStrategy::DirectRoot`] is used.
pub const DIRECT_ROOT_MAX_N: usize = 64;

/// `g(θ)` from the eigenvalues of `F`.
pub fn g_from_eigs(eigs: &[f64], theta: f64, eps: f64, variant: Variant) -> f64 {
    let n = eigs.len() as f64;
    let s: f64 = match variant {
        Variant::TypeI => eigs.iter().map(|l| 1.0 / (l - theta)).sum(),
        Variant::TypeII => eigs.iter().map(|l| 1.0 / (theta - l)).sum(),
    };
    eps * theta / n * s
}

fn dg_from_eigs(eigs: &[f64], theta: f64, eps: f64, variant: Variant) -> f64 {
    let n = eigs.len() as f64;
    let s: f64 = match variant {
        Variant::TypeI => eigs.iter().map(|l| l / ((l - theta) * (l - theta))).sum(),
        Variant::TypeII => -eigs.iter().map(|l| l / ((theta - l) * (theta - l))).sum::<f64>(),
    };
    eps / n * s
}

/// `g(θ)` through a Cholesky factorization; `None` when the shifted matrix is
/// not positive definite (θ on the wrong side of the spectrum).
pub fn g_cholesky(f: &SymMat, theta: f64, eps: f64, variant: Variant) -> Option<f64> {
    let n = f.n();
    let shifted = match variant {
        Variant::TypeI => f.shift(-theta),
        Variant::TypeII => f.scale(-1.0).shift(theta),
    };
    let chol = shifted.into_matrix().cholesky()?;
    let linv = chol.l().solve_lower_triangular(&DMatrix::identity(n, n))?;
    let tr = linv.norm_squared();
    tr.is_finite().then(|| eps * theta / n as f64 * tr)
}

/// The potential `ln θ ± (ε/n)·ln det(±(F − θI))`.
pub fn potential(eigs: &[f64], theta: f64, eps: f64, variant: Variant) -> f64 {
    let n = eigs.len() as f64;
    match variant {
        Variant::TypeI => theta.ln() + eps / n * eigs.iter().map(|l| (l - theta).ln()).sum::<f64>(),
        Variant::TypeII => theta.ln() - eps / n * eigs.iter().map(|l| (theta - l).ln()).sum::<f64>(),
    }
}

/// Brackets `θ*` by `(lo, hi)` with `hi ≤ lo·(1 + tol)`. For variant I
/// `g(lo) ≤ 1`, for variant II `g(hi) ≤ 1`.
fn newton_bracket(eigs: &[f64], eps: f64, tol: f64, variant: Variant) -> Result<(f64, f64)> {
    let n = eigs.len() as f64;
    let g = |t: f64| g_from_eigs(eigs, t, eps, variant);
    match variant {
        Variant::TypeI => {
            let l1 = eigs[0];
            if !(l1 > 0.0) {
                return Err(Error::NumericalFailure(format!("F is not positive definite (λ_min = {l1:e})")));
            }
            let mut lo = l1 / (1.0 + eps);
            let mut hi = l1 / (1.0 + eps / n);
            while g(lo) > 1.0 {
                lo *= 0.5;
            }
            while g(hi) <= 1.0 && hi < l1 {
                let next = 0.5 * (hi + l1);
                if next <= hi {
                    return Ok((hi, hi));
                }
                hi = next;
            }
            for _ in 0..300 {
                if hi <= lo * (1.0 + tol) {
                    break;
                }
                let step = hi - (g(hi) - 1.0) / dg_from_eigs(eigs, hi, eps, variant);
                let x = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
                if g(x) <= 1.0 { lo = x } else { hi = x }
                let probe = hi / (1.0 + 0.5 * tol);
                if probe > lo {
                    if g(probe) <= 1.0 { lo = probe } else { hi = probe }
                }
            }
            Ok((lo, hi))
        }
        Variant::TypeII => {
            let ln = eigs[eigs.len() - 1];
            if !(ln > 0.0) {
                return Err(Error::NumericalFailure(format!("F has no positive eigenvalue (λ_max = {ln:e})")));
            }
            let mut lo = ln / (1.0 - eps / n);
            let mut hi = ln / (1.0 - eps);
            while g(hi) > 1.0 {
                hi *= 2.0;
            }
            while g(lo) <= 1.0 && lo > ln {
                let next = 0.5 * (lo + ln);
                if next >= lo {
                    return Ok((lo, lo));
                }
                lo = next;
            }
            for _ in 0..300 {
                if hi <= lo * (1.0 + tol) {
                    break;
                }
                let step = lo - (g(lo) - 1.0) / dg_from_eigs(eigs, lo, eps, variant);
                let x = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
                if g(x) <= 1.0 { hi = x } else { lo = x }
                let probe = lo * (1.0 + 0.5 * tol);
                if probe < hi {
                    if g(probe) <= 1.0 { hi = probe } else { lo = probe }
                }
            }
            Ok((lo, hi))
        }
    }
}

/// `θ*` to roughly machine precision.
pub fn theta_star(eigs: &[f64], eps: f64, variant: Variant) -> Result<f64> {
    let (lo, hi) = newton_bracket(eigs, eps, 1e-15, variant)?;
    Ok(match variant {
        Variant::TypeI => lo,
        Variant::TypeII => hi,
    })
}

fn direct_root(eigs: &[f64], eps: f64, delta: f64, variant: Variant) -> Result<f64> {
    let (lo, hi) = newton_bracket(eigs, eps, delta, variant)?;
    Ok(match variant {
        Variant::TypeI => lo,
        Variant::TypeII => hi,
    })
}

/// Grid search after estimating the extreme eigenvalue from `F^{∓n}`.
/// `Ok(None)` signals that the estimate did not bracket the root.
fn grid_search(f: &SymMat, eps: f64, delta: f64, variant: Variant, seed: u64) -> Result<Option<f64>> {
    let n = f.n();
    let gamma = eps / 2.0;
    let base = match variant {
        Variant::TypeI => match f.as_matrix().clone().cholesky() {
            Some(c) => SymMat::from_matrix(c.inverse()),
            None => return Ok(None),
        },
        Variant::TypeII => f.clone(),
    };
    let (p, log_scale) = power_scaled(&base, n as u32);
    let rho = match lanczos_extreme(&p, gamma, seed) {
        Ok((v, _)) if v > 0.0 => v,
        Ok(_) | Err(Error::ConvergenceFailure { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let log_rho = rho.ln() + log_scale;
    let step = delta.ln_1p();
    let ok = |theta: f64| g_cholesky(f, theta, eps, variant).is_some_and(|g| g <= 1.0);
    match variant {
        Variant::TypeI => {
            // λ̃ = ((1−γ)/ρ)^{1/n} lies in [λ_min/(1+ε/n), λ_min].
            let lt = (((1.0 - gamma).ln() - log_rho) / n as f64).exp();
            let theta0 = lt / (1.0 + eps);
            let k_max = (2.0 * eps.ln_1p() / delta).ceil() as i64;
            let at = |k: i64| theta0 * (k as f64 * step).exp();
            if !ok(at(0)) || ok(at(k_max)) {
                return Ok(None);
            }
            let (mut lo, mut hi) = (0, k_max);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if ok(at(mid)) { lo = mid } else { hi = mid }
            }
            Ok(Some(at(lo)))
        }
        Variant::TypeII => {
            // λ̃ = (ρ/(1−γ))^{1/n} lies in [λ_max, λ_max/(1−ε/n)].
            let lt = ((log_rho - (1.0 - gamma).ln()) / n as f64).exp();
            let k_max = (-2.0 * (-eps).ln_1p() / delta).ceil() as i64;
            let at = |k: i64| lt * (k as f64 * step).exp();
            if ok(at(0)) {
                return Ok(Some(at(0)));
            }
            if !ok(at(k_max)) {
                return Ok(None);
            }
            let (mut lo, mut hi) = (0, k_max);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if ok(at(mid)) { hi = mid } else { lo = mid }
            }
            Ok(Some(at(hi)))
        }
    }
}

/// Locates `θ` within a factor `1 ± δ` of the root `θ*` on the safe side:
/// `(1−δ)θ* ≤ θ ≤ θ*` for variant I and `θ* ≤ θ ≤ (1+δ)θ*` for variant II.
/// The result always satisfies `g(θ) ∈ (1−ε, 1]`.
pub fn find_theta(f: &SymMat, eps: f64, delta: f64, variant: Variant, seed: u64) -> Result<f64> {
    find_theta_with(f, None, eps, delta, variant, seed, ThetaStrategy::BinarySearch)
}

/// As [`find_theta`], optionally reusing known eigenvalues of `F`.
pub fn find_theta_with(
    f: &SymMat,
    eigs: Option<&[f64]>,
    eps: f64,
    delta: f64,
    variant: Variant,
    seed: u64,
    strategy: ThetaStrategy,
) -> Result<f64> {
    let in_window = |theta: f64| {
        g_cholesky(f, theta, eps, variant).is_some_and(|g| g > 1.0 - eps && g <= 1.0)
    };
    let direct = strategy == ThetaStrategy::DirectRoot && f.n() <= DIRECT_ROOT_MAX_N;
    if !direct {
        if let Some(theta) = grid_search(f, eps, delta, variant, seed)? {
            if in_window(theta) {
                return Ok(theta);
            }
        }
    }
    let owned;
    let eigs = match eigs {
        Some(e) => e,
        None => {
            owned = f.eigenvalues();
            &owned
        }
    };
    let theta = direct_root(eigs, eps, delta, variant)?;
    let g = g_from_eigs(eigs, theta, eps, variant);
    if g > 1.0 - eps && g <= 1.0 + 1e-12 {
        Ok(theta)
    } else {
        Err(Error::NumericalFailure(format!("no θ with g(θ) in ({}, 1]; got g = {g}", 1.0 - eps)))
    }
}

/// `X = (εθ/n)·(F − θI)⁻¹` (variant I) or `(εθ/n)·(θI − F)⁻¹` (variant II).
pub fn primal_from_theta(f: &SymMat, theta: f64, eps: f64, variant: Variant) -> Result<SymMat> {
    let side = match variant {
        Variant::TypeI => crate::linalg::Side::FMinus,
        Variant::TypeII => crate::linalg::Side::MinusF,
    };
    let x = crate::linalg::shifted_inverse(f, theta, side)?.scale(eps * theta / f.n() as f64);
    let tr = x.trace();
    if !(tr > 1.0 - eps - 1e-9 && tr <= 1.0 + 1e-9) {
        return Err(Error::NumericalFailure(format!("trace of the primal is {tr}, outside ({}, 1]", 1.0 - eps)));
    }
    Ok(x)
}
