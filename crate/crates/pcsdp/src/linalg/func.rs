use super::{eig_sym, SymMat};
use crate::error::{Error, Result};

/// Which side of the spectrum a shift sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `(F − θI)⁻¹`, needs `θ` below the spectrum.
    FMinus,
    /// `(θI − F)⁻¹`, needs `θ` above the spectrum.
    MinusF,
}

const SHIFT_GAP: f64 = 1e-12;

pub fn shifted_inverse(f: &SymMat, theta: f64, side: Side) -> Result<SymMat> {
    let d = eig_sym(f)?;
    let (lo, hi) = (d.min(), d.max());
    match side {
        Side::FMinus if theta < lo - SHIFT_GAP => Ok(d.map(|l| 1.0 / (l - theta))),
        Side::MinusF if theta > hi + SHIFT_GAP => Ok(d.map(|l| 1.0 / (theta - l))),
        _ => Err(Error::ShiftInSpectrum { theta, lo, hi }),
    }
}

/// `M^k` by repeated squaring.
pub fn matrix_power_int(m: &SymMat, k: u32) -> SymMat {
    assert!(k >= 1, "matrix_power_int needs k >= 1");
    let mut result: Option<SymMat> = None;
    let mut base = m.clone();
    let mut k = k;
    loop {
        if k & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => r.sym_product(&base),
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        base = base.sym_product(&base);
    }
    result.expect("k >= 1")
}

/// `M^k` returned as `(P, s)` with `M^k = e^s · P` and `max|P| = 1`, so that
/// high powers of badly scaled matrices stay representable.
pub fn power_scaled(m: &SymMat, k: u32) -> (SymMat, f64) {
    assert!(k >= 1, "power_scaled needs k >= 1");
    fn normalize(p: SymMat, log: &mut f64) -> SymMat {
        let a = p.max_abs();
        if a > 0.0 && a.is_finite() {
            *log += a.ln();
            p.scale(1.0 / a)
        } else {
            p
        }
    }
    let mut log_base = 0.0;
    let mut base = normalize(m.clone(), &mut log_base);
    let mut acc: Option<(SymMat, f64)> = None;
    let mut k = k;
    loop {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => (base.clone(), log_base),
                Some((r, lr)) => {
                    let mut l = lr + log_base;
                    let p = normalize(r.sym_product(&base), &mut l);
                    (p, l)
                }
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        let mut l = 2.0 * log_base;
        base = normalize(base.sym_product(&base), &mut l);
        log_base = l;
    }
    acc.expect("k >= 1")
}

/// `base^M` through the spectral decomposition.
pub fn exp_base(m: &SymMat, base: f64) -> Result<SymMat> {
    assert!(base > 1.0, "exp_base needs base > 1");
    let d = eig_sym(m)?;
    let lb = base.ln();
    if d.max() * lb > f64::MAX.ln() {
        return Err(Error::Overflow(format!(
            "{base}^{} is not representable",
            d.max()
        )));
    }
    Ok(d.map(|l| (l * lb).exp()))
}
