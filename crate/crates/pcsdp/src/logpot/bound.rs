use crate::instance::Variant;

/// Number of halvings after phase 0 covered by the bound for accuracy `eps`.
pub fn phase_count(eps: f64) -> u32 {
    (1.0 / eps).log2().ceil().max(0.0) as u32
}

/// Working accuracy of phase `s`.
pub fn phase_eps(variant: Variant, s: u32) -> f64 {
    let e0 = match variant {
        Variant::TypeI => 0.5,
        Variant::TypeII => 0.25,
    };
    e0 * 0.5f64.powi(s as i32)
}

/// Worst-case iteration count summed over phases `0..=⌈log₂(1/ε)⌉`.
///
/// Variant I: `480n·ln(2ψ)` for phase 0 plus `600n/ε_s²` per later phase.
/// Variant II: `1920n·ln(9ψ/8) + ln(4/3)` plus `1400n/ε_s²`.
/// An infinite `ψ` saturates at `u64::MAX`.
pub fn iteration_bound(n: usize, psi: f64, eps: f64, variant: Variant) -> u64 {
    if !psi.is_finite() {
        return u64::MAX;
    }
    let nf = n as f64;
    let (head, per) = match variant {
        Variant::TypeI => (480.0 * nf * (2.0 * psi).ln(), 600.0),
        Variant::TypeII => (1920.0 * nf * (9.0 * psi / 8.0).ln() + (4.0f64 / 3.0).ln(), 1400.0),
    };
    let tail: f64 = (1..=phase_count(eps))
        .map(|s| {
            let e = phase_eps(variant, s);
            per * nf / (e * e)
        })
        .sum();
    let total = (head + tail).ceil();
    if total >= u64::MAX as f64 {
        u64::MAX
    } else {
        total.max(0.0) as u64
    }
}
