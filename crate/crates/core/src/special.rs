//! Gamma-function evaluations used by the closed-form determinant ratios.
//!
//! Everything goes through `ln|Γ(x)|` plus a sign so that ratios of large
//! Gamma values (near the melting point the arguments grow like ε^{-1/2})
//! never overflow.

use std::f64::consts::PI;

/// Apéry's constant ζ(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln|Γ(x)|` together with the sign of Γ(x).
///
/// Returns `None` at the poles x = 0, −1, −2, …
pub fn ln_gamma_signed(x: f64) -> Option<(f64, f64)> {
    if x.is_nan() {
        return Some((f64::NAN, 1.0));
    }
    if x <= 0.0 && x == x.floor() {
        return None;
    }
    if x < 0.5 {
        // Γ(x)Γ(1−x) = π / sin(πx)
        let s = (PI * x).sin();
        let (lg, sg) = ln_gamma_signed(1.0 - x)?;
        return Some((PI.ln() - s.abs().ln() - lg, s.signum() * sg));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let lg = 0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln();
    Some((lg, 1.0))
}

/// `ln Γ(x)` for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    ln_gamma_signed(x).map(|(v, _)| v).unwrap_or(f64::INFINITY)
}

/// Γ(x); overflows to ±inf for large arguments.
pub fn gamma(x: f64) -> f64 {
    match ln_gamma_signed(x) {
        Some((lg, s)) => s * lg.exp(),
        None => f64::NAN,
    }
}

/// Distance from `x` to the nearest non-positive integer (infinite for x > 0.5).
pub fn distance_to_pole(x: f64) -> f64 {
    if x > 0.5 {
        return f64::INFINITY;
    }
    (x - x.round()).abs()
}
