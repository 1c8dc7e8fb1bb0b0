//! A one-dimensional diatomic molecule in a double well, mapped onto the
//! four-well model.
//!
//! Two atoms of mass m/2 each sit in U(z) = mω²(z²−a²)²/(16a²). With centre
//! of mass y and separation x, a bond term mΩ²(x²−L²)²/(32L²) gives
//!
//! U_T(x, y) = U(y + x/2) + U(y − x/2) + mΩ²(x²−L²)²/(32L²),
//!
//! which is exactly a coupled quartic in (y², x²). Units with ħ = 1.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::model::{potential, validate_params, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoleculeParams {
    /// Total mass.
    pub m: f64,
    /// Well frequency.
    pub omega: f64,
    /// Bond stiffness frequency.
    #[serde(rename = "Omega")]
    pub big_omega: f64,
    /// Well half-separation.
    pub a: f64,
    /// Bond length.
    #[serde(rename = "L")]
    pub l: f64,
}

impl MoleculeParams {
    pub fn new(m: f64, omega: f64, big_omega: f64, a: f64, l: f64) -> Result<Self> {
        for (name, v) in [("m", m), ("omega", omega), ("Omega", big_omega), ("a", a), ("L", l)] {
            ensure_finite(name, v)?;
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if l >= 2.0 * a / 3f64.sqrt() {
            return Err(Error::InvalidParameter(format!(
                "L = {l} is not below 2a/sqrt(3) = {}: the centre-of-mass potential is a pure quartic with a single minimum",
                2.0 * a / 3f64.sqrt()
            )));
        }
        Ok(Self { m, omega, big_omega, a, l })
    }

    /// Checks the invariants after deserialisation.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.m, self.omega, self.big_omega, self.a, self.l)
    }

    pub fn well(&self, z: f64) -> f64 {
        let s = z * z - self.a * self.a;
        self.m * self.omega * self.omega / (16.0 * self.a * self.a) * s * s
    }

    /// U_T at separation x and centre of mass y.
    pub fn total_potential(&self, x: f64, y: f64) -> f64 {
        let b = x * x - self.l * self.l;
        self.well(y + 0.5 * x)
            + self.well(y - 0.5 * x)
            + self.m * self.big_omega * self.big_omega / (32.0 * self.l * self.l) * b * b
    }

    /// (∂U_T/∂x, ∂U_T/∂y).
    pub fn total_gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let du = |z: f64| self.m * self.omega * self.omega / (4.0 * self.a * self.a) * z * (z * z - self.a * self.a);
        let (up, um) = (du(y + 0.5 * x), du(y - 0.5 * x));
        let bond = self.m * self.big_omega * self.big_omega / (8.0 * self.l * self.l) * x * (x * x - self.l * self.l);
        (0.5 * (up - um) + bond, up + um)
    }
}

/// Rigid rod: returns (y₀, K) with Ū(y) = mω²(y²−y₀²)²/(8a²) + K.
pub fn rigid_effective_potential(m: f64, omega: f64, a: f64, l: f64) -> Result<(f64, f64)> {
    for (name, v) in [("m", m), ("omega", omega), ("a", a), ("L", l)] {
        ensure_finite(name, v)?;
        if v < 0.0 || (v == 0.0 && name != "L") {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    let f2 = 1.0 - 0.75 * l * l / (a * a);
    if f2 <= 0.0 {
        return Err(Error::OutsideWindow(format!(
            "L = {l} reaches 2a/sqrt(3): pure quartic with a single minimum, no instanton"
        )));
    }
    let k = m * omega * omega * l * l / 8.0 * (1.0 - l * l / (2.0 * a * a));
    Ok((a * f2.sqrt(), k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveQuartic {
    pub x0: f64,
    pub y0: f64,
    pub omega_tilde: f64,
    /// U_T at the minima. Carried along, never used in dynamics.
    pub c_offset: f64,
    pub system: SystemParams,
    pub molecule: MoleculeParams,
}

/// Minima and quartic coefficients of U_T; p is the centre of mass in units
/// of y₀, q the separation in units of x₀.
pub fn nonrigid_effective_potential(mol: MoleculeParams) -> Result<EffectiveQuartic> {
    let mol = mol.validated()?;
    let MoleculeParams { m, omega, big_omega, a, l } = mol;
    let r = omega * omega / (big_omega * big_omega);
    let (l2, a2) = (l * l, a * a);
    let den = 1.0 - 2.0 * r * l2 / a2;
    if den <= 0.0 {
        return Err(Error::OutsideWindow(format!("1 − 2ω²L²/(Ω²a²) = {den} must be positive")));
    }
    let x0_num = 1.0 - 2.0 * r;
    if x0_num <= 0.0 {
        return Err(Error::OutsideWindow(format!(
            "x0² numerator 1 − 2ω²/Ω² = {x0_num} must be positive: no relative-coordinate well"
        )));
    }
    let y0_num = 1.0 - 0.75 * l2 / a2 - 0.5 * r * l2 / a2;
    if y0_num <= 0.0 {
        return Err(Error::OutsideWindow(format!(
            "y0² numerator 1 − 3L²/(4a²) − ω²L²/(2a²Ω²) = {y0_num} must be positive"
        )));
    }
    let x02 = x0_num / den * l2;
    let y02 = y0_num / den * a2;
    let omega_tilde2 = big_omega * big_omega * (1.0 + 0.25 * r * l2 / a2);
    let c_offset = m * omega * omega * l2 / 8.0 * (1.0 - r - 0.5 * l2 / a2) / den;

    let w2 = omega * omega;
    let system = SystemParams::new(
        m * y02,
        m * w2 * y02 * y02 / a2,
        0.25 * m * x02,
        m * omega_tilde2 * x02 * x02 / (4.0 * l2),
        0.75 * m * w2 * x02 * y02 / a2,
    )?;
    if (system.mu() - system.nu()).abs() > 1e-12 * system.mu().abs() {
        log::warn!(
            "induced couplings differ (μ = {}, ν = {}): the equal-parameter fast path does not apply",
            system.mu(),
            system.nu()
        );
    }
    Ok(EffectiveQuartic { x0: x02.sqrt(), y0: y02.sqrt(), omega_tilde: omega_tilde2.sqrt(), c_offset, system, molecule: mol })
}

const ROUND_TRIP_TOL: f64 = 1e-10;

/// The induced model parameters, after checking that V(p, q) reproduces
/// U_T(x₀q, y₀p) − C on a 50×50 grid over |p|, |q| ≤ 1.5.
pub fn to_system_params(eq: &EffectiveQuartic) -> Result<SystemParams> {
    let report = validate_params(&eq.system)?;
    if !report.four_well {
        log::warn!("induced parameters are not four-well: violated {:?}", report.violated);
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..50 {
        for j in 0..50 {
            let p = -1.5 + 3.0 * i as f64 / 49.0;
            let q = -1.5 + 3.0 * j as f64 / 49.0;
            let want = eq.molecule.total_potential(eq.x0 * q, eq.y0 * p) - eq.c_offset;
            worst = worst.max((potential(&eq.system, p, q) - want).abs());
            scale = scale.max(want.abs());
        }
    }
    if worst > ROUND_TRIP_TOL * scale {
        return Err(Error::CheckFailed(format!("mapped potential misses U_T by {worst:e} (scale {scale:e})")));
    }
    Ok(eq.system)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mol(big_omega: f64) -> MoleculeParams {
        MoleculeParams::new(1.0, 1.0, big_omega, 1.0, 1.0).unwrap()
    }

    #[test]
    fn rigid_examples() {
        let (y0, k) = rigid_effective_potential(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((y0 - 0.5).abs() < 1e-15 && (k - 0.0625).abs() < 1e-15);
        let (y0, k) = rigid_effective_potential(2.0, 1.5, 1.2, 0.0).unwrap();
        assert_eq!((y0, k), (1.2, 0.0));
        let e = rigid_effective_potential(1.0, 1.0, 1.0, 2.0 / 3f64.sqrt()).unwrap_err();
        assert!(e.to_string().contains("pure quartic"));
        assert!(MoleculeParams::new(1.0, 1.0, 10.0, 1.0, 1.2).is_err());
    }

    #[test]
    fn rigid_potential_is_shifted_quartic() {
        let (m, w, a, l) = (1.3, 0.7, 1.1, 0.6);
        let (y0, k) = rigid_effective_potential(m, w, a, l).unwrap();
        let mol = MoleculeParams::new(m, w, 1.0, a, l).unwrap();
        for y in [-1.4, -0.3, 0.0, 0.8, 2.1] {
            let ubar = mol.well(y + 0.5 * l) + mol.well(y - 0.5 * l);
            let s = y * y - y0 * y0;
            let want = m * w * w / (8.0 * a * a) * s * s + k;
            assert!((ubar - want).abs() < 1e-13 * want.abs().max(1.0));
        }
    }

    #[test]
    fn minima_are_stationary() {
        for big_omega in [3.0, 10.0, 100.0] {
            let e = nonrigid_effective_potential(mol(big_omega)).unwrap();
            for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
                let (gx, gy) = e.molecule.total_gradient(sx * e.x0, sy * e.y0);
                assert!(gx.abs() < 1e-9 && gy.abs() < 1e-9, "{gx} {gy}");
            }
            let c = e.molecule.total_potential(e.x0, e.y0);
            assert!((c - e.c_offset).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_difference_quotient() {
        let m = MoleculeParams::new(1.3, 0.9, 7.0, 1.1, 0.8).unwrap();
        let h = 1e-6;
        for (x, y) in [(0.3, 1.7), (-0.9, 0.2), (1.1, -0.5)] {
            let (gx, gy) = m.total_gradient(x, y);
            let fx = (m.total_potential(x + h, y) - m.total_potential(x - h, y)) / (2.0 * h);
            let fy = (m.total_potential(x, y + h) - m.total_potential(x, y - h)) / (2.0 * h);
            assert!((gx - fx).abs() < 1e-7 && (gy - fy).abs() < 1e-7);
        }
    }

    #[test]
    fn minimum_agrees_with_direct_minimisation() {
        let e = nonrigid_effective_potential(mol(10.0)).unwrap();
        // Gradient descent with exact line search replaced by a fixed small step.
        let (mut x, mut y) = (0.9, 0.6);
        for _ in 0..200_000 {
            let (gx, gy) = e.molecule.total_gradient(x, y);
            x -= 0.01 * gx;
            y -= 0.5 * gy;
        }
        assert!((x - e.x0).abs() < 1e-9 && (y - e.y0).abs() < 1e-9, "{x} {y} {} {}", e.x0, e.y0);
    }

    #[test]
    fn round_trip_and_regime() {
        let e = nonrigid_effective_potential(mol(10.0)).unwrap();
        let s = to_system_params(&e).unwrap();
        assert!(validate_params(&s).unwrap().four_well);
        assert!(s.c > 0.0);
        assert!((s.mu() - s.nu()).abs() > 1e-3);
    }

    #[test]
    fn rigid_limit_rate() {
        // L = a makes x₀ = L exactly, so use a shorter bond.
        let (y_rigid, _) = rigid_effective_potential(1.0, 1.0, 1.0, 0.8).unwrap();
        let errs: Vec<(f64, f64)> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&w| {
                let e = nonrigid_effective_potential(MoleculeParams { l: 0.8, ..mol(w) }).unwrap();
                ((e.x0 - 0.8).abs(), (e.y0 - y_rigid).abs())
            })
            .collect();
        for k in 0..2 {
            let rx = errs[k].0 / errs[k + 1].0;
            let ry = errs[k].1 / errs[k + 1].1;
            assert!((rx - 4.0).abs() < 0.1 && (ry - 4.0).abs() < 0.1, "{rx} {ry}");
        }
    }

    #[test]
    fn domain_errors_name_the_expression() {
        let e = nonrigid_effective_potential(MoleculeParams { big_omega: 1.2, l: 0.5, ..mol(1.0) }).unwrap_err();
        assert!(e.to_string().contains("1 − 2ω²/Ω²"), "{e}");
        let bad = MoleculeParams { l: 0.0, ..mol(10.0) };
        assert!(nonrigid_effective_potential(bad).is_err());
    }
}
