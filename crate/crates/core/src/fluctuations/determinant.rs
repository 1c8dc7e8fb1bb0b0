use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{rotated_operators, DeterminantRatio, FluctuationOperator, Method};
use crate::classical::{diagonal_trajectory, Flavor, TauGrid};
use crate::error::{Error, Result};
use crate::model::EqualParams;
use crate::special::{distance_to_pole, ln_gamma_signed};

/// Regulator shifts for the primed determinant, largest first.
pub const PRIMED_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

const RESCALE_AT: f64 = 1e100;
const T_INDEPENDENCE: f64 = 1e-8;
// Ratios this small are zero modes; their finite-T value is not meaningful.
const ZERO_FLOOR: f64 = 1e-11;

fn ln_gamma_checked(x: f64, context: &str) -> Result<(f64, f64)> {
    ln_gamma_signed(x).ok_or_else(|| Error::Pole { argument: x, context: context.into() })
}

/// det𝒪/det𝒪₀ for −d²/dx² + κ² − j(j+1)sech²x.
pub fn poschl_teller_ratio(kappa: f64, j: f64) -> Result<DeterminantRatio> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("κ must be positive, got {kappa}")));
    }
    if !(j >= 0.0) || !j.is_finite() {
        return Err(Error::InvalidParameter(format!("j must be non-negative, got {j}")));
    }
    let ratio = |value| DeterminantRatio { value, primed: false, method: Method::GammaClosedForm };
    // 1/Γ vanishes at the poles: a bound state sits exactly at zero.
    let Some((lg_kmj, s_kmj)) = ln_gamma_signed(kappa - j) else {
        return Ok(ratio(0.0));
    };
    let (lg_k, _) = ln_gamma_checked(kappa, "Γ(κ)")?;
    let (lg_k1, _) = ln_gamma_checked(kappa + 1.0, "Γ(κ+1)")?;
    let (lg_kj1, _) = ln_gamma_checked(kappa + j + 1.0, "Γ(κ+j+1)")?;
    Ok(ratio(s_kmj * (lg_k + lg_k1 - lg_kmj - lg_kj1).exp()))
}

/// φ(end)/φ₀(end) for Numerov shots started at `start` with φ = 0, φ' ≈ 1.
fn shoot(op: &FluctuationOperator, shift: f64, start: usize, end: usize) -> f64 {
    let h = op.grid.h();
    let k = h * h / 12.0;
    let g0 = op.plateau - shift;
    let m = g0.sqrt();
    let coef = |g: f64| 1.0 - k * g;
    let (mut a0, mut a1) = (0.0, (m * h).sinh() / m);
    let (mut b0, mut b1) = (a0, a1);
    let free_lhs = coef(g0);
    let free_mid = 2.0 * (1.0 + 5.0 * k * g0);
    for i in start + 1..end {
        let gm = op.well[i - 1] - shift;
        let g = op.well[i] - shift;
        let gp = op.well[i + 1] - shift;
        let a2 = (2.0 * a1 * (1.0 + 5.0 * k * g) - a0 * coef(gm)) / coef(gp);
        let b2 = (free_mid * b1 - b0 * free_lhs) / free_lhs;
        a0 = a1;
        a1 = a2;
        b0 = b1;
        b1 = b2;
        if a1.abs() > RESCALE_AT || b1.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            a0 *= s;
            a1 *= s;
            b0 *= s;
            b1 *= s;
        }
    }
    a1 / b1
}

/// det(𝒪 − shift)/det(𝒪₀ − shift) by the Gelfand–Yaglom initial-value
/// method, 𝒪₀ being the free operator at the plateau.
///
/// The result is recomputed on the inner 80% of the grid; disagreement
/// beyond 1e-8 relative means the grid is too short for this operator.
pub fn gelfand_yaglom(op: &FluctuationOperator, shift: f64) -> Result<f64> {
    if !(op.plateau - shift > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "plateau − shift must be positive (plateau {}, shift {shift})",
            op.plateau
        )));
    }
    let n = op.grid.n;
    let full = shoot(op, shift, 0, n - 1);
    let trim = n / 10;
    let inner = shoot(op, shift, trim, n - 1 - trim);
    if !full.is_finite() {
        return Err(Error::NoConvergence { iterations: 0, residual: full });
    }
    if (full - inner).abs() > T_INDEPENDENCE * full.abs() + ZERO_FLOOR {
        return Err(Error::CheckFailed(format!(
            "Gelfand–Yaglom ratio depends on the half-span: {full:e} vs {inner:e}"
        )));
    }
    Ok(full)
}

/// det′𝒪/det𝒪₀ for an operator with a single zero mode.
///
/// D(ε) = det(𝒪 − ε)/det(𝒪₀ − ε) ≈ −ε·det′𝒪/det𝒪₀ near zero. A quadratic
/// through the three regulated values absorbs the small discretisation shift
/// of the zero eigenvalue and the O(ε²) curvature; minus the slope is the
/// primed ratio. The shifts are `PRIMED_EPS` in units of the plateau, so the
/// fit is invariant under rescaling τ.
pub fn primed_determinant(op: &FluctuationOperator) -> Result<DeterminantRatio> {
    let scale = op.plateau;
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!("primed determinant needs a positive plateau, got {scale}")));
    }
    let mut d = [0.0; 3];
    for (k, &e) in PRIMED_EPS.iter().enumerate() {
        d[k] = gelfand_yaglom(op, e * scale)?;
    }
    if d.iter().any(|&x| !(x < 0.0)) {
        return Err(Error::CheckFailed(format!(
            "expected exactly one soft mode: D(ε) = {d:?} should be negative"
        )));
    }
    let r: Vec<f64> = d.iter().zip(PRIMED_EPS).map(|(x, e)| -x / e).collect();
    if (r[1] - r[0]) * (r[2] - r[1]) < 0.0 {
        return Err(Error::CheckFailed(format!("−D(ε)/ε is not monotone: {r:?}")));
    }
    let v = Matrix3::from_fn(|i, j| PRIMED_EPS[i].powi(j as i32));
    let coeffs = v
        .lu()
        .solve(&Vector3::from(d))
        .ok_or_else(|| Error::Singular("regulator fit".into()))?;
    let (d1, d2) = (coeffs[1], coeffs[2]);
    if d2.abs() * PRIMED_EPS[0] > 0.5 * d1.abs() {
        return Err(Error::CheckFailed(format!(
            "regulator schedule too coarse: slope {d1:e}, curvature {d2:e}"
        )));
    }
    let value = -d1 / scale;
    if !(value > 0.0) {
        return Err(Error::CheckFailed(format!("primed ratio must be positive, got {value:e}")));
    }
    Ok(DeterminantRatio { value, primed: true, method: Method::RegulatedGY })
}

/// (κ, ℓ) of the diagonal transverse operator in x = ω₊τ/2 units.
pub fn chi_t_r_params(mu: f64) -> (f64, f64) {
    let kappa = (4.0 * (1.0 - 2.0 * mu) / (1.0 + 2.0 * mu)).sqrt();
    let ell = 0.5 * (-1.0 + (1.0 + 4.0 * (6.0 - 4.0 * mu) / (1.0 + 2.0 * mu)).sqrt());
    (kappa, ell)
}

fn ln_chi_t_r(mu: f64) -> Result<f64> {
    if !(mu > -0.5) {
        return Err(Error::OutsideWindow(format!(
            "χ_T^R needs μ > −1/2 (symmetry melts at −1/2), got {mu}"
        )));
    }
    let (kappa, ell) = chi_t_r_params(mu);
    let gap = kappa - ell;
    if gap.abs() < 1e-8 || distance_to_pole(gap) < 1e-8 {
        return Err(Error::Pole {
            argument: gap,
            context: "Γ(κ−ℓ): two transverse zero modes at μ = 0".into(),
        });
    }
    if mu > 0.0 {
        return Err(Error::OutsideWindow(format!(
            "transverse mode of the diagonal instanton is unstable for μ > 0, got {mu}"
        )));
    }
    let (a, sa) = ln_gamma_checked(gap, "Γ(κ−ℓ)")?;
    let (b, _) = ln_gamma_checked(kappa + ell + 1.0, "Γ(κ+ℓ+1)")?;
    let (c, _) = ln_gamma_checked(kappa, "Γ(κ)")?;
    let (d, _) = ln_gamma_checked(kappa + 1.0, "Γ(κ+1)")?;
    debug_assert!(sa > 0.0);
    Ok(a + b - c - d)
}

/// det𝒪₀/det𝓜_T for the diagonal instanton, −1/2 < μ < 0.
pub fn chi_t_r(mu: f64) -> Result<f64> {
    ln_chi_t_r(mu).map(f64::exp)
}

/// Transverse factor of the edge instanton, |μ| < 1/4.
pub fn chi_t_p(mu: f64) -> Result<f64> {
    edge_window(mu)?;
    Ok((-4.0 * mu).exp())
}

/// Inverse primed longitudinal ratio of the diagonal instanton, 12ω₊².
pub fn chi_l_r(eq: &EqualParams) -> Result<f64> {
    if !(eq.mu > -0.5 && eq.mu < 0.5) {
        return Err(Error::OutsideWindow(format!("ω₊ needs |μ| < 1/2, got {}", eq.mu)));
    }
    let w = eq.omega_plus();
    Ok(12.0 * w * w)
}

/// Inverse primed longitudinal ratio of the edge instanton at O(μ).
pub fn chi_l_p(mu: f64) -> Result<f64> {
    edge_window(mu)?;
    Ok(12.0)
}

fn edge_window(mu: f64) -> Result<()> {
    if mu.abs() < 0.25 {
        Ok(())
    } else {
        Err(Error::OutsideWindow(format!("edge instanton needs |μ| < 1/4, got {mu}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeltingFit {
    /// Coefficient of 1/√ε in ln χ_T.
    pub a: f64,
    pub b: f64,
}

/// Fits ln χ_T^R(−1/2 + ε) ≈ A/√ε + B by least squares.
///
/// Accepts ε in (0, 1/2). The asymptotic regime is ε ≲ 0.05; wider schedules
/// are allowed so the refinement of A can be observed.
pub fn melting_probe(eps: &[f64]) -> Result<MeltingFit> {
    if eps.len() < 2 {
        return Err(Error::InvalidParameter("melting fit needs at least two ε values".into()));
    }
    if let Some(e) = eps.iter().find(|&&e| !(e > 0.0 && e < 0.5)) {
        return Err(Error::InvalidParameter(format!("ε must lie in (0, 1/2), got {e}")));
    }
    let (mut sxx, mut sx, mut sxy, mut sy) = (0.0, 0.0, 0.0, 0.0);
    for &e in eps {
        let x = 1.0 / e.sqrt();
        let y = ln_chi_t_r(-0.5 + e)?;
        sxx += x * x;
        sx += x;
        sxy += x * y;
        sy += y;
    }
    let n = eps.len() as f64;
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-12 * sxx * n {
        return Err(Error::Singular("ε values must be distinct".into()));
    }
    let a = (n * sxy - sx * sy) / det;
    Ok(MeltingFit { a, b: (sy - a * sx) / n })
}

/// One row of the χ table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterminantRecord {
    pub mu: f64,
    pub flavor: Flavor,
    pub chi_l: f64,
    pub chi_t: f64,
    pub method: Method,
}

/// χ_L and χ_T for one instanton flavor, either from the closed forms or
/// from Gelfand–Yaglom on sampled operators.
///
/// The numeric diagonal operators come from rotating the analytic
/// trajectory; the edge operators are the first-order closed profiles, whose
/// off-diagonal blocks are dropped.
pub fn determinant_record(eq: &EqualParams, flavor: Flavor, method: Method) -> Result<DeterminantRecord> {
    let mu = eq.mu;
    let (chi_l, chi_t) = match (flavor, method) {
        (Flavor::R, Method::GammaClosedForm) => (chi_l_r(eq)?, chi_t_r(mu)?),
        (_, Method::GammaClosedForm) => (chi_l_p(mu)?, chi_t_p(mu)?),
        (Flavor::R, _) => {
            // Same window as the closed form.
            ln_chi_t_r(mu)?;
            let g = TauGrid::default_for(eq.omega_plus());
            let tr = diagonal_trajectory(eq, g.half_span, g.n)?;
            let rb = rotated_operators(&tr, &tr.params)?;
            let l = primed_determinant(&rb.longitudinal(&tr)?)?;
            let t = gelfand_yaglom(&rb.transverse(&tr)?, 0.0)?;
            (1.0 / l.value, 1.0 / t)
        }
        (_, _) => {
            edge_window(mu)?;
            let g = TauGrid::default_for(1.0);
            let l = primed_determinant(&FluctuationOperator::edge_longitudinal(g)?)?;
            let t = gelfand_yaglom(&FluctuationOperator::edge_transverse(mu, g)?, 0.0)?;
            (1.0 / l.value, 1.0 / t)
        }
    };
    Ok(DeterminantRecord { mu, flavor, chi_l, chi_t, method })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn x_grid() -> TauGrid {
        TauGrid::new(20.0, 8001).unwrap()
    }

    #[test]
    fn poschl_teller_examples() {
        assert_eq!(poschl_teller_ratio(2.0, 2.0).unwrap().value, 0.0);
        assert!(!poschl_teller_ratio(2.0, 2.0).unwrap().primed);
        assert!(rel(poschl_teller_ratio(2.0, 1.0).unwrap().value, 1.0 / 3.0) < 1e-14);
        assert!(rel(poschl_teller_ratio(1.7, 0.0).unwrap().value, 1.0) < 1e-14);
        assert!(poschl_teller_ratio(0.0, 1.0).is_err());
        assert!(poschl_teller_ratio(-1.0, 1.0).is_err());
        // A bound state below zero flips the sign.
        let v = poschl_teller_ratio(1.5, 2.0).unwrap().value;
        let want = gamma(1.5) * gamma(2.5) / (gamma(-0.5) * gamma(4.5));
        assert!(rel(v, want) < 1e-12 && v < 0.0);
    }

    #[test]
    fn gy_free_and_closed_form() {
        let g = x_grid();
        assert!(rel(gelfand_yaglom(&FluctuationOperator::free(2.3, g).unwrap(), 0.0).unwrap(), 1.0) < 1e-14);
        let op = FluctuationOperator::poschl_teller(3.0, 1.0, g).unwrap();
        assert!(rel(gelfand_yaglom(&op, 0.0).unwrap(), 0.5) < 1e-7);
        let op = FluctuationOperator::poschl_teller(2.0, 1.0, g).unwrap();
        assert!(rel(gelfand_yaglom(&op, 0.0).unwrap(), 1.0 / 3.0) < 1e-7);
    }

    #[test]
    fn gy_random_poschl_teller() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = x_grid();
        for _ in 0..20 {
            let kappa = rng.gen_range(0.5..4.0);
            let j = rng.gen_range(0.0..kappa - 0.3);
            let op = FluctuationOperator::poschl_teller(kappa, j, g).unwrap();
            let gy = gelfand_yaglom(&op, 0.0).unwrap();
            let pt = poschl_teller_ratio(kappa, j).unwrap().value;
            assert!(rel(gy, pt) < 1e-6, "κ={kappa} j={j}: {gy} vs {pt}");
        }
    }

    #[test]
    fn gy_sees_zero_mode_and_short_grids() {
        let op = FluctuationOperator::poschl_teller(2.0, 2.0, x_grid()).unwrap();
        assert!(gelfand_yaglom(&op, 0.0).unwrap().abs() < 1e-6);
        assert!(gelfand_yaglom(&op, 4.0).is_err());
        let short = FluctuationOperator::poschl_teller(2.0, 1.0, TauGrid::new(4.0, 801).unwrap()).unwrap();
        assert!(gelfand_yaglom(&short, 0.0).is_err());
    }

    #[test]
    fn kink_primed_ratio() {
        let op = FluctuationOperator::poschl_teller(2.0, 2.0, x_grid()).unwrap();
        let r = primed_determinant(&op).unwrap();
        assert!(r.primed);
        assert!(rel(r.value, 1.0 / 48.0) < 1e-4, "{}", r.value);
    }

    #[test]
    fn primed_rejects_double_zero_mode() {
        // Diagonal transverse operator at μ = 0 has the same zero mode as M_L.
        let eq = EqualParams::new(1.0, 0.0).unwrap();
        let g = TauGrid::default_for(1.0);
        let ml = FluctuationOperator::diagonal_longitudinal(&eq, g).unwrap();
        assert!(primed_determinant(&ml).is_ok());
        let free = FluctuationOperator::free(1.0, g).unwrap();
        assert!(primed_determinant(&free).is_err());
        let deeper = FluctuationOperator::poschl_teller(2.0, 3.0, x_grid()).unwrap();
        assert!(primed_determinant(&deeper).is_err());
    }

    #[test]
    fn chi_t_r_examples() {
        assert!(matches!(chi_t_r(0.0), Err(Error::Pole { .. })));
        assert!(chi_t_r(0.1).unwrap_err().is_domain());
        assert!(chi_t_r(-0.5).is_err());
        assert!(rel(chi_t_r(-0.2).unwrap(), 302.548) < 1e-5);
        let near = -1e-5;
        assert!((chi_t_r(near).unwrap() * near + 15.0).abs() < 1e-2);
        let v = chi_t_r(-0.45).unwrap();
        assert!(v.is_finite() && v > chi_t_r(-0.4).unwrap());
    }

    #[test]
    fn chi_t_r_matches_gy() {
        for mu in [-0.1, -0.2, -0.3] {
            let eq = EqualParams::new(1.0, mu).unwrap();
            let rec = determinant_record(&eq, Flavor::R, Method::GelfandYaglom).unwrap();
            assert!(rel(rec.chi_t, chi_t_r(mu).unwrap()) < 1e-4, "μ={mu}");
            assert!(rel(rec.chi_l, chi_l_r(&eq).unwrap()) < 1e-4, "μ={mu}: {}", rec.chi_l);
        }
    }

    #[test]
    fn edge_chis() {
        assert_eq!(chi_t_p(0.0).unwrap(), 1.0);
        assert!((chi_t_p(0.1).unwrap() - 0.670320).abs() < 1e-6);
        assert!(chi_t_p(0.3).is_err());
        let eq = EqualParams::new(1.0, 0.05).unwrap();
        let rec = determinant_record(&eq, Flavor::P, Method::GelfandYaglom).unwrap();
        assert!((rec.chi_t - chi_t_p(0.05).unwrap()).abs() < 5e-3, "{}", rec.chi_t);
        assert!(rel(rec.chi_l, 12.0) < 1e-4);
    }

    #[test]
    fn melting() {
        let four_ln2 = 4.0 * std::f64::consts::LN_2;
        let fit = melting_probe(&[1e-2, 4e-3, 1e-3]).unwrap();
        assert!(rel(fit.a, four_ln2) < 0.05, "{}", fit.a);
        let fine = melting_probe(&[1e-3, 1e-4]).unwrap().a;
        let coarse = melting_probe(&[1e-1, 1e-2]).unwrap().a;
        assert!((fine - four_ln2).abs() < (coarse - four_ln2).abs());
        assert!(melting_probe(&[1e-2]).is_err());
        assert!(melting_probe(&[1e-2, 0.0]).is_err());
    }

    #[test]
    fn record_round_trips_json() {
        let eq = EqualParams::new(1.0, -0.2).unwrap();
        let rec = determinant_record(&eq, Flavor::R, Method::GammaClosedForm).unwrap();
        let s = serde_json::to_string(&rec).unwrap();
        assert!(s.contains("\"chi_l\"") && s.contains("GammaClosedForm"));
        let back: DeterminantRecord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rec);
    }
}
