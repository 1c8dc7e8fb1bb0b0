//! The coupled quartic four-well potential and its parameter regime.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// The five dimensionless constants of the model.
///
/// Derived couplings (`omega_p`, `mu`, ...) are methods, so they can never
/// drift out of sync with the base constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct SystemParams {
    pub a_p: f64,
    pub b_p: f64,
    pub a_q: f64,
    pub b_q: f64,
    pub c: f64,
}

#[derive(Deserialize)]
struct RawParams {
    a_p: f64,
    b_p: f64,
    a_q: f64,
    b_q: f64,
    c: f64,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        SystemParams::new(r.a_p, r.b_p, r.a_q, r.b_q, r.c)
    }
}

impl SystemParams {
    pub fn new(a_p: f64, b_p: f64, a_q: f64, b_q: f64, c: f64) -> Result<Self> {
        for (name, v) in [("a_p", a_p), ("b_p", b_p), ("a_q", a_q), ("b_q", b_q), ("c", c)] {
            ensure_finite(name, v)?;
        }
        for (name, v) in [("a_p", a_p), ("b_p", b_p), ("a_q", a_q), ("b_q", b_q)] {
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { a_p, b_p, a_q, b_q, c })
    }

    /// Scale raw physical constants into the dimensionless model.
    ///
    /// `c_pq` multiplies `(x²−x_p²)(y²−y_q²)` in the dimensionful potential.
    #[allow(clippy::too_many_arguments)]
    pub fn from_physical(
        m_p: f64,
        m_q: f64,
        omega_p: f64,
        omega_q: f64,
        x_p: f64,
        y_q: f64,
        c_pq: f64,
        hbar: f64,
    ) -> Result<Self> {
        for (name, v) in [("m_p", m_p), ("m_q", m_q), ("x_p", x_p), ("y_q", y_q), ("hbar", hbar)] {
            ensure_finite(name, v)?;
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        let a_p = m_p * x_p * x_p / hbar;
        let a_q = m_q * y_q * y_q / hbar;
        Self::new(
            a_p,
            a_p * omega_p * omega_p,
            a_q,
            a_q * omega_q * omega_q,
            4.0 * c_pq * x_p * x_p * y_q * y_q / hbar,
        )
    }

    /// Parameters of the equal-mass, equal-frequency model with ω_p = ω_q = 1.
    pub fn from_equal(eq: EqualParams) -> Self {
        Self {
            a_p: eq.lambda,
            b_p: eq.lambda,
            a_q: eq.lambda,
            b_q: eq.lambda,
            c: 2.0 * eq.mu * eq.lambda,
        }
    }

    pub fn omega_p(&self) -> f64 {
        (self.b_p / self.a_p).sqrt()
    }

    pub fn omega_q(&self) -> f64 {
        (self.b_q / self.a_q).sqrt()
    }

    pub fn mu(&self) -> f64 {
        self.c / (2.0 * self.b_p)
    }

    pub fn nu(&self) -> f64 {
        self.c / (2.0 * self.b_q)
    }

    /// Δ = b_p b_q − c².
    pub fn discriminant(&self) -> f64 {
        self.b_p * self.b_q - self.c * self.c
    }
}

/// Equal-parameter model: a = b = λ for both fields, c = 2μλ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualParams {
    pub lambda: f64,
    pub mu: f64,
}

impl EqualParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        ensure_finite("lambda", lambda)?;
        ensure_finite("mu", mu)?;
        if lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { lambda, mu })
    }

    /// Recover (λ, μ) from a general parameter set, requiring the equal case.
    pub fn from_system(p: &SystemParams) -> Result<Self> {
        let tol = 1e-12;
        let close = |x: f64, y: f64| (x - y).abs() <= tol * x.abs().max(y.abs());
        if !close(p.a_p, p.a_q) || !close(p.b_p, p.b_q) {
            return Err(Error::InvalidParameter(format!(
                "not an equal-parameter system (a_p={}, a_q={}, b_p={}, b_q={})",
                p.a_p, p.a_q, p.b_p, p.b_q
            )));
        }
        // After rescaling τ → ωτ the effective large parameter is sqrt(a b).
        Self::new((p.a_p * p.b_p).sqrt(), p.mu())
    }

    pub fn system(&self) -> SystemParams {
        SystemParams::from_equal(*self)
    }

    /// ω₊ = sqrt(1+2μ), the in-phase normal mode.
    pub fn omega_plus(&self) -> f64 {
        (1.0 + 2.0 * self.mu).max(0.0).sqrt()
    }

    /// ω₋ = sqrt(1−2μ), the out-of-phase normal mode.
    pub fn omega_minus(&self) -> f64 {
        (1.0 - 2.0 * self.mu).max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub four_well: bool,
    /// Set when every failed inequality fails only by equality.
    pub marginal: bool,
    pub violated: Vec<String>,
}

/// Check the strict inequalities b_p b_q > c², b_p + c > 0, b_q + c > 0.
pub fn validate_params(p: &SystemParams) -> Result<ValidityReport> {
    for (name, v) in [("a_p", p.a_p), ("b_p", p.b_p), ("a_q", p.a_q), ("b_q", p.b_q), ("c", p.c)] {
        ensure_finite(name, v)?;
    }
    let checks = [
        ("discriminant", p.discriminant()),
        ("b_p+c", p.b_p + p.c),
        ("b_q+c", p.b_q + p.c),
    ];
    let violated: Vec<String> =
        checks.iter().filter(|(_, v)| *v <= 0.0).map(|(n, _)| n.to_string()).collect();
    let marginal = !violated.is_empty() && checks.iter().all(|(_, v)| *v >= 0.0);
    Ok(ValidityReport { four_well: violated.is_empty(), marginal, violated })
}

fn require_four_well(p: &SystemParams) -> Result<()> {
    let r = validate_params(p)?;
    if r.four_well {
        Ok(())
    } else {
        Err(Error::NotFourWell { violated: r.violated })
    }
}

pub fn potential(p: &SystemParams, x: f64, y: f64) -> f64 {
    let pp = x * x - 1.0;
    let qq = y * y - 1.0;
    0.125 * p.b_p * pp * pp + 0.125 * p.b_q * qq * qq + 0.25 * p.c * pp * qq
}

/// (∂V/∂p, ∂V/∂q).
pub fn gradient(p: &SystemParams, x: f64, y: f64) -> (f64, f64) {
    let pp = x * x - 1.0;
    let qq = y * y - 1.0;
    (
        0.5 * x * (p.b_p * pp + p.c * qq),
        0.5 * y * (p.b_q * qq + p.c * pp),
    )
}

pub fn hessian(p: &SystemParams, x: f64, y: f64) -> Matrix2<f64> {
    let pp = x * x - 1.0;
    let qq = y * y - 1.0;
    let vpp = 0.5 * p.b_p * (3.0 * x * x - 1.0) + 0.5 * p.c * qq;
    let vqq = 0.5 * p.b_q * (3.0 * y * y - 1.0) + 0.5 * p.c * pp;
    let vpq = p.c * x * y;
    Matrix2::new(vpp, vpq, vpq, vqq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    Minimum,
    Saddle,
    LocalMaximum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: (f64, f64),
    pub kind: CriticalKind,
    pub value: f64,
}

fn kind_from_hessian(h: &Matrix2<f64>) -> CriticalKind {
    let det = h.determinant();
    if det < 0.0 {
        CriticalKind::Saddle
    } else if h.trace() > 0.0 {
        CriticalKind::Minimum
    } else {
        CriticalKind::LocalMaximum
    }
}

/// The nine critical points, in closed form.
pub fn classify_critical_points(p: &SystemParams) -> Result<Vec<CriticalPoint>> {
    require_four_well(p)?;
    let q_m = (1.0 + p.c / p.b_q).sqrt();
    let p_m = (1.0 + p.c / p.b_p).sqrt();
    let mut locs = vec![(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
    locs.extend([(0.0, q_m), (0.0, -q_m), (p_m, 0.0), (-p_m, 0.0), (0.0, 0.0)]);
    Ok(locs
        .into_iter()
        .map(|(x, y)| CriticalPoint {
            location: (x, y),
            kind: kind_from_hessian(&hessian(p, x, y)),
            value: potential(p, x, y),
        })
        .collect())
}

/// Normal-mode frequencies (ω₊, ω₋) of the harmonic well at (1, 1).
///
/// ω₊ is the in-phase mode: it tends to sqrt(1+2μ) in the equal case and to
/// max(ω_p, ω_q) when the coupling vanishes.
pub fn harmonic_frequencies(p: &SystemParams) -> Result<(f64, f64)> {
    require_four_well(p)?;
    let (wp2, wq2) = (p.b_p / p.a_p, p.b_q / p.a_q);
    let radicand = (wp2 - wq2).powi(2) + 16.0 * p.mu() * p.nu() * wp2 * wq2;
    if radicand < 0.0 {
        return Err(Error::InvalidParameter(format!("negative frequency radicand {radicand}")));
    }
    let mean = 0.5 * (wp2 + wq2);
    let half = 0.5 * radicand.sqrt();
    let (plus2, minus2) = if p.c >= 0.0 { (mean + half, mean - half) } else { (mean - half, mean + half) };
    if plus2 <= 0.0 || minus2 <= 0.0 {
        return Err(Error::NotFourWell { violated: vec!["harmonic stability".into()] });
    }
    Ok((plus2.sqrt(), minus2.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> SystemParams {
        SystemParams::new(1.0, 2.0, 1.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn validity_examples() {
        assert!(validate_params(&fig1()).unwrap().four_well);
        let dec = SystemParams::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(validate_params(&dec).unwrap().four_well);
        let bad = SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.5).unwrap();
        let r = validate_params(&bad).unwrap();
        assert!(!r.four_well);
        assert_eq!(r.violated, vec!["discriminant".to_string()]);
        assert!(!r.marginal);
    }

    #[test]
    fn marginal_boundary() {
        let m = SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let r = validate_params(&m).unwrap();
        assert!(!r.four_well && r.marginal);
    }

    #[test]
    fn rejects_nonpositive_and_nonfinite() {
        assert!(SystemParams::new(0.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, f64::NAN, 1.0, 1.0, 0.0).is_err());
        assert!(serde_json::from_str::<SystemParams>(r#"{"a_p":1,"b_p":-1,"a_q":1,"b_q":1,"c":0}"#).is_err());
    }

    #[test]
    fn potential_examples() {
        assert_eq!(potential(&fig1(), 1.0, -1.0), 0.0);
        assert!((potential(&fig1(), 0.0, 0.0) - 0.5).abs() < 1e-15);
        let dec = SystemParams::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert!((potential(&dec, 0.0, 1.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn hessian_determinants() {
        // Direct differentiation gives det H(A) = Δ and det H(0, q_m) =
        // −(1 + c/b_q)Δ/2; only the signs carry over to the classification.
        let p = fig1();
        let delta = p.discriminant();
        assert!((hessian(&p, 1.0, 1.0).determinant() - delta).abs() < 1e-12);
        let qm = (1.0 + p.c / p.b_q).sqrt();
        let d = hessian(&p, 0.0, qm).determinant();
        assert!((d + 0.5 * (1.0 + p.c / p.b_q) * delta).abs() < 1e-12);
        let dec = SystemParams::new(1.0, 2.0, 1.0, 3.0, 0.0).unwrap();
        let h = hessian(&dec, 0.0, 0.0);
        assert_eq!(h, Matrix2::new(-1.0, 0.0, 0.0, -1.5));
    }

    #[test]
    fn critical_points_fig1() {
        let p = fig1();
        let cps = classify_critical_points(&p).unwrap();
        assert_eq!(cps.len(), 9);
        assert_eq!(cps.iter().filter(|c| c.kind == CriticalKind::Minimum).count(), 4);
        assert_eq!(cps.iter().filter(|c| c.kind == CriticalKind::Saddle).count(), 4);
        assert_eq!(cps.iter().filter(|c| c.kind == CriticalKind::LocalMaximum).count(), 1);
        let s = cps.iter().find(|c| c.location.0 == 0.0 && c.location.1 > 0.0).unwrap();
        assert!((s.location.1 * s.location.1 - 1.5).abs() < 1e-14);
        assert!((s.value - 1.75 / 8.0).abs() < 1e-14);
        for c in &cps {
            let (gx, gy) = gradient(&p, c.location.0, c.location.1);
            assert!(gx.abs() < 1e-14 && gy.abs() < 1e-14);
        }
    }

    #[test]
    fn critical_points_decoupled_and_attractive() {
        let p = SystemParams::new(1.0, 2.0, 1.0, 3.0, 0.0).unwrap();
        let cps = classify_critical_points(&p).unwrap();
        let v = |x: f64, y: f64| cps.iter().find(|c| c.location == (x, y)).unwrap().value;
        assert!((v(0.0, 1.0) - 2.0 / 8.0).abs() < 1e-15);
        assert!((v(1.0, 0.0) - 3.0 / 8.0).abs() < 1e-15);
        let att = SystemParams::new(1.0, 1.0, 1.0, 1.0, -0.4).unwrap();
        let cps = classify_critical_points(&att).unwrap();
        assert_eq!(cps.len(), 9);
        assert!(cps.iter().filter(|c| c.kind == CriticalKind::Minimum).all(|c| c.value == 0.0));
        assert!(classify_critical_points(&SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.5).unwrap()).is_err());
    }

    #[test]
    fn frequencies() {
        let eq = EqualParams::new(3.0, -0.2).unwrap();
        let (wp, wm) = harmonic_frequencies(&eq.system()).unwrap();
        assert!((wp - 0.774597).abs() < 1e-6 && (wm - 1.183216).abs() < 1e-6);
        assert!((wp - eq.omega_plus()).abs() < 1e-14);
        let eq = EqualParams::new(1.0, 0.2).unwrap();
        let (wp, wm) = harmonic_frequencies(&eq.system()).unwrap();
        assert!((wp - 1.4_f64.sqrt()).abs() < 1e-14 && (wm - 0.6_f64.sqrt()).abs() < 1e-14);
        let dec = SystemParams::new(1.0, 4.0, 2.0, 2.0, 0.0).unwrap();
        assert_eq!(harmonic_frequencies(&dec).unwrap(), (2.0, 1.0));
    }

    #[test]
    fn equal_round_trip() {
        let eq = EqualParams::new(6.0, -0.2).unwrap();
        let sys = eq.system();
        let back = EqualParams::from_system(&sys).unwrap();
        assert_eq!(back.lambda, eq.lambda);
        assert!((back.mu - eq.mu).abs() < 1e-15);
        assert!(EqualParams::from_system(&fig1()).is_err());
        let json = serde_json::to_string(&sys).unwrap();
        assert_eq!(json, r#"{"a_p":6.0,"b_p":6.0,"a_q":6.0,"b_q":6.0,"c":-2.4000000000000004}"#);
    }

    #[test]
    fn physical_scaling() {
        let s = SystemParams::from_physical(2.0, 1.0, 3.0, 1.0, 0.5, 2.0, 0.1, 1.0).unwrap();
        assert!((s.a_p - 0.5).abs() < 1e-15 && (s.b_p - 4.5).abs() < 1e-14);
        assert!((s.a_q - 4.0).abs() < 1e-15 && (s.b_q - 4.0).abs() < 1e-15);
        // c_pq (x²−x_p²)(y²−y_q²) at x=0, y=0 equals (c/4)·1·1 in units of ħ.
        assert!((s.c / 4.0 - 0.1 * 0.25 * 4.0).abs() < 1e-15);
    }
}
