//! Dilute instanton gas on the four wells.
//!
//! Vertices are ordered a = (−1,−1), b = (−1,1), c = (1,1), d = (1,−1), so a
//! P instanton (p flips) joins a–d and b–c, a Q instanton joins a–b and c–d,
//! and an R instanton joins the diagonals a–c and b–d.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::classical::{action, action_p_closed, action_r_closed, diagonal_trajectory, Flavor, TauGrid};
use crate::error::{ensure_finite, Error, Result};
use crate::fluctuations::{chi_t_r, determinant_record, Method};
use crate::model::EqualParams;

/// Single-instanton weights in units of ω, plus the free vacuum factor
/// C(T) = exp(ln_c0 − e0·T).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstantonWeights {
    pub k_p: f64,
    pub k_q: f64,
    pub k_r: f64,
    pub ln_c0: f64,
    pub e0: f64,
    /// K_R was set to zero because the diagonal path is transverse-unstable.
    pub k_r_unstable: bool,
}

impl InstantonWeights {
    /// Bare weights with C ≡ 1.
    pub fn new(k_p: f64, k_q: f64, k_r: f64) -> Self {
        Self { k_p, k_q, k_r, ln_c0: 0.0, e0: 0.0, k_r_unstable: false }
    }

    /// All weights for the equal-parameter model.
    pub fn from_params(eq: &EqualParams) -> Result<Self> {
        let r = k_weight_r(eq)?;
        let k = k_weight_p(eq)?;
        let (wp, wm) = (eq.omega_plus(), eq.omega_minus());
        Ok(Self {
            k_p: k,
            k_q: k,
            k_r: r.value,
            ln_c0: (eq.lambda * (wp * wm).sqrt() / PI).ln(),
            e0: 0.5 * (wp + wm),
            k_r_unstable: r.transverse_unstable,
        })
    }

    pub fn vacuum(&self, t: f64) -> f64 {
        (self.ln_c0 - self.e0 * t).exp()
    }

    /// The common edge weight, when K_P = K_Q.
    fn edge(&self) -> Result<f64> {
        let scale = self.k_p.abs().max(self.k_q.abs()).max(f64::MIN_POSITIVE);
        if (self.k_p - self.k_q).abs() > 1e-12 * scale {
            return Err(Error::InvalidParameter(format!(
                "needs K_P = K_Q, got {} and {}",
                self.k_p, self.k_q
            )));
        }
        Ok(self.k_p)
    }
}

/// C = (λ√(ω₊ω₋)/π) e^{−(ω₊+ω₋)T/2}.
pub fn vacuum_factor(eq: &EqualParams, t: f64) -> Result<f64> {
    if eq.mu.abs() >= 0.5 {
        return Err(Error::OutsideWindow(format!("vacuum factor needs |μ| < 1/2, got {}", eq.mu)));
    }
    let (wp, wm) = (eq.omega_plus(), eq.omega_minus());
    Ok(eq.lambda * (wp * wm).sqrt() / PI * (-0.5 * (wp + wm) * t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalWeight {
    pub value: f64,
    pub transverse_unstable: bool,
}

fn semiclassical_weight(ln_chi: f64, s: f64) -> f64 {
    (0.5 * ln_chi + 0.5 * (6.0 * s / PI).ln() - s).exp()
}

/// K_R = √χ_T^R · √(6S₀/π) e^{−S₀} ω₊. Zero, flagged, for μ ≥ 0.
pub fn k_weight_r(eq: &EqualParams) -> Result<DiagonalWeight> {
    if eq.mu <= -0.5 {
        return Err(Error::OutsideWindow(format!("K_R needs μ > −1/2, got {}", eq.mu)));
    }
    if eq.mu >= 0.0 {
        return Ok(DiagonalWeight { value: 0.0, transverse_unstable: true });
    }
    let chi = chi_t_r(eq.mu)?;
    let s = action_r_closed(eq)?;
    let value = semiclassical_weight(chi.ln(), s) * eq.omega_plus();
    ensure_finite("K_R", value)?;
    Ok(DiagonalWeight { value, transverse_unstable: false })
}

/// K_R rebuilt from the numerical oracles: χ_T^R by Gelfand–Yaglom on the
/// rotated transverse operator and S₀ by quadrature of the trajectory.
pub fn k_weight_r_from_oracles(eq: &EqualParams) -> Result<f64> {
    if !(eq.mu > -0.5 && eq.mu < 0.0) {
        return Err(Error::OutsideWindow(format!("K_R needs −1/2 < μ < 0, got {}", eq.mu)));
    }
    let rec = determinant_record(eq, Flavor::R, Method::GelfandYaglom)?;
    let g = TauGrid::default_for(eq.omega_plus());
    let tr = diagonal_trajectory(eq, g.half_span, g.n)?;
    let s = action(&tr, &tr.params)?;
    Ok(semiclassical_weight(rec.chi_t.ln(), s) * eq.omega_plus())
}

/// K_P = (1−2μ)√(6S₀ᴾ/π) e^{−S₀ᴾ}.
pub fn k_weight_p(eq: &EqualParams) -> Result<f64> {
    let s = action_p_closed(eq)?;
    Ok((1.0 - 2.0 * eq.mu) * semiclassical_weight(0.0, s))
}

/// The weighted adjacency matrix 𝕂.
pub fn adjacency(w: &InstantonWeights) -> Matrix4<f64> {
    let (p, q, r) = (w.k_p, w.k_q, w.k_r);
    Matrix4::new(
        0.0, q, r, p, //
        q, 0.0, p, r, //
        r, p, 0.0, q, //
        p, r, q, 0.0,
    )
}

/// Columns are the eigenvectors of 𝕂 for λ_S, λ_Q, λ_P, λ_R, in that order.
pub fn parity_states() -> Matrix4<f64> {
    Matrix4::new(
        1.0, 1.0, 1.0, 1.0, //
        1.0, 1.0, -1.0, -1.0, //
        1.0, -1.0, -1.0, 1.0, //
        1.0, -1.0, 1.0, -1.0,
    ) * 0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasSpectrum {
    pub lambda_s: f64,
    pub lambda_q: f64,
    pub lambda_p: f64,
    pub lambda_r: f64,
    pub de_p: f64,
    pub de_q: f64,
    pub de_r: f64,
}

pub fn spectrum(w: &InstantonWeights) -> GasSpectrum {
    let (p, q, r) = (w.k_p, w.k_q, w.k_r);
    let lambda_s = p + q + r;
    let lambda_q = -p + q - r;
    let lambda_p = p - q - r;
    let lambda_r = -p - q + r;
    GasSpectrum {
        lambda_s,
        lambda_q,
        lambda_p,
        lambda_r,
        de_p: lambda_s - lambda_p,
        de_q: lambda_s - lambda_q,
        de_r: lambda_s - lambda_r,
    }
}

/// Transition amplitudes out of vertex a, stored as `exp(ln_scale) · value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitudes {
    pub ln_scale: f64,
    pub aa: f64,
    pub ab: f64,
    pub ac: f64,
    pub ad: f64,
}

impl Amplitudes {
    /// [A_aa, A_ab, A_ac, A_ad]; may overflow for large K·T.
    pub fn values(&self) -> [f64; 4] {
        let s = self.ln_scale.exp();
        [s * self.aa, s * self.ab, s * self.ac, s * self.ad]
    }
}

/// A_aa = C(c_P c_Q c_R + s_P s_Q s_R) and cyclic, c_i = cosh K_iT,
/// s_i = sinh K_iT.
///
/// Each product is expanded into the eight exponentials e^{±x_P ±x_Q ±x_R}
/// and summed with the growth e^{Σ|x_i|} factored out. Evaluating the
/// hyperbolic products directly cancels catastrophically when a weight is
/// negative.
pub fn amplitudes(w: &InstantonWeights, t: f64) -> Amplitudes {
    let x = [w.k_p * t, w.k_q * t, w.k_r * t];
    let top: f64 = x.iter().map(|v| v.abs()).sum();
    let (mut aa, mut ab, mut ac, mut ad) = (0.0, 0.0, 0.0, 0.0);
    for bits in 0..8u32 {
        let s = [0, 1, 2].map(|i| if bits >> i & 1 == 0 { 1.0 } else { -1.0 });
        let e = 0.125 * (s[0] * x[0] + s[1] * x[1] + s[2] * x[2] - top).exp();
        aa += (1.0 + s[0] * s[1] * s[2]) * e;
        ab += (s[1] + s[0] * s[2]) * e;
        ac += (s[0] * s[1] + s[2]) * e;
        ad += (s[0] + s[1] * s[2]) * e;
    }
    Amplitudes { ln_scale: w.ln_c0 - w.e0 * t + top, aa, ab, ac, ad }
}

/// C·exp(𝕂T), the full amplitude matrix.
pub fn amplitude_matrix(w: &InstantonWeights, t: f64) -> Matrix4<f64> {
    (adjacency(w) * t).exp() * w.vacuum(t)
}

/// Occupations (P_a, P_b, P_c, P_d) at real time t after preparing well a.
pub fn survival_probabilities(w: &InstantonWeights, t: f64) -> Result<[f64; 4]> {
    let k = w.edge()?;
    let c2k = (2.0 * k * t).cos();
    let c2r = (2.0 * w.k_r * t).cos();
    let s2k = (2.0 * k * t).sin();
    let side = 0.25 * s2k * s2k;
    Ok([
        0.25 * (1.0 + c2k * c2k + 2.0 * c2k * c2r),
        side,
        0.25 * (1.0 + c2k * c2k - 2.0 * c2k * c2r),
        side,
    ])
}

/// τ = π / (2√(2K² + K_R²)).
pub fn lifetime(w: &InstantonWeights) -> Result<f64> {
    let k = w.edge()?;
    let rate = 2.0 * k * k + w.k_r * w.k_r;
    if !(rate > 0.0) {
        return Err(Error::InvalidParameter("no tunneling: the lifetime is infinite".into()));
    }
    Ok(PI / (2.0 * rate.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub mu: f64,
    pub k: f64,
    pub k_r: f64,
    pub de_p: f64,
    pub de_r: f64,
    pub k_r_unstable: bool,
}

/// Splittings over a (μ, λ) grid. Points outside the edge window are skipped
/// with a warning.
pub fn sweep(mus: &[f64], lambdas: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(mus.len() * lambdas.len());
    for &mu in mus {
        for &lambda in lambdas {
            let eq = EqualParams::new(lambda, mu)?;
            let w = match InstantonWeights::from_params(&eq) {
                Ok(w) => w,
                Err(e) if e.is_domain() => {
                    log::warn!("skipping λ={lambda}, μ={mu}: {e}");
                    continue;
                }
                Err(e) => return Err(e),
            };
            let s = spectrum(&w);
            rows.push(SweepRow {
                lambda,
                mu,
                k: w.k_p,
                k_r: w.k_r,
                de_p: s.de_p,
                de_r: s.de_r,
                k_r_unstable: w.k_r_unstable,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["lambda", "mu", "K", "K_R", "dE_P", "dE_R"])?;
    for r in rows {
        out.write_record(&[
            r.lambda.to_string(),
            r.mu.to_string(),
            r.k.to_string(),
            r.k_r.to_string(),
            r.de_p.to_string(),
            r.de_r.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Metadata written next to a sweep CSV.
pub fn sweep_metadata(rows: &[SweepRow]) -> serde_json::Value {
    serde_json::json!({
        "columns": ["lambda", "mu", "K", "K_R", "dE_P", "dE_R"],
        "units": "omega",
        "rows": rows.len(),
        "k_r_unstable": rows.iter().filter(|r| r.k_r_unstable).map(|r| [r.lambda, r.mu]).collect::<Vec<_>>(),
    })
}

/// CSV with columns t,P_a,P_b,P_c,P_d.
pub fn write_probability_trace<W: Write>(w: &InstantonWeights, times: &[f64], out: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(out);
    out.write_record(["t", "P_a", "P_b", "P_c", "P_d"])?;
    for &t in times {
        let p = survival_probabilities(w, t)?;
        out.write_record(
            std::iter::once(t.to_string()).chain(p.iter().map(|x| x.to_string())),
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Real-time occupations from the spectral decomposition of 𝕂, the oracle
/// for `survival_probabilities`.
pub fn evolved_probabilities(w: &InstantonWeights, t: f64) -> [f64; 4] {
    let eig = adjacency(w).symmetric_eigen();
    let mut out = [0.0; 4];
    for (x, o) in out.iter_mut().enumerate() {
        let (mut re, mut im) = (0.0, 0.0);
        for k in 0..4 {
            let v: Vector4<f64> = eig.eigenvectors.column(k).into();
            let amp = v[0] * v[x];
            re += amp * (eig.eigenvalues[k] * t).cos();
            im += amp * (eig.eigenvalues[k] * t).sin();
        }
        *o = re * re + im * im;
    }
    out
}
