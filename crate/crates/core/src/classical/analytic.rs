use std::f64::consts::PI;

use super::{accelerations, Flavor, TauGrid, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{dot, fd_first_derivative, solve_tridiagonal};
use crate::model::EqualParams;
use crate::special::ZETA3;

/// 2(π²−9), the μ² coefficient in the edge action.
pub const ACTION_P_COEFF: f64 = 2.0 * (PI * PI - 9.0);

/// Beyond this |τ| the closed form for q₁ cancels catastrophically.
const Q1_SWITCH: f64 = 12.0;

fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

/// p = q = tanh(ω₊τ/2).
pub fn diagonal_trajectory(eq: &EqualParams, half_span: f64, n: usize) -> Result<Trajectory> {
    if eq.mu <= -0.5 {
        return Err(Error::OutsideWindow(format!(
            "mu = {} <= -1/2: the barrier has melted and there is no diagonal instanton",
            eq.mu
        )));
    }
    let grid = TauGrid::new(half_span, n)?;
    let w = eq.omega_plus();
    let tau = grid.points();
    let p: Vec<f64> = tau.iter().map(|t| (0.5 * w * t).tanh()).collect();
    let dp: Vec<f64> = tau.iter().map(|t| 0.5 * w * sech2(0.5 * w * t)).collect();
    let ddp: Vec<f64> = p.iter().zip(&dp).map(|(x, d)| -w * x * d).collect();
    Ok(Trajectory {
        flavor: Flavor::R,
        grid,
        tau,
        q: p.clone(),
        dq: dp.clone(),
        ddq: ddp.clone(),
        p,
        dp,
        ddp,
        params: eq.system(),
    })
}

/// ln(1+x)/x − 1.
fn g_small(x: f64) -> f64 {
    if x < 1e-2 {
        let mut s = 0.0;
        let mut xk = 1.0;
        for k in 1..12 {
            xk *= -x;
            s += xk / (k + 1) as f64;
        }
        s
    } else {
        x.ln_1p() / x - 1.0
    }
}

/// (x/(1+x) − ln(1+x))/x.
fn b_small(x: f64) -> f64 {
    if x < 1e-2 {
        let mut s = 0.0;
        let mut xk = 1.0;
        for k in 2..14 {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            s += sign * (k - 1) as f64 / k as f64 * xk * x;
            xk *= x;
        }
        s
    } else {
        (x / (1.0 + x) - x.ln_1p()) / x
    }
}

/// First-order edge correction q₁(τ) = 2 + 2τ sinh τ − 4 cosh τ ln(2 cosh(τ/2)).
pub fn q1_profile(tau: f64) -> f64 {
    let t = tau.abs();
    if t <= Q1_SWITCH {
        2.0 + 2.0 * t * t.sinh() - 4.0 * t.cosh() * (2.0 * (0.5 * t).cosh()).ln()
    } else {
        // ln(2cosh(t/2)) = t/2 + ln(1+x) with x = e^{-t}
        let x = (-t).exp();
        -2.0 * g_small(x) - 2.0 * t * x - 2.0 * x * x.ln_1p()
    }
}

/// dq₁/dτ (odd).
pub fn q1_derivative(tau: f64) -> f64 {
    let t = tau.abs();
    let d = if t <= Q1_SWITCH {
        2.0 * t.sinh() + 2.0 * t * t.cosh()
            - 4.0 * t.sinh() * (2.0 * (0.5 * t).cosh()).ln()
            - 2.0 * t.cosh() * (0.5 * t).tanh()
    } else {
        let x = (-t).exp();
        let l = x.ln_1p();
        2.0 * b_small(x) - 2.0 * x + 2.0 * t * x + 2.0 * x * (l + x / (1.0 + x))
    };
    if tau < 0.0 {
        -d
    } else {
        d
    }
}

/// Second-order edge correction p₂ on a symmetric grid.
///
/// Solves p₂'' − (1 − (3/2)sech²(τ/2)) p₂ = −2 tanh(τ/2) q₁ with p₂(±T) = 0.
/// The odd source is solved on τ ≥ 0 with p₂(0) = 0, which removes the even
/// zero mode sech²(τ/2) from the discrete problem, then any residual overlap
/// with the zero mode is projected out on the full grid.
pub fn p2_profile(grid: &TauGrid) -> Result<Vec<f64>> {
    if grid.half_span < 15.0 {
        return Err(Error::InvalidParameter(format!(
            "p2 needs half_span >= 15, got {}",
            grid.half_span
        )));
    }
    let h = grid.h();
    let m = grid.n / 2;
    let u = |t: f64| 1.0 - 1.5 * sech2(0.5 * t);
    let s = |t: f64| -2.0 * (0.5 * t).tanh() * q1_profile(t);
    // Numerov on nodes τ_i = i h, i = 1..m−1 (both ends Dirichlet zero).
    let k = m - 1;
    let h12 = h * h / 12.0;
    let mut lower = vec![0.0; k];
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for j in 0..k {
        let i = j + 1;
        let t = i as f64 * h;
        let (tm, tp) = (t - h, t + h);
        lower[j] = 1.0 - h12 * u(tm);
        diag[j] = -2.0 - 10.0 * h12 * u(t);
        upper[j] = 1.0 - h12 * u(tp);
        rhs[j] = h12 * (s(tm) + 10.0 * s(t) + s(tp));
    }
    let half = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
    let mut full = vec![0.0; grid.n];
    for (j, v) in half.iter().enumerate() {
        let i = j + 1;
        full[m + i] = *v;
        full[m - i] = -*v;
    }
    let zero: Vec<f64> = grid.points().iter().map(|&t| sech2(0.5 * t)).collect();
    let overlap = dot(&full, &zero) / dot(&zero, &zero);
    for (f, z) in full.iter_mut().zip(&zero) {
        *f -= overlap * z;
    }
    Ok(full)
}

/// Sampled q₁, p₂ and their derivatives.
#[derive(Debug, Clone)]
pub struct EdgeCorrections {
    pub q1: Vec<f64>,
    pub dq1: Vec<f64>,
    pub p2: Vec<f64>,
    pub dp2: Vec<f64>,
}

pub fn edge_corrections(grid: &TauGrid) -> Result<EdgeCorrections> {
    let tau = grid.points();
    let p2 = p2_profile(grid)?;
    let dp2 = fd_first_derivative(&p2, grid.h());
    Ok(EdgeCorrections {
        q1: tau.iter().map(|&t| q1_profile(t)).collect(),
        dq1: tau.iter().map(|&t| q1_derivative(t)).collect(),
        p2,
        dp2,
    })
}

/// Perturbative P instanton: p = tanh(τ/2) + μ²p₂, q = −1 + μq₁.
///
/// Use [`Trajectory::mirrored`] for the Q flavor.
pub fn edge_trajectory(eq: &EqualParams, half_span: f64, n: usize) -> Result<Trajectory> {
    if eq.mu.abs() >= 0.25 {
        return Err(Error::OutsideWindow(format!(
            "edge instanton needs |mu| < 1/4 (edge stability bound), got mu = {}",
            eq.mu
        )));
    }
    let grid = TauGrid::new(half_span, n)?;
    let tau = grid.points();
    let corr = edge_corrections(&grid)?;
    let (mu, mu2) = (eq.mu, eq.mu * eq.mu);
    let p: Vec<f64> = tau.iter().zip(&corr.p2).map(|(t, p2)| (0.5 * t).tanh() + mu2 * p2).collect();
    let q: Vec<f64> = corr.q1.iter().map(|q1| -1.0 + mu * q1).collect();
    let dp: Vec<f64> =
        tau.iter().zip(&corr.dp2).map(|(t, d)| 0.5 * sech2(0.5 * t) + mu2 * d).collect();
    let dq: Vec<f64> = corr.dq1.iter().map(|d| mu * d).collect();
    let params = eq.system();
    let (ddp, ddq) = accelerations(&params, &p, &q);
    Ok(Trajectory { flavor: Flavor::P, grid, tau, p, q, dp, dq, ddp, ddq, params })
}

/// S₀ᴿ = (4/3)λω₊.
pub fn action_r_closed(eq: &EqualParams) -> Result<f64> {
    if eq.mu < -0.5 {
        return Err(Error::OutsideWindow(format!("mu = {} < -1/2", eq.mu)));
    }
    Ok(4.0 / 3.0 * eq.lambda * eq.omega_plus())
}

/// S₀ᴾ = (2/3)λ(1 − 2(π²−9)μ²), valid to second order in μ.
pub fn action_p_closed(eq: &EqualParams) -> Result<f64> {
    if eq.mu.abs() >= 0.25 {
        return Err(Error::OutsideWindow(format!(
            "edge action needs |mu| < 1/4, got mu = {}",
            eq.mu
        )));
    }
    Ok(2.0 / 3.0 * eq.lambda * (1.0 - ACTION_P_COEFF * eq.mu * eq.mu))
}

/// μ² coefficient of ∫q̇² along the edge path: 4π² − 20 − 16ζ(3).
pub fn kinetic_q_mu2_closed() -> f64 {
    4.0 * PI * PI - 20.0 - 16.0 * ZETA3
}

/// μ² coefficient of ∫ṗ² along the edge path: 16(2 − π²/3 + ζ(3)).
pub fn kinetic_p_mu2_closed() -> f64 {
    16.0 * (2.0 - PI * PI / 3.0 + ZETA3)
}
