use super::{force, Flavor, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{fd_second_derivative, simpson};
use crate::model::{hessian, potential, EqualParams, SystemParams};

/// E(τ) = −½a_p ṗ² − ½a_q q̇² + V(p, q).
pub fn euclidean_energy(traj: &Trajectory, params: &SystemParams) -> Vec<f64> {
    (0..traj.len())
        .map(|i| {
            -0.5 * params.a_p * traj.dp[i] * traj.dp[i] - 0.5 * params.a_q * traj.dq[i] * traj.dq[i]
                + potential(params, traj.p[i], traj.q[i])
        })
        .collect()
}

/// ∫(a_p ṗ² + a_q q̇²) without the on-shell check.
pub fn kinetic_action(traj: &Trajectory, params: &SystemParams) -> f64 {
    let k: Vec<f64> = traj
        .dp
        .iter()
        .zip(&traj.dq)
        .map(|(a, b)| params.a_p * a * a + params.a_q * b * b)
        .collect();
    simpson(&k, traj.h())
}

/// S₀ = ∫(a_p ṗ² + a_q q̇²), valid only at zero Euclidean energy.
pub fn action(traj: &Trajectory, params: &SystemParams) -> Result<f64> {
    let worst = euclidean_energy(traj, params).iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    if worst > 1e-6 {
        return Err(Error::CheckFailed(format!(
            "trajectory is off shell (max |E| = {worst:e}); the kinetic form of the action does not apply"
        )));
    }
    Ok(kinetic_action(traj, params))
}

/// ∫(½a_p ṗ² + ½a_q q̇² + V), the action functional itself.
pub fn lagrangian_action(traj: &Trajectory, params: &SystemParams) -> f64 {
    let l: Vec<f64> = (0..traj.len())
        .map(|i| {
            0.5 * params.a_p * traj.dp[i] * traj.dp[i]
                + 0.5 * params.a_q * traj.dq[i] * traj.dq[i]
                + potential(params, traj.p[i], traj.q[i])
        })
        .collect();
    simpson(&l, traj.h())
}

fn require_diagonal(traj: &Trajectory) -> Result<EqualParams> {
    if traj.flavor != Flavor::R {
        return Err(Error::InvalidParameter(format!(
            "BPS form exists only for the diagonal (R) instanton, got {}",
            traj.flavor
        )));
    }
    EqualParams::from_system(&traj.params)
}

/// λω₊∫ṗ(1−p²) dτ, the cross term left over by the Bogomol'nyi completion.
pub fn topological_action(traj: &Trajectory) -> Result<f64> {
    let eq = require_diagonal(traj)?;
    let v: Vec<f64> = traj.p.iter().zip(&traj.dp).map(|(p, d)| d * (1.0 - p * p)).collect();
    Ok(eq.lambda * eq.omega_plus() * simpson(&v, traj.h()))
}

/// max |ṗ − (ω₊/2)(1 − p²)|.
pub fn bps_residual(traj: &Trajectory) -> Result<f64> {
    let eq = require_diagonal(traj)?;
    let w = eq.omega_plus();
    Ok(traj
        .p
        .iter()
        .zip(&traj.dp)
        .fold(0.0_f64, |m, (p, d)| m.max((d - 0.5 * w * (1.0 - p * p)).abs())))
}

/// Largest Numerov-collocation residual of the equations of motion, in
/// acceleration units, over the interior of the grid.
pub fn eom_residual(traj: &Trajectory) -> f64 {
    let h = traj.h();
    let h12 = h * h / 12.0;
    let f: Vec<(f64, f64)> = traj.p.iter().zip(&traj.q).map(|(&p, &q)| force(&traj.params, p, q)).collect();
    let mut worst = 0.0_f64;
    for i in 1..traj.len() - 1 {
        let rp = traj.p[i - 1] - 2.0 * traj.p[i] + traj.p[i + 1]
            - h12 * (f[i - 1].0 + 10.0 * f[i].0 + f[i + 1].0);
        let rq = traj.q[i - 1] - 2.0 * traj.q[i] + traj.q[i + 1]
            - h12 * (f[i - 1].1 + 10.0 * f[i].1 + f[i + 1].1);
        worst = worst.max(rp.abs() / (h * h)).max(rq.abs() / (h * h));
    }
    worst
}

#[derive(Debug, Clone)]
pub struct ZeroMode {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    /// ‖A⁻¹𝓜Φ‖/‖Φ‖ over the grid interior.
    pub residual: f64,
}

/// The translational zero mode (ṗ, q̇) and how well the fluctuation operator
/// 𝓜 = −A d²/dτ² + ∇²V annihilates it.
///
/// 𝓜 is applied with A⁻¹ folded in, so the residual does not scale with λ.
pub fn zero_mode(traj: &Trajectory, params: &SystemParams) -> ZeroMode {
    let h = traj.h();
    let d2p = fd_second_derivative(&traj.dp, h);
    let d2q = fd_second_derivative(&traj.dq, h);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 2..traj.len() - 2 {
        let hs = hessian(params, traj.p[i], traj.q[i]);
        let (u, v) = (traj.dp[i], traj.dq[i]);
        let rp = -d2p[i] + (hs[(0, 0)] * u + hs[(0, 1)] * v) / params.a_p;
        let rq = -d2q[i] + (hs[(1, 0)] * u + hs[(1, 1)] * v) / params.a_q;
        num += rp * rp + rq * rq;
        den += u * u + v * v;
    }
    ZeroMode { p: traj.dp.clone(), q: traj.dq.clone(), residual: (num / den).sqrt() }
}
