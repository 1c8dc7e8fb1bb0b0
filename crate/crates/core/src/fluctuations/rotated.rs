use super::FluctuationOperator;
use crate::classical::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::fd_first_derivative;
use crate::model::{hessian, SystemParams};

/// Tail samples whose speed is below this fraction of the peak keep the last
/// resolved frame angle. Finite-difference velocities there are pure noise.
const FROZEN_FRAME: f64 = 1e-6;

/// Sampled `second·(−d²/dτ²) + first·d/dτ + zeroth`.
#[derive(Debug, Clone)]
pub struct OperatorBlock {
    pub second: Vec<f64>,
    pub first: Vec<f64>,
    pub zeroth: Vec<f64>,
}

impl OperatorBlock {
    fn zeros(n: usize) -> Self {
        Self { second: vec![0.0; n], first: vec![0.0; n], zeroth: vec![0.0; n] }
    }

    pub fn max_abs(&self) -> f64 {
        self.second
            .iter()
            .chain(&self.first)
            .chain(&self.zeroth)
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Rewrites the block as `−d² + W` when its kinetic part is a constant
    /// mass and there is no drift.
    fn schrodinger_form(&self, traj: &Trajectory) -> Result<FluctuationOperator> {
        let mass = self.second[0];
        let uniform = self.second.iter().all(|s| (s - mass).abs() <= 1e-12 * mass.abs());
        let driftless = self.first.iter().all(|f| f.abs() <= 1e-12 * mass.abs());
        if !(uniform && driftless && mass > 0.0) {
            return Err(Error::InvalidParameter(
                "block is not of the form −m d²/dτ² + W (unequal masses)".into(),
            ));
        }
        FluctuationOperator::new(traj.grid, self.zeroth.iter().map(|z| z / mass).collect())
    }
}

/// The fluctuation operator 𝓜 = −A d²/dτ² + ∇²V in the frame comoving with
/// the instanton (L along the velocity, T across it). Unnormalised: the mass
/// matrix A is still inside every block.
#[derive(Debug, Clone)]
pub struct RotatedBlocks {
    pub ll: OperatorBlock,
    pub lt: OperatorBlock,
    pub tl: OperatorBlock,
    pub tt: OperatorBlock,
    pub theta: Vec<f64>,
}

impl RotatedBlocks {
    /// M_L as `−d² + W`, dividing out the common mass. Needs a_p = a_q.
    pub fn longitudinal(&self, traj: &Trajectory) -> Result<FluctuationOperator> {
        self.ll.schrodinger_form(traj)
    }

    pub fn transverse(&self, traj: &Trajectory) -> Result<FluctuationOperator> {
        self.tt.schrodinger_form(traj)
    }
}

#[derive(Debug, Clone)]
pub struct Curvature {
    pub kappa: Vec<f64>,
    pub theta_dot: Vec<f64>,
}

/// v² together with the first and last sample whose speed is resolved.
/// Samples outside that range are the saturated tails of the kink.
fn speed_squared(traj: &Trajectory) -> Result<(Vec<f64>, usize, usize)> {
    let v2: Vec<f64> = traj.dp.iter().zip(&traj.dq).map(|(a, b)| a * a + b * b).collect();
    let vmax = v2.iter().cloned().fold(0.0, f64::max).sqrt();
    let resolved = |i: usize| v2[i].sqrt() > FROZEN_FRAME * vmax;
    let first = (0..v2.len())
        .find(|&i| resolved(i))
        .ok_or_else(|| Error::Singular("trajectory has no resolved velocity".into()))?;
    let last = (0..v2.len()).rev().find(|&i| resolved(i)).unwrap();
    if let Some(i) = (first..=last).find(|&i| !(v2[i] > f64::MIN_POSITIVE)) {
        return Err(Error::Singular(format!(
            "trajectory stalls at τ = {} (v² = {:e})",
            traj.tau[i], v2[i]
        )));
    }
    Ok((v2, first, last))
}

/// κ = |ṗq̈ − q̇p̈|/v³ and the signed turning rate θ̇ = (ṗq̈ − q̇p̈)/v².
pub fn curvature(traj: &Trajectory) -> Result<Curvature> {
    let (v2, first, last) = speed_squared(traj)?;
    let mut kappa = vec![0.0; traj.len()];
    let mut theta_dot = vec![0.0; traj.len()];
    for i in first..=last {
        let cross = traj.dp[i] * traj.ddq[i] - traj.dq[i] * traj.ddp[i];
        theta_dot[i] = cross / v2[i];
        kappa[i] = cross.abs() / v2[i].powf(1.5);
    }
    Ok(Curvature { kappa, theta_dot })
}

/// Assembles the four rotated blocks from the trajectory and the Hessian.
///
/// With χ = Rᵀη, R the rotation by θ = atan2(q̇, ṗ):
/// `Rᵀ(−A d²)R = B(−d² + θ̇²) − B J (2θ̇ d + θ̈)` with B = RᵀAR, and the
/// potential part is RᵀHR.
pub fn rotated_operators(traj: &Trajectory, params: &SystemParams) -> Result<RotatedBlocks> {
    let n = traj.len();
    let (v2, first, last) = speed_squared(traj)?;

    // Direction cosines, held fixed in the unresolved tails.
    let mut c = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut theta_dot = vec![0.0; n];
    let mut theta = vec![0.0; n];
    for i in first..=last {
        let v = v2[i].sqrt();
        c[i] = traj.dp[i] / v;
        s[i] = traj.dq[i] / v;
        theta_dot[i] = (traj.dp[i] * traj.ddq[i] - traj.dq[i] * traj.ddp[i]) / v2[i];
        theta[i] = s[i].atan2(c[i]);
    }
    for i in 0..first {
        c[i] = c[first];
        s[i] = s[first];
        theta[i] = theta[first];
    }
    for i in last + 1..n {
        c[i] = c[last];
        s[i] = s[last];
        theta[i] = theta[last];
    }
    let theta_ddot = fd_first_derivative(&theta_dot, traj.h());

    let (ap, aq) = (params.a_p, params.a_q);
    let mut ll = OperatorBlock::zeros(n);
    let mut lt = OperatorBlock::zeros(n);
    let mut tl = OperatorBlock::zeros(n);
    let mut tt = OperatorBlock::zeros(n);
    for i in 0..n {
        let (ci, si) = (c[i], s[i]);
        let b_ll = ap * ci * ci + aq * si * si;
        let b_tt = ap * si * si + aq * ci * ci;
        let b_lt = -(ap - aq) * ci * si;
        let hs = hessian(params, traj.p[i], traj.q[i]);
        let (vpp, vqq, vpq) = (hs[(0, 0)], hs[(1, 1)], hs[(0, 1)]);
        let h_ll = ci * ci * vpp + si * si * vqq + 2.0 * ci * si * vpq;
        let h_tt = si * si * vpp + ci * ci * vqq - 2.0 * ci * si * vpq;
        let h_lt = ci * si * (vqq - vpp) + (ci * ci - si * si) * vpq;
        let (td, tdd) = (theta_dot[i], theta_ddot[i]);
        let w2 = td * td;

        ll.second[i] = b_ll;
        ll.first[i] = -2.0 * b_lt * td;
        ll.zeroth[i] = b_ll * w2 - b_lt * tdd + h_ll;

        lt.second[i] = b_lt;
        lt.first[i] = 2.0 * b_ll * td;
        lt.zeroth[i] = b_lt * w2 + b_ll * tdd + h_lt;

        tl.second[i] = b_lt;
        tl.first[i] = -2.0 * b_tt * td;
        tl.zeroth[i] = b_lt * w2 - b_tt * tdd + h_lt;

        tt.second[i] = b_tt;
        tt.first[i] = 2.0 * b_lt * td;
        tt.zeroth[i] = b_tt * w2 + b_lt * tdd + h_tt;
    }
    Ok(RotatedBlocks { ll, lt, tl, tt, theta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{
        diagonal_trajectory, edge_trajectory, q1_profile, solve_bvp, BvpOptions, Flavor, TauGrid,
    };
    use crate::model::EqualParams;

    fn sech2(x: f64) -> f64 {
        1.0 / x.cosh().powi(2)
    }

    #[test]
    fn diagonal_reduces_to_closed_forms() {
        let eq = EqualParams::new(2.0, -0.2).unwrap();
        let g = TauGrid::default_for(eq.omega_plus());
        let tr = diagonal_trajectory(&eq, g.half_span, g.n).unwrap();
        let rb = rotated_operators(&tr, &tr.params).unwrap();
        assert!(rb.lt.max_abs() < 1e-12 && rb.tl.max_abs() < 1e-12);
        let ml = rb.longitudinal(&tr).unwrap();
        let mt = rb.transverse(&tr).unwrap();
        let (wp, wm) = (eq.omega_plus(), eq.omega_minus());
        for (i, t) in tr.tau.iter().enumerate() {
            let x = 0.5 * wp * t;
            assert!((ml.well[i] - wp * wp * (1.0 - 1.5 * sech2(x))).abs() < 1e-12);
            assert!((mt.well[i] - (wm * wm - (1.5 + 0.2) * sech2(x))).abs() < 1e-12);
        }
    }

    /// Largest deviations (L over |τ| ≤ 10, T over |τ| ≤ 1) of the exact edge
    /// path's rotated operators from the first-order closed profiles.
    fn edge_deviation(mu: f64) -> (f64, f64) {
        let eq = EqualParams::new(1.0, mu).unwrap();
        let g = TauGrid::default_for(1.0);
        let tr = solve_bvp(&eq.system(), Flavor::P, &g, None, BvpOptions::default()).unwrap();
        let rb = rotated_operators(&tr, &tr.params).unwrap();
        for i in 0..tr.len() {
            assert!((rb.lt.first[i] + rb.tl.first[i]).abs() < 1e-14);
        }
        let ml = rb.longitudinal(&tr).unwrap();
        let mt = rb.transverse(&tr).unwrap();
        let (mut dl, mut dt) = (0.0_f64, 0.0_f64);
        for (i, &t) in tr.tau.iter().enumerate() {
            if t.abs() <= 10.0 {
                dl = dl.max((ml.well[i] - (1.0 - 1.5 * sech2(0.5 * t))).abs());
            }
            if t.abs() <= 1.0 {
                let w = 1.0 - mu * (sech2(0.5 * t) + 3.0 * q1_profile(t));
                dt = dt.max((mt.well[i] - w).abs());
            }
        }
        (dl, dt)
    }

    #[test]
    fn edge_blocks_match_first_order_forms() {
        // Away from the core the frame swings towards the soft (1,1) direction
        // of the final well, which the first-order forms do not see.
        let (dl, dt) = edge_deviation(0.1);
        assert!(dl < 3.0 * 0.1, "{dl}");
        assert!(dt < 2.0 * 0.01, "{dt}");
        let (_, dt_half) = edge_deviation(0.05);
        let order = (dt / dt_half).log2();
        assert!((order - 2.0).abs() < 0.5, "transverse remainder order {order}");
    }

    #[test]
    fn decoupled_edge_transverse_is_free() {
        let eq = EqualParams::new(1.0, 0.0).unwrap();
        let tr = edge_trajectory(&eq, 40.0, 8001).unwrap();
        let rb = rotated_operators(&tr, &tr.params).unwrap();
        let mt = rb.transverse(&tr).unwrap();
        assert!(mt.well.iter().all(|w| (w - 1.0).abs() < 1e-12));
    }

    #[test]
    fn curvature_of_circle_and_line() {
        let eq = EqualParams::new(1.0, -0.2).unwrap();
        let tr = diagonal_trajectory(&eq, 20.0, 401).unwrap();
        assert!(curvature(&tr).unwrap().kappa.iter().all(|&k| k == 0.0));

        let mut c = tr.clone();
        for i in 0..c.len() {
            let t = c.tau[i];
            c.p[i] = t.cos();
            c.q[i] = t.sin();
            c.dp[i] = -t.sin();
            c.dq[i] = t.cos();
            c.ddp[i] = -t.cos();
            c.ddq[i] = -t.sin();
        }
        let k = curvature(&c).unwrap();
        assert!(k.kappa.iter().all(|x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn edge_curvature_consistent_with_angle() {
        let eq = EqualParams::new(1.0, 0.1).unwrap();
        let g = TauGrid::default_for(1.0);
        let tr = solve_bvp(&eq.system(), Flavor::P, &g, None, BvpOptions::default()).unwrap();
        let k = curvature(&tr).unwrap();
        let m = tr.len() / 2;
        assert!(k.kappa[m] > 0.0 && k.kappa[0] < k.kappa[m] && k.kappa[tr.len() - 1] < k.kappa[m]);
        let theta: Vec<f64> = tr.dq.iter().zip(&tr.dp).map(|(b, a)| b.atan2(*a)).collect();
        let fd = fd_first_derivative(&theta, tr.h());
        for i in 2..tr.len() - 2 {
            if tr.tau[i].abs() < 12.0 {
                assert!((fd[i] - k.theta_dot[i]).abs() < 1e-6, "{}", tr.tau[i]);
            }
        }
    }

    #[test]
    fn stalled_trajectory_rejected() {
        let eq = EqualParams::new(1.0, -0.2).unwrap();
        let mut tr = diagonal_trajectory(&eq, 20.0, 401).unwrap();
        tr.dp[200] = 0.0;
        tr.dq[200] = 0.0;
        assert!(rotated_operators(&tr, &tr.params).is_err());
        assert!(curvature(&tr).is_err());
    }
}
