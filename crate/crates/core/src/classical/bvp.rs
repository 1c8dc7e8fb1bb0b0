use nalgebra::{Matrix2, Vector2};

use super::{accelerations, edge_trajectory, force, Flavor, TauGrid, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{fd_first_derivative, simpson, solve_block_tridiagonal, Block2};
use crate::model::{harmonic_frequencies, validate_params, EqualParams, SystemParams};

#[derive(Debug, Clone, Copy)]
pub struct BvpOptions {
    pub max_iter: usize,
    /// Converged when the largest acceleration residual is below this.
    pub tol: f64,
}

impl Default for BvpOptions {
    fn default() -> Self {
        Self { max_iter: 50, tol: 1e-10 }
    }
}

fn jacobian(params: &SystemParams, p: f64, q: f64) -> Matrix2<f64> {
    let (wp2, wq2) = (params.b_p / params.a_p, params.b_q / params.a_q);
    let (mu, nu) = (params.mu(), params.nu());
    let fpp = wp2 * (0.5 * (p * p - 1.0) + mu * (q * q - 1.0) + p * p);
    let fpq = wp2 * 2.0 * mu * p * q;
    let fqq = wq2 * (0.5 * (q * q - 1.0) + nu * (p * p - 1.0) + q * q);
    let fqp = wq2 * 2.0 * nu * p * q;
    Matrix2::new(fpp, fpq, fqp, fqq)
}

/// Which components are odd in τ for this flavor (the rest are even).
fn odd_components(flavor: Flavor) -> [bool; 2] {
    match flavor {
        Flavor::R => [true, true],
        Flavor::P => [true, false],
        Flavor::Q => [false, true],
    }
}

struct HalfProblem<'a> {
    params: &'a SystemParams,
    odd: [bool; 2],
    h12: f64,
    h2: f64,
}

impl HalfProblem<'_> {
    /// Numerov collocation residual divided by h², node N held fixed.
    fn residual(&self, y: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
        let n = y.len() - 1;
        let f: Vec<Vector2<f64>> = y
            .iter()
            .map(|v| {
                let (a, b) = force(self.params, v[0], v[1]);
                Vector2::new(a, b)
            })
            .collect();
        let mut r = vec![Vector2::zeros(); n + 1];
        for c in 0..2 {
            r[0][c] = if self.odd[c] {
                y[0][c] / self.h2
            } else {
                (2.0 * y[1][c] - 2.0 * y[0][c] - self.h12 * (2.0 * f[1][c] + 10.0 * f[0][c])) / self.h2
            };
        }
        for i in 1..n {
            r[i] = (y[i - 1] - 2.0 * y[i] + y[i + 1]
                - self.h12 * (f[i - 1] + 10.0 * f[i] + f[i + 1]))
                / self.h2;
        }
        r
    }

    fn newton_step(&self, y: &[Vector2<f64>], r: &[Vector2<f64>]) -> Result<Vec<Vector2<f64>>> {
        let n = y.len() - 1;
        let j: Vec<Matrix2<f64>> = y.iter().map(|v| jacobian(self.params, v[0], v[1])).collect();
        let id = Block2::identity();
        let mut lower = vec![Block2::zeros(); n + 1];
        let mut diag = vec![Block2::zeros(); n + 1];
        let mut upper = vec![Block2::zeros(); n + 1];
        for c in 0..2 {
            if self.odd[c] {
                diag[0][(c, c)] = 1.0;
            } else {
                for k in 0..2 {
                    let e = if k == c { 1.0 } else { 0.0 };
                    diag[0][(c, k)] = -2.0 * e - 10.0 * self.h12 * j[0][(c, k)];
                    upper[0][(c, k)] = 2.0 * e - 2.0 * self.h12 * j[1][(c, k)];
                }
            }
        }
        for i in 1..n {
            lower[i] = id - self.h12 * j[i - 1];
            diag[i] = -2.0 * id - 10.0 * self.h12 * j[i];
            upper[i] = if i + 1 < n { id - self.h12 * j[i + 1] } else { Block2::zeros() };
        }
        diag[n] = id;
        let rhs: Vec<Vector2<f64>> = r.iter().map(|v| -v * self.h2).collect();
        solve_block_tridiagonal(&lower, &diag, &upper, &rhs)
    }
}

fn max_norm(r: &[Vector2<f64>]) -> f64 {
    r.iter().fold(0.0_f64, |m, v| m.max(v[0].abs()).max(v[1].abs()))
}

fn default_guess(params: &SystemParams, flavor: Flavor, grid: &TauGrid) -> Result<Trajectory> {
    if let Ok(eq) = EqualParams::from_system(params) {
        if flavor != Flavor::R && eq.mu.abs() < 0.25 {
            let tr = edge_trajectory(&eq, grid.half_span, grid.n)?;
            return Ok(if flavor == Flavor::Q { tr.mirrored() } else { tr });
        }
    }
    let (wp, wq) = (params.omega_p(), params.omega_q());
    let w_r = harmonic_frequencies(params).map(|(a, _)| a).unwrap_or(wp.min(wq));
    let tau = grid.points();
    let kink = |w: f64| tau.iter().map(|t| (0.5 * w * t).tanh()).collect::<Vec<_>>();
    let (p, q) = match flavor {
        Flavor::R => (kink(w_r), kink(w_r)),
        Flavor::P => (kink(wp), vec![-1.0; grid.n]),
        Flavor::Q => (vec![-1.0; grid.n], kink(wq)),
    };
    Ok(assemble(*params, flavor, *grid, p, q))
}

fn assemble(params: SystemParams, flavor: Flavor, grid: TauGrid, p: Vec<f64>, q: Vec<f64>) -> Trajectory {
    let h = grid.h();
    let dp = fd_first_derivative(&p, h);
    let dq = fd_first_derivative(&q, h);
    let (ddp, ddq) = accelerations(&params, &p, &q);
    Trajectory { flavor, grid, tau: grid.points(), p, q, dp, dq, ddp, ddq, params }
}

/// Damped-Newton solution of the coupled Euler–Lagrange boundary-value problem.
///
/// The instanton is centred at τ = 0 by imposing its parity: flipping
/// components are odd, returning components even. The problem is then solved
/// on τ ≥ 0 only, which also removes the translational zero mode from the
/// Newton Jacobian. Discretisation is Numerov collocation (fourth order).
pub fn solve_bvp(
    params: &SystemParams,
    flavor: Flavor,
    grid: &TauGrid,
    initial_guess: Option<&Trajectory>,
    opts: BvpOptions,
) -> Result<Trajectory> {
    let report = validate_params(params)?;
    if !report.four_well {
        return Err(Error::NotFourWell { violated: report.violated });
    }
    let guess = match initial_guess {
        Some(g) => {
            if g.grid != *grid || g.flavor != flavor {
                return Err(Error::InvalidParameter(
                    "initial guess must share the grid and flavor".into(),
                ));
            }
            g.clone()
        }
        None => default_guess(params, flavor, grid)?,
    };
    let h = grid.h();
    let m = grid.n / 2;
    let odd = odd_components(flavor);
    let (_, (pr, qr)) = flavor.endpoints();
    let mut y: Vec<Vector2<f64>> = (0..=m).map(|i| Vector2::new(guess.p[m + i], guess.q[m + i])).collect();
    for c in 0..2 {
        if odd[c] {
            y[0][c] = 0.0;
        }
    }
    y[m] = Vector2::new(pr, qr);
    let prob = HalfProblem { params, odd, h12: h * h / 12.0, h2: h * h };

    let mut r = prob.residual(&y);
    let mut res = max_norm(&r);
    let mut iter = 0;
    while res > opts.tol {
        if iter >= opts.max_iter {
            return Err(Error::NoConvergence { iterations: iter, residual: res });
        }
        iter += 1;
        let step = prob.newton_step(&y, &r)?;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<Vector2<f64>> = y.iter().zip(&step).map(|(a, d)| a + alpha * d).collect();
            let rt = prob.residual(&trial);
            let rn = max_norm(&rt);
            if rn.is_finite() && rn < res * (1.0 - 1e-4 * alpha) {
                y = trial;
                r = rt;
                res = rn;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence { iterations: iter, residual: res });
        }
        log::debug!("bvp iter {iter}: residual {res:e} (step {alpha})");
    }

    let sign = |c: usize| if odd[c] { -1.0 } else { 1.0 };
    let mut p = vec![0.0; grid.n];
    let mut q = vec![0.0; grid.n];
    for i in 0..=m {
        p[m + i] = y[i][0];
        q[m + i] = y[i][1];
        p[m - i] = sign(0) * y[i][0];
        q[m - i] = sign(1) * y[i][1];
    }
    let tr = assemble(*params, flavor, *grid, p, q);
    let kin: Vec<f64> =
        tr.dp.iter().zip(&tr.dq).map(|(a, b)| params.a_p * a * a + params.a_q * b * b).collect();
    let s = simpson(&kin, h);
    if s < 1e-8 {
        return Err(Error::NullSolution { action: s });
    }
    Ok(tr)
}
