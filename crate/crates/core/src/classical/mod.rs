//! Classical instanton paths and their diagnostics.

mod analytic;
mod bvp;
mod diagnostics;

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;

pub use analytic::{
    action_p_closed, action_r_closed, diagonal_trajectory, edge_corrections, edge_trajectory,
    kinetic_p_mu2_closed, kinetic_q_mu2_closed, p2_profile, q1_derivative, q1_profile,
    EdgeCorrections, ACTION_P_COEFF,
};
pub use bvp::{solve_bvp, BvpOptions};
pub use diagnostics::{
    action, bps_residual, eom_residual, euclidean_energy, kinetic_action, lagrangian_action,
    topological_action, zero_mode, ZeroMode,
};

/// Which pair of wells the instanton connects, starting from (−1, −1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    /// p flips, q returns to −1.
    P,
    /// q flips, p returns to −1.
    Q,
    /// Both flip along the diagonal.
    R,
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Flavor::P => "P",
            Flavor::Q => "Q",
            Flavor::R => "R",
        };
        f.write_str(s)
    }
}

impl Flavor {
    /// Asymptotic (p, q) at τ → −∞ and τ → +∞.
    pub fn endpoints(self) -> ((f64, f64), (f64, f64)) {
        match self {
            Flavor::P => ((-1.0, -1.0), (1.0, -1.0)),
            Flavor::Q => ((-1.0, -1.0), (-1.0, 1.0)),
            Flavor::R => ((-1.0, -1.0), (1.0, 1.0)),
        }
    }
}

/// Uniform grid symmetric about τ = 0 with an odd number of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    pub half_span: f64,
    pub n: usize,
}

impl TauGrid {
    pub fn new(half_span: f64, n: usize) -> Result<Self> {
        if !(half_span.is_finite() && half_span > 0.0) {
            return Err(Error::InvalidParameter(format!("half_span must be positive, got {half_span}")));
        }
        if n < 65 || n % 2 == 0 {
            return Err(Error::InvalidParameter(format!("grid size must be odd and >= 65, got {n}")));
        }
        Ok(Self { half_span, n })
    }

    /// Default resolution: 40 natural time units on each side, h = 0.01/ω.
    pub fn default_for(omega: f64) -> Self {
        Self { half_span: 40.0 / omega, n: 8001 }
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_span / (self.n - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let m = (self.n / 2) as i64;
        let h = self.h();
        (0..self.n as i64).map(|i| (i - m) as f64 * h).collect()
    }
}

/// A sampled classical path.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub flavor: Flavor,
    pub grid: TauGrid,
    pub tau: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub dp: Vec<f64>,
    pub dq: Vec<f64>,
    pub ddp: Vec<f64>,
    pub ddq: Vec<f64>,
    pub params: SystemParams,
}

#[derive(Serialize, Deserialize)]
struct CsvHeader {
    flavor: Flavor,
    half_span: f64,
    n: usize,
    params: SystemParams,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn h(&self) -> f64 {
        self.grid.h()
    }

    /// Largest distance of the endpoint values from the flavor's asymptotes.
    pub fn boundary_error(&self) -> f64 {
        let ((pl, ql), (pr, qr)) = self.flavor.endpoints();
        let n = self.len() - 1;
        [self.p[0] - pl, self.q[0] - ql, self.p[n] - pr, self.q[n] - qr]
            .iter()
            .fold(0.0_f64, |m, d| m.max(d.abs()))
    }

    /// τ → −τ: the anti-instanton.
    pub fn time_reversed(&self) -> Trajectory {
        let rev = |v: &Vec<f64>| v.iter().rev().copied().collect::<Vec<_>>();
        let neg = |v: &Vec<f64>| v.iter().rev().map(|x| -x).collect::<Vec<_>>();
        Trajectory {
            tau: self.tau.clone(),
            p: rev(&self.p),
            q: rev(&self.q),
            dp: neg(&self.dp),
            dq: neg(&self.dq),
            ddp: rev(&self.ddp),
            ddq: rev(&self.ddq),
            ..self.clone()
        }
    }

    /// Swap the roles of p and q (P ↔ Q, R ↦ R).
    pub fn mirrored(&self) -> Trajectory {
        let p = &self.params;
        Trajectory {
            flavor: match self.flavor {
                Flavor::P => Flavor::Q,
                Flavor::Q => Flavor::P,
                Flavor::R => Flavor::R,
            },
            p: self.q.clone(),
            q: self.p.clone(),
            dp: self.dq.clone(),
            dq: self.dp.clone(),
            ddp: self.ddq.clone(),
            ddq: self.ddp.clone(),
            params: SystemParams { a_p: p.a_q, b_p: p.b_q, a_q: p.a_p, b_q: p.b_p, c: p.c },
            ..self.clone()
        }
    }

    /// CSV with a `# {json}` first line and columns tau,p,q,dp,dq.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header = CsvHeader {
            flavor: self.flavor,
            half_span: self.grid.half_span,
            n: self.grid.n,
            params: self.params,
        };
        writeln!(w, "# {}", serde_json::to_string(&header)?)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["tau", "p", "q", "dp", "dq"])?;
        for i in 0..self.len() {
            out.write_record(&[
                self.tau[i].to_string(),
                self.p[i].to_string(),
                self.q[i].to_string(),
                self.dp[i].to_string(),
                self.dq[i].to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Inverse of [`Trajectory::write_csv`]; second derivatives are rebuilt
    /// from the equations of motion.
    pub fn read_csv<R: BufRead>(mut r: R) -> Result<Trajectory> {
        let mut first = String::new();
        r.read_line(&mut first)?;
        let json = first
            .strip_prefix("# ")
            .ok_or_else(|| Error::InvalidParameter("missing '# {json}' header line".into()))?;
        let header: CsvHeader = serde_json::from_str(json.trim())?;
        let grid = TauGrid::new(header.half_span, header.n)?;
        let mut rd = csv::Reader::from_reader(r);
        let mut cols: [Vec<f64>; 5] = Default::default();
        for rec in rd.records() {
            let rec = rec?;
            for (k, col) in cols.iter_mut().enumerate() {
                let v: f64 = rec
                    .get(k)
                    .ok_or_else(|| Error::InvalidParameter("short CSV record".into()))?
                    .parse()
                    .map_err(|e| Error::InvalidParameter(format!("bad number: {e}")))?;
                col.push(v);
            }
        }
        if cols[0].len() != grid.n {
            return Err(Error::InvalidParameter(format!(
                "header says {} rows, found {}",
                grid.n,
                cols[0].len()
            )));
        }
        let [tau, p, q, dp, dq] = cols;
        let (ddp, ddq) = accelerations(&header.params, &p, &q);
        Ok(Trajectory { flavor: header.flavor, grid, tau, p, q, dp, dq, ddp, ddq, params: header.params })
    }
}

/// Right-hand sides of the Euclidean equations of motion.
pub(crate) fn force(params: &SystemParams, p: f64, q: f64) -> (f64, f64) {
    let (wp2, wq2) = (params.b_p / params.a_p, params.b_q / params.a_q);
    let (mu, nu) = (params.mu(), params.nu());
    (
        wp2 * (0.5 * (p * p - 1.0) + mu * (q * q - 1.0)) * p,
        wq2 * (0.5 * (q * q - 1.0) + nu * (p * p - 1.0)) * q,
    )
}

pub(crate) fn accelerations(params: &SystemParams, p: &[f64], q: &[f64]) -> (Vec<f64>, Vec<f64>) {
    p.iter().zip(q).map(|(&x, &y)| force(params, x, y)).unzip()
}
