//! Quadratic fluctuations about the instantons.
//!
//! Operators here are 1D Schrödinger operators `−d²/dτ² + W(τ)` sampled on
//! the trajectory grid. Determinant ratios always compare against the free
//! operator with the same asymptotic plateau.

mod determinant;
mod rotated;
mod spectrum;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::classical::{q1_profile, TauGrid};
use crate::error::{Error, Result};
use crate::model::EqualParams;

pub use determinant::{
    chi_l_p, chi_l_r, chi_t_p, chi_t_r, chi_t_r_params, determinant_record, gelfand_yaglom,
    melting_probe, poschl_teller_ratio, primed_determinant, DeterminantRecord, MeltingFit,
    PRIMED_EPS,
};
pub use rotated::{curvature, rotated_operators, Curvature, OperatorBlock, RotatedBlocks};
pub use spectrum::lowest_transverse_eigenvalue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    GammaClosedForm,
    GelfandYaglom,
    RegulatedGY,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeterminantRatio {
    pub value: f64,
    /// Zero mode removed.
    pub primed: bool,
    pub method: Method,
}

/// `−d²/dτ² + W(τ)` on a symmetric grid.
#[derive(Debug, Clone)]
pub struct FluctuationOperator {
    pub grid: TauGrid,
    pub well: Vec<f64>,
    pub plateau: f64,
}

fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

impl FluctuationOperator {
    pub fn new(grid: TauGrid, well: Vec<f64>) -> Result<Self> {
        if well.len() != grid.n {
            return Err(Error::InvalidParameter(format!(
                "well has {} samples, grid has {}",
                well.len(),
                grid.n
            )));
        }
        let (l, r) = (well[0], well[grid.n - 1]);
        if !(l.is_finite() && r.is_finite()) || (l - r).abs() > 1e-9 * l.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "well must reach the same plateau at both ends ({l} vs {r})"
            )));
        }
        Ok(Self { grid, well, plateau: 0.5 * (l + r) })
    }

    pub fn from_fn(grid: TauGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let well = grid.points().into_iter().map(f).collect();
        Self::new(grid, well)
    }

    /// −d²/dx² + κ² − j(j+1)sech²x.
    pub fn poschl_teller(kappa: f64, j: f64, grid: TauGrid) -> Result<Self> {
        let depth = j * (j + 1.0);
        Self::from_fn(grid, |x| kappa * kappa - depth * sech2(x))
    }

    /// Diagonal longitudinal operator ω₊² − (3/2)ω₊² sech²(ω₊τ/2).
    pub fn diagonal_longitudinal(eq: &EqualParams, grid: TauGrid) -> Result<Self> {
        let w = eq.omega_plus();
        Self::from_fn(grid, |t| w * w * (1.0 - 1.5 * sech2(0.5 * w * t)))
    }

    /// Diagonal transverse operator ω₋² − (3/2 − μ) sech²(ω₊τ/2).
    pub fn diagonal_transverse(eq: &EqualParams, grid: TauGrid) -> Result<Self> {
        let (wp, wm, mu) = (eq.omega_plus(), eq.omega_minus(), eq.mu);
        Self::from_fn(grid, |t| wm * wm - (1.5 - mu) * sech2(0.5 * wp * t))
    }

    /// Edge longitudinal operator at O(μ): 1 − (3/2)sech²(τ/2).
    pub fn edge_longitudinal(grid: TauGrid) -> Result<Self> {
        Self::from_fn(grid, |t| 1.0 - 1.5 * sech2(0.5 * t))
    }

    /// Edge transverse operator at O(μ): 1 − μ(sech²(τ/2) + 3q₁).
    pub fn edge_transverse(mu: f64, grid: TauGrid) -> Result<Self> {
        Self::from_fn(grid, |t| 1.0 - mu * (sech2(0.5 * t) + 3.0 * q1_profile(t)))
    }

    pub fn free(plateau: f64, grid: TauGrid) -> Result<Self> {
        Self::new(grid, vec![plateau; grid.n])
    }

    pub fn tau(&self) -> Vec<f64> {
        self.grid.points()
    }

    /// Largest |W − plateau| over the first and last sample.
    pub fn tail_deviation(&self) -> f64 {
        (self.well[0] - self.plateau).abs().max((self.well[self.grid.n - 1] - self.plateau).abs())
    }

    /// CSV with columns tau,W.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["tau", "W"])?;
        for (t, v) in self.tau().iter().zip(&self.well) {
            out.write_record(&[t.to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_mismatch_rejected() {
        let g = TauGrid::new(20.0, 101).unwrap();
        assert!(FluctuationOperator::from_fn(g, |t| t).is_err());
        let op = FluctuationOperator::poschl_teller(2.0, 1.0, g).unwrap();
        assert!((op.plateau - 4.0).abs() < 1e-15);
    }

    #[test]
    fn edge_transverse_source_is_negative() {
        // sech²(τ/2) + 3q₁ < 0 everywhere, with integral −8.
        let g = TauGrid::default_for(1.0);
        let op = FluctuationOperator::edge_transverse(1.0, g).unwrap();
        assert!(op.well.iter().all(|&w| w > 1.0));
        let u: Vec<f64> = op.well.iter().map(|w| w - 1.0).collect();
        assert!((crate::linalg::simpson(&u, g.h()) - 8.0).abs() < 1e-8);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = TauGrid::new(5.0, 65).unwrap();
        let op = FluctuationOperator::free(1.0, g).unwrap();
        let mut buf = Vec::new();
        op.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("tau,W\n"));
        assert_eq!(s.lines().count(), 66);
    }
}
