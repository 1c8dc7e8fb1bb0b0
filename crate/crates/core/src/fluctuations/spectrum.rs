use super::FluctuationOperator;
use crate::linalg::tridiagonal_eigenvalues_lowest;

fn lowest_on(well: &[f64], h: f64) -> f64 {
    // Interior nodes only: Dirichlet ends.
    let inner = &well[1..well.len() - 1];
    let ih2 = 1.0 / (h * h);
    let diag: Vec<f64> = inner.iter().map(|w| 2.0 * ih2 + w).collect();
    let off = vec![-ih2; inner.len() - 1];
    tridiagonal_eigenvalues_lowest(&diag, &off, 1)[0]
}

/// Lowest Dirichlet eigenvalue of −d²/dτ² + W.
///
/// Second-order differences on the operator grid and on every other node,
/// combined by one Richardson step.
pub fn lowest_transverse_eigenvalue(op: &FluctuationOperator) -> f64 {
    let h = op.grid.h();
    let fine = lowest_on(&op.well, h);
    let coarse_well: Vec<f64> = op.well.iter().step_by(2).cloned().collect();
    let coarse = lowest_on(&coarse_well, 2.0 * h);
    (4.0 * fine - coarse) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::TauGrid;
    use crate::model::EqualParams;

    #[test]
    fn poschl_teller_bound_states() {
        let g = TauGrid::new(20.0, 8001).unwrap();
        for (kappa, j) in [(2.0, 2.0), (2.0, 1.0), (3.0, 1.5), (1.0, 2.5)] {
            let op = FluctuationOperator::poschl_teller(kappa, j, g).unwrap();
            let want = kappa * kappa - j * j;
            let got = lowest_transverse_eigenvalue(&op);
            assert!((got - want).abs() < 1e-4, "κ={kappa} j={j}: {got}");
        }
    }

    #[test]
    fn diagonal_transverse_marginal_at_zero() {
        let eq = EqualParams::new(1.0, 0.0).unwrap();
        let op = FluctuationOperator::diagonal_transverse(&eq, TauGrid::default_for(1.0)).unwrap();
        assert!(lowest_transverse_eigenvalue(&op).abs() < 1e-6);
    }

    #[test]
    fn diagonal_window_sign_change() {
        let lowest = |mu: f64| {
            let eq = EqualParams::new(1.0, mu).unwrap();
            let g = TauGrid::default_for(eq.omega_plus());
            lowest_transverse_eigenvalue(&FluctuationOperator::diagonal_transverse(&eq, g).unwrap())
        };
        assert!(lowest(-0.1) > 0.0 && lowest(-0.4) > 0.0);
        assert!(lowest(0.1) < 0.0);

        // λ₀/ω₊² = aμ + bμ² + cμ³ + …, with a = −4/5 and b/a = −136/100.
        let mus: [f64; 5] = [-0.01, -0.02, -0.03, -0.04, -0.05];
        let m = nalgebra::DMatrix::from_fn(mus.len(), 3, |i, j| mus[i].powi(j as i32 + 1));
        let y = nalgebra::DVector::from_iterator(
            mus.len(),
            mus.iter().map(|&mu| lowest(mu) / (1.0 + 2.0 * mu)),
        );
        let coef = m.svd(true, true).solve(&y, 1e-14).unwrap();
        let (a, b) = (coef[0], coef[1]);
        assert!((a + 0.8).abs() < 1e-3, "{a}");
        assert!((b / a + 1.36).abs() < 0.02, "{}", b / a);
    }
}
