//! χ_T^R across the stability window and its essential singularity as
//! μ → −1/2, ln χ_T ≈ A/√ε with A → 4 ln 2.
use fourwell::fluctuations::{chi_t_r, lowest_transverse_eigenvalue, melting_probe, FluctuationOperator};
use fourwell::classical::TauGrid;
use fourwell::EqualParams;

fn main() -> fourwell::Result<()> {
    for i in 1..=9 {
        let mu = -0.05 * i as f64;
        println!("μ = {mu:+.2}  χ_T^R = {:.6e}", chi_t_r(mu)?);
    }
    match chi_t_r(0.0) {
        Err(e) => println!("μ = 0: {e}"),
        Ok(v) => println!("μ = 0: {v}"),
    }
    let fit = melting_probe(&[1e-2, 4e-3, 1e-3])?;
    println!("A = {:.6}, 4 ln 2 = {:.6}", fit.a, 4.0 * 2f64.ln());

    // The lowest transverse eigenvalue changes sign at μ = 0.
    for mu in [-0.1, -0.01, 0.01, 0.1] {
        let eq = EqualParams::new(1.0, mu)?;
        let op = FluctuationOperator::diagonal_transverse(&eq, TauGrid::default_for(eq.omega_plus()))?;
        println!("μ = {mu:+}: λ₀ = {:+.6e}", lowest_transverse_eigenvalue(&op));
    }
    Ok(())
}
