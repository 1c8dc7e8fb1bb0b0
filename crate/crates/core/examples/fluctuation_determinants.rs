//! Gelfand–Yaglom determinant ratios against their Gamma-function closed
//! forms, for Pöschl–Teller wells and the diagonal instanton.
use fourwell::classical::{Flavor, TauGrid};
use fourwell::fluctuations::{
    chi_l_r, chi_t_r, determinant_record, gelfand_yaglom, poschl_teller_ratio, primed_determinant,
    FluctuationOperator, Method,
};
use fourwell::EqualParams;

fn main() -> fourwell::Result<()> {
    let grid = TauGrid::new(20.0, 8001)?;
    for (kappa, j) in [(3.0, 1.0), (2.5, 1.7), (4.0, 2.2)] {
        let op = FluctuationOperator::poschl_teller(kappa, j, grid)?;
        println!(
            "κ = {kappa}, j = {j}: Gamma {:.10}  GY {:.10}",
            poschl_teller_ratio(kappa, j)?.value,
            gelfand_yaglom(&op, 0.0)?
        );
    }
    let kink = FluctuationOperator::poschl_teller(2.0, 2.0, grid)?;
    println!("kink det′/det₀ = {:.8} (1/48 = {:.8})", primed_determinant(&kink)?.value, 1.0 / 48.0);

    for mu in [-0.1, -0.2, -0.3] {
        let eq = EqualParams::new(1.0, mu)?;
        let d = determinant_record(&eq, Flavor::R, Method::GelfandYaglom)?;
        println!(
            "μ = {mu}: χ_L^R {:.6} vs {:.6}, χ_T^R {:.6} vs {:.6}",
            d.chi_l,
            chi_l_r(&eq)?,
            d.chi_t,
            chi_t_r(mu)?
        );
    }
    Ok(())
}
