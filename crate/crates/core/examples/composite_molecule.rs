//! A diatomic molecule in a double well: rigid rod, then a stiff bond mapped
//! onto the four-well parameters.
use fourwell::composite::{nonrigid_effective_potential, rigid_effective_potential, to_system_params, MoleculeParams};
use fourwell::model::validate_params;

fn main() -> fourwell::Result<()> {
    let (y0, k) = rigid_effective_potential(1.0, 1.0, 1.0, 1.0)?;
    println!("rigid rod: y0 = {y0}, K = {k}");
    if let Err(e) = rigid_effective_potential(1.0, 1.0, 1.0, 2.0 / 3f64.sqrt()) {
        println!("L = 2a/√3: {e}");
    }

    for omega_bond in [5.0, 10.0, 40.0] {
        let mol = MoleculeParams::new(1.0, 1.0, omega_bond, 1.0, 0.8)?;
        let eff = nonrigid_effective_potential(mol)?;
        let sys = to_system_params(&eff)?;
        println!(
            "Ω = {omega_bond:>4}: x0 = {:.6}, y0 = {:.6}, C = {:.6}; μ = {:.5}, ν = {:.5}, four-well {}",
            eff.x0,
            eff.y0,
            eff.c_offset,
            sys.mu(),
            sys.nu(),
            validate_params(&sys)?.four_well
        );
    }
    Ok(())
}
