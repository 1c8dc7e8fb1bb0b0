//! Semiclassical splittings against the 2D grid eigensolver.
//!
//!     cargo run --release --example grid_splittings -- -0.2
use fourwell::schrodinger::{convergence_sweep, Grid2D};

fn main() -> fourwell::Result<()> {
    let mu: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(-0.2);
    let rows = convergence_sweep(mu, &[4.0, 6.0, 8.0, 10.0], Grid2D::default(), 0)?;
    println!("{:>6} {:>13} {:>13} {:>8} {:>13} {:>13} {:>8} {:>9}", "λ", "dE_P semi", "dE_P grid", "dev", "dE_R semi", "dE_R grid", "dev", "R/P grid");
    for r in rows {
        println!(
            "{:>6} {:>13.6e} {:>13.6e} {:>8.4} {:>13.6e} {:>13.6e} {:>8.4} {:>9.4}",
            r.lambda, r.de_p_semi, r.de_p_num, r.dev_p, r.de_r_semi, r.de_r_num, r.dev_r, r.de_r_num / r.de_p_num
        );
    }
    Ok(())
}
