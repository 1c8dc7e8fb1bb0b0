//! Four-level spectrum of the three-flavor instanton gas, and the amplitude
//! matrix against a direct matrix exponential.
use fourwell::gas::{amplitude_matrix, amplitudes, spectrum, sweep, InstantonWeights};
use fourwell::EqualParams;

fn main() -> fourwell::Result<()> {
    for mu in [-0.2, 0.2] {
        let w = InstantonWeights::from_params(&EqualParams::new(8.0, mu)?)?;
        let s = spectrum(&w);
        println!(
            "μ = {mu:+}: K = {:.4e}, K_R = {:.4e}{}  dE_P = {:.4e}, dE_R = {:.4e}, ratio {:.4}",
            w.k_p,
            w.k_r,
            if w.k_r_unstable { " (unstable, dropped)" } else { "" },
            s.de_p,
            s.de_r,
            s.de_r / s.de_p
        );
    }

    let w = InstantonWeights::new(0.3, 0.3, 0.1);
    let t = 2.5;
    let a = amplitudes(&w, t);
    let m = amplitude_matrix(&w, t);
    let scale = a.ln_scale.exp();
    println!("⟨a|a⟩: hyperbolic {:.12}, exp(KT) {:.12}", a.aa * scale, m[(0, 0)]);
    println!("⟨a|c⟩: hyperbolic {:.12}, exp(KT) {:.12}", a.ac * scale, m[(0, 2)]);

    let rows = sweep(&[-0.2, -0.1], &[4.0, 8.0, 12.0])?;
    fourwell::gas::write_sweep_csv(&rows, std::io::stdout())?;
    Ok(())
}
