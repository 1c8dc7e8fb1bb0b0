//! Real-time occupations of the four wells after preparing well a; the
//! diagonal channel modulates P_a and P_c at frequency 2K_R.
use fourwell::gas::{evolved_probabilities, lifetime, survival_probabilities, InstantonWeights};

fn main() -> fourwell::Result<()> {
    let w = InstantonWeights::new(1.0, 1.0, 0.15);
    println!("lifetime τ = {:.6}", lifetime(&w)?);
    println!("{:>6} {:>9} {:>9} {:>9} {:>9} {:>10}", "t", "P_a", "P_b", "P_c", "P_d", "oracle");
    for i in 0..=20 {
        let t = 0.25 * i as f64;
        let p = survival_probabilities(&w, t)?;
        let o = evolved_probabilities(&w, t);
        let dev = p.iter().zip(o).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("{t:>6.2} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {dev:>10.1e}", p[0], p[1], p[2], p[3]);
    }
    Ok(())
}
