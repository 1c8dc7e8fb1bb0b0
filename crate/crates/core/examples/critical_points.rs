//! Validity check and the nine critical points for the parameters of the
//! potential sketch (b_p = 2, b_q = 1, c = 1/2).
use fourwell::model::{classify_critical_points, harmonic_frequencies, validate_params};
use fourwell::SystemParams;

fn main() -> fourwell::Result<()> {
    let p = SystemParams::new(1.0, 2.0, 1.0, 1.0, 0.5)?;
    let report = validate_params(&p)?;
    println!("four-well: {}  (Δ = b_p b_q − c² = {})", report.four_well, p.discriminant());
    for c in classify_critical_points(&p)? {
        println!("{:>9.5} {:>9.5}  {:<13} V = {:.6}", c.location.0, c.location.1, format!("{:?}", c.kind), c.value);
    }
    let (wp, wm) = harmonic_frequencies(&p)?;
    println!("normal modes at a minimum: ω₊ = {wp:.6}, ω₋ = {wm:.6}");

    let bad = SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.5)?;
    println!("c = 1.5: violated {:?}", validate_params(&bad)?.violated);
    Ok(())
}
