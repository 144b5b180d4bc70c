//! Condition functionals for the built-in variance profiles. The block
//! profile keeps bounded row sums yet fails the row-sum criterion.
//!
//! cargo run --example variance_profiles

use wigner_lab::conditions::{evaluate_conditions, DEFAULT_DELTA_GRID};
use wigner_lab::ensemble::{EnsembleSpec, LawFamily, ProfileKind, VarianceProfile};

fn main() -> wigner_lab::Result<()> {
    let n = 400;
    for kind in [ProfileKind::Uniform, ProfileKind::Checkerboard, ProfileKind::Block] {
        let spec = EnsembleSpec::new(VarianceProfile::build(kind, n)?, LawFamily::Gaussian);
        let r = evaluate_conditions(&spec, &[0.5, 0.1], &DEFAULT_DELTA_GRID)?;
        println!(
            "{:<12} row_one={:.6} row_bdd_sup={:.4} lindeberg(0.1)={:.3e} margin(0.01)={:.4}",
            kind.to_string(),
            r.row_one.unwrap_or(f64::NAN),
            r.row_bdd_sup.unwrap_or(f64::NAN),
            r.lindeberg.as_ref().map_or(f64::NAN, |l| l[1]),
            r.margin_curve[3],
        );
    }
    println!("block: 1/4 - 1/(2n) = {:.6}", 0.25 - 0.5 / n as f64);
    Ok(())
}
