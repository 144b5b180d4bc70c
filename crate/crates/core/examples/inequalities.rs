//! Rank and perturbation inequalities, Bernstein's bound and the two
//! concentration experiments.
//!
//! cargo run --example inequalities

use wigner_lab::concentration::{
    bernstein_bound, property_suite, spectral_concentration_experiment,
    truncation_survival_experiment, Inequality, PiecewiseLinear,
};
use wigner_lab::ensemble::{EnsembleSpec, LawFamily, VarianceProfile};

fn main() -> wigner_lab::Result<()> {
    for ineq in [Inequality::Rank, Inequality::Perturbation] {
        let s = property_suite(ineq, 16, 200, 1)?;
        println!("{ineq:?}: {} violations in {} cases, worst lhs - rhs {:.3e}", s.violations, s.cases, s.worst_gap);
    }
    println!("bernstein(2, 1) = {:.6}", bernstein_bound(2.0, 1.0)?);

    let spec = EnsembleSpec::new(VarianceProfile::uniform(200)?, LawFamily::Rademacher).with_seed(4);
    let table = spectral_concentration_experiment(&spec, &PiecewiseLinear::ramp(-0.1, 0.1)?, &[0.02, 0.05, 0.1], 200)?;
    table.write_csv(std::io::stdout().lock())?;

    let gauss = EnsembleSpec::new(VarianceProfile::uniform(200)?, LawFamily::Gaussian).with_seed(4);
    let survival = truncation_survival_experiment(&gauss, 200f64.powf(-0.25), &[0.05, 0.1, 0.2], 200)?;
    survival.write_csv(std::io::stdout().lock())?;
    Ok(())
}
