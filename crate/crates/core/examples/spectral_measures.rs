//! Eigenvalues with both solvers, step measures and their distances.
//!
//! cargo run --example spectral_measures

use wigner_lab::ensemble::{EnsembleSpec, LawFamily, SymmetryClass, VarianceProfile};
use wigner_lab::metrics::{kolmogorov_distance, levy_distance, measure_moment, Semicircle};
use wigner_lab::spectra::{eigenvalues_with, esd, EigenSolver, StepMeasure};

fn main() -> wigner_lab::Result<()> {
    let spec = EnsembleSpec::new(VarianceProfile::uniform(300)?, LawFamily::Gaussian)
        .with_class(SymmetryClass::Complex)
        .with_seed(5);
    let m = spec.sample(0);
    let fast = eigenvalues_with(&m, EigenSolver::Faer)?;
    let slow = eigenvalues_with(&m, EigenSolver::Reference)?;
    let gap = fast
        .eigenvalues()
        .iter()
        .zip(slow.eigenvalues())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("largest eigenvalue {:.5}, solver gap {gap:.1e}", fast.eigenvalues()[0]);

    let mu = esd(&fast)?;
    println!("second moment {:.5}, fourth {:.5}", measure_moment(&mu, 2), measure_moment(&mu, 4));
    println!("D_K {:.5}  L {:.5}", kolmogorov_distance(&mu, &Semicircle), levy_distance(&mu, &Semicircle));

    let a = StepMeasure::from_weighted([(-1.0, 0.5), (1.0, 0.5)])?;
    let b = StepMeasure::point_mass(0.0);
    println!("two atoms vs zero: D_K {} L {}", kolmogorov_distance(&a, &b), levy_distance(&a, &b));
    println!("{}", serde_json::to_string(&a)?);
    Ok(())
}
