//! Mean ESD of Gaussian Wigner matrices approaching the semicircle.
//!
//! cargo run --example semicircle_convergence

use wigner_lab::ensemble::{EnsembleSpec, LawFamily, VarianceProfile};
use wigner_lab::metrics::{kolmogorov_distance, levy_distance, Semicircle};
use wigner_lab::spectra::mean_esd;

fn main() -> wigner_lab::Result<()> {
    println!("{:>6} {:>10} {:>10}", "n", "D_K", "Levy");
    for n in [100, 200, 400, 800] {
        let spec = EnsembleSpec::new(VarianceProfile::uniform(n)?, LawFamily::Gaussian).with_seed(1);
        let mu = mean_esd(&spec, 8)?;
        println!(
            "{n:>6} {:>10.5} {:>10.5}",
            kolmogorov_distance(&mu, &Semicircle),
            levy_distance(&mu, &Semicircle)
        );
    }
    Ok(())
}
