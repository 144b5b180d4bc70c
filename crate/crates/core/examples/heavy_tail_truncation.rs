//! Infinite-variance entries: normalization, truncation levels and the
//! truncated, centered ensemble.
//!
//! cargo run --example heavy_tail_truncation

use wigner_lab::conditions::evaluate_conditions;
use wigner_lab::ensemble::{heavy_tail_constant, heavy_tail_scale, threshold_sequence, EnsembleSpec, LawFamily, VarianceProfile};
use wigner_lab::metrics::{kolmogorov_distance, Semicircle};
use wigner_lab::spectra::mean_esd;

fn heavy(n: usize) -> wigner_lab::Result<EnsembleSpec> {
    let s = heavy_tail_scale(n)?;
    Ok(EnsembleSpec::new(VarianceProfile::uniform(n)?.scaled(s * s * n as f64)?, LawFamily::HeavyTailCubic).with_seed(3))
}

fn main() -> wigner_lab::Result<()> {
    let ns = [100, 300, 900];
    // (1/n) sum_ij P(|w| > eps) = n s^2 / eps^2 once eps >= s
    let etas = threshold_sequence(&ns, |eps, n| {
        let s = heavy_tail_scale(n).unwrap();
        n as f64 * (s * s / (eps * eps)).min(1.0)
    });
    for (&n, &eta) in ns.iter().zip(&etas) {
        let raw = heavy(n)?;
        let cut = raw.clone().truncated(eta);
        let before = evaluate_conditions(&raw, &[0.5], &[])?;
        let after = evaluate_conditions(&cut, &[0.5], &[])?;
        println!(
            "n={n:<4} c_n={:.4} eta={eta:.3} weak_row_one {:.1e} -> {:.4}  D_K {:.4} -> {:.4}",
            heavy_tail_constant(n)?,
            before.weak_row_one,
            after.weak_row_one,
            kolmogorov_distance(&mean_esd(&raw, 4)?, &Semicircle),
            kolmogorov_distance(&mean_esd(&cut, 4)?, &Semicircle),
        );
    }
    Ok(())
}
