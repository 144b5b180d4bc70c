//! Row sums with random signs against the standard normal law.
//!
//! cargo run --example gaussian_rows

use wigner_lab::ensemble::{heavy_tail_scale, EnsembleSpec, LawFamily, VarianceProfile};
use wigner_lab::gauss::{corollary_lhs, lindeberg_feller_check, RowSubset};
use wigner_lab::metrics::{levy_distance, Normal};

fn main() -> wigner_lab::Result<()> {
    let n = 128;
    let uniform = EnsembleSpec::new(VarianceProfile::uniform(n)?, LawFamily::Gaussian).with_seed(2);
    let block = EnsembleSpec::new(VarianceProfile::block(n)?, LawFamily::Gaussian).with_seed(2);
    println!("uniform average L = {:.4}", corollary_lhs(&uniform, 2000, RowSubset::All)?.average);
    let study = corollary_lhs(&block, 2000, RowSubset::Only(vec![0, n - 1]))?;
    println!("block top row L = {:.4}, bottom row L = {:.4}", study.levy[0], study.levy[1]);
    println!("L(N(0,1/2), N(0,1)) = {:.5}", levy_distance(&Normal::new(0.5f64.sqrt()), &Normal::STANDARD));

    let report = lindeberg_feller_check(
        |n| {
            let s = heavy_tail_scale(n)?;
            Ok(EnsembleSpec::new(VarianceProfile::uniform(n)?.scaled(s * s * n as f64)?, LawFamily::HeavyTailCubic))
        },
        &[50, 200, 800],
        &[0.5, 0.1],
        2000,
    )?;
    for r in &report.rows {
        println!("heavy n={:<4} c_n={:.6} lindeberg={:?} ks={:?}", r.n, r.truncated_variance, r.lindeberg, r.ks_to_normal);
    }
    println!("trend: {:?}", report.trend);
    Ok(())
}
