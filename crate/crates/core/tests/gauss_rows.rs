use wigner_lab::ensemble::{EnsembleSpec, LawFamily, VarianceProfile};
use wigner_lab::gauss::{corollary_lhs, row_sum_distribution, RowSubset};
use wigner_lab::metrics::{levy_distance, Normal};

fn spec(profile: VarianceProfile, family: LawFamily, seed: u64) -> EnsembleSpec {
    EnsembleSpec::new(profile, family).with_seed(seed)
}

#[test]
fn row_sums_are_sign_symmetric() {
    for family in [LawFamily::Gaussian, LawFamily::TwoPoint { p: 0.1 }, LawFamily::HeavyTailCubic] {
        let s = spec(VarianceProfile::uniform(40).unwrap(), family, 3);
        let f = row_sum_distribution(&s, 7, 4000).unwrap();
        let pairs: Vec<(f64, f64)> = f.atoms().iter().copied().zip(f.weights().iter().copied()).collect();
        let mean: f64 = pairs.iter().map(|(x, w)| x * w).sum();
        let var: f64 = pairs.iter().map(|(x, w)| (x - mean).powi(2) * w).sum();
        assert!(mean.abs() <= 3.0 * (var / 4000.0).sqrt(), "{family}: mean {mean}");
    }
}

#[test]
fn estimates_tighten_with_resamples() {
    let s = spec(VarianceProfile::uniform(64).unwrap(), LawFamily::Gaussian, 12);
    let rows: Vec<usize> = (0..15).collect();
    let coarse = corollary_lhs(&s, 100, RowSubset::Only(rows.clone())).unwrap();
    let fine = corollary_lhs(&s, 10_000, RowSubset::Only(rows)).unwrap();
    let median = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    assert!(median(&fine.levy) <= median(&coarse.levy) + 0.005);
}

#[test]
fn block_average_separates_from_uniform() {
    let n = 512;
    let gap = levy_distance(&Normal::new(0.5f64.sqrt()), &Normal::STANDARD);
    let block = spec(VarianceProfile::block(n).unwrap(), LawFamily::Gaussian, 5);
    let study = corollary_lhs(&block, 10_000, RowSubset::All).unwrap();
    assert!(study.average >= 0.02, "{}", study.average);
    assert!(study.average >= gap / 2.0 - 0.01, "{} vs {}", study.average, gap / 2.0);
    assert!(study.levy.iter().all(|l| (0.0..=1.0).contains(l)));
}
