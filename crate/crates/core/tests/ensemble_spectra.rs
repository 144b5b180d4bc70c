use approx::assert_relative_eq;
use proptest::prelude::*;

use wigner_lab::ensemble::{
    EnsembleSpec, EntryLaw, LawFamily, MatrixSample, SymmetryClass, VarianceProfile,
};
use wigner_lab::spectra::{eigenvalues, eigenvalues_with, EigenSolver};

fn family() -> impl Strategy<Value = LawFamily> {
    prop_oneof![
        Just(LawFamily::Gaussian),
        Just(LawFamily::Rademacher),
        (0.05f64..0.95).prop_map(|p| LawFamily::TwoPoint { p }),
        Just(LawFamily::HeavyTailCubic),
    ]
}

fn profile() -> impl Strategy<Value = VarianceProfile> {
    (1usize..14, 0usize..3).prop_map(|(n, kind)| match kind {
        0 => VarianceProfile::uniform(n).unwrap(),
        1 => VarianceProfile::checkerboard(n).unwrap(),
        _ => VarianceProfile::block(n).unwrap(),
    })
}

fn class() -> impl Strategy<Value = SymmetryClass> {
    prop_oneof![Just(SymmetryClass::Real), Just(SymmetryClass::Complex)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_are_hermitian_and_reproducible(
        p in profile(), f in family(), c in class(), seed in any::<u64>(), trial in 0u64..1000,
    ) {
        let spec = EnsembleSpec::new(p, f).with_class(c).with_seed(seed);
        let a = spec.sample(trial);
        prop_assert!(a.check_hermitian().is_ok());
        for i in 0..a.n() {
            prop_assert_eq!(a.get(i, i).im, 0.0);
        }
        prop_assert_eq!(&a, &spec.sample(trial));
    }

    #[test]
    fn spectrum_matches_trace_and_frobenius(
        p in profile(), f in family(), c in class(), seed in any::<u64>(),
    ) {
        let spec = EnsembleSpec::new(p, f).with_class(c).with_seed(seed);
        let m = spec.sample(0);
        let s = eigenvalues(&m).unwrap();
        let scale = 1.0 + m.frobenius_sq();
        prop_assert!((s.power_sum(1) - m.trace()).abs() <= 1e-10 * scale);
        prop_assert!((s.power_sum(2) - m.frobenius_sq()).abs() <= 1e-10 * scale);
        let ev = s.eigenvalues();
        prop_assert!(ev.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn solvers_agree(p in profile(), c in class(), seed in any::<u64>()) {
        let m = EnsembleSpec::new(p, LawFamily::Gaussian).with_class(c).with_seed(seed).sample(3);
        let a = eigenvalues_with(&m, EigenSolver::Faer).unwrap();
        let b = eigenvalues_with(&m, EigenSolver::Reference).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn bounded_laws_stay_in_support(n in 1usize..12, seed in any::<u64>()) {
        let spec = EnsembleSpec::new(VarianceProfile::uniform(n).unwrap(), LawFamily::Rademacher)
            .with_seed(seed);
        let m = spec.sample(0);
        let s = 1.0 / (n as f64).sqrt();
        prop_assert!(m.max_abs() <= s * (1.0 + 1e-15));
    }

    #[test]
    fn truncation_centers_and_bounds(
        f in family(), scale in 0.01f64..2.0, eta in 0.01f64..0.5, c in class(),
    ) {
        let law = f.law(scale, c).truncate_center(eta).unwrap();
        prop_assert!(law.mean().norm() <= 1e-12 * (1.0 + scale));
        if let Some(r) = law.radius() {
            prop_assert!(r <= 2.0 * eta * (1.0 + 1e-12));
        }
        prop_assert!(law.second_moment().is_finite());
    }
}

#[test]
fn complex_entries_split_variance() {
    let spec = EnsembleSpec::new(VarianceProfile::uniform(60).unwrap(), LawFamily::Gaussian)
        .with_class(SymmetryClass::Complex)
        .with_seed(4);
    let (mut re, mut im, mut count) = (0.0, 0.0, 0);
    for t in 0..40 {
        let m = spec.sample(t);
        for i in 0..60 {
            for j in i + 1..60 {
                let w = m.get(i, j);
                re += w.re * w.re;
                im += w.im * w.im;
                count += 1;
            }
        }
    }
    let expect = 0.5 / 60.0;
    assert_relative_eq!(re / count as f64, expect, max_relative = 0.02);
    assert_relative_eq!(im / count as f64, expect, max_relative = 0.02);
}

#[test]
fn gaussian_second_moment_monte_carlo() {
    let spec = EnsembleSpec::new(VarianceProfile::uniform(100).unwrap(), LawFamily::Gaussian).with_seed(9);
    let draws: Vec<f64> = (0..1000).map(|t| spec.sample(t).get(0, 1).norm_sqr()).collect();
    let mean = draws.iter().sum::<f64>() / 1000.0;
    let sd = (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / 999.0).sqrt();
    assert!((mean - 0.01).abs() <= 3.0 * sd / 1000f64.sqrt());
}

#[test]
fn zero_law_gives_zero_matrix() {
    let spec = EnsembleSpec::new(VarianceProfile::uniform(7).unwrap(), LawFamily::Zero);
    assert_eq!(spec.sample(5), MatrixSample::zeros(7));
    assert!(EntryLaw::zero().is_zero());
}
