use proptest::prelude::*;

use wigner_lab::concentration::{bernstein_bound, property_suite, rank_bound_check, Inequality};
use wigner_lab::conditions::{
    default_eps_grid, evaluate_conditions, select_good_rows, tail_probability,
    truncated_second_moment, DEFAULT_DELTA_GRID,
};
use wigner_lab::ensemble::{EnsembleSpec, LawFamily, MatrixSample, SymmetryClass, VarianceProfile};

fn family() -> impl Strategy<Value = LawFamily> {
    prop_oneof![
        Just(LawFamily::Gaussian),
        Just(LawFamily::Rademacher),
        (0.05f64..0.95).prop_map(|p| LawFamily::TwoPoint { p }),
        Just(LawFamily::HeavyTailCubic),
    ]
}

fn spec() -> impl Strategy<Value = EnsembleSpec> {
    (2usize..40, 0usize..3, family(), 0.1f64..3.0).prop_map(|(n, kind, f, scale)| {
        let p = match kind {
            0 => VarianceProfile::uniform(n),
            1 => VarianceProfile::checkerboard(n),
            _ => VarianceProfile::block(n),
        }
        .unwrap()
        .scaled(scale)
        .unwrap();
        EnsembleSpec::new(p, f)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functional_shapes(s in spec()) {
        let eps = default_eps_grid();
        let r = evaluate_conditions(&s, &eps, &DEFAULT_DELTA_GRID).unwrap();
        // eps grid is decreasing, so values must be nondecreasing along it
        if let Some(l) = &r.lindeberg {
            prop_assert!(l.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        }
        prop_assert!(r.weak_lindeberg.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        prop_assert!(r.margin_curve.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        prop_assert!(r.weak_zero >= 0.0 && r.weak_row_one >= 0.0);
        let full = evaluate_conditions(&s, &[], &[1.0]).unwrap();
        let total: f64 = full.truncated_row_sums.iter().sum::<f64>() / s.n() as f64;
        prop_assert!((full.margin_curve[0] - total).abs() <= 1e-12 * (1.0 + total));
    }

    #[test]
    fn termwise_markov(f in family(), scale in 0.01f64..3.0, e in 0.01f64..4.0) {
        let law = f.law(scale, SymmetryClass::Real);
        let tail = law.tail_second_moment(e);
        prop_assert!(tail >= e * e * tail_probability(&law, e).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn bounded_laws_agree(n in 2usize..30) {
        let s = EnsembleSpec::new(VarianceProfile::block(n).unwrap(), LawFamily::Rademacher);
        let r = evaluate_conditions(&s, &[0.5], &[0.1]).unwrap();
        prop_assert_eq!(r.row_one, Some(r.weak_row_one));
    }

    #[test]
    fn good_rows_markov(values in prop::collection::vec(0.0f64..2.0, 1..60), eps in 0.05f64..1.5) {
        let k = select_good_rows(&values, eps).unwrap();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        prop_assert!(!k.is_empty());
        prop_assert!(k.len() as f64 / n >= 1.0 - mean / eps - 1e-12);
    }

    #[test]
    fn bernstein_decreases(s2 in 0.0f64..5.0, x in 0.01f64..10.0, dx in 0.01f64..2.0) {
        prop_assert!(bernstein_bound(x + dx, s2).unwrap() < bernstein_bound(x, s2).unwrap());
    }
}

#[test]
fn closed_form_examples() {
    let heavy = LawFamily::HeavyTailCubic.law(1.0, SymmetryClass::Real);
    assert!((truncated_second_moment(&heavy, std::f64::consts::E).unwrap() - 2.0).abs() < 1e-12);
    let g = LawFamily::Gaussian.law(0.3, SymmetryClass::Real);
    assert!((tail_probability(&g, 0.3).unwrap() - 0.3173105079).abs() < 1e-9);
    let s = EnsembleSpec::new(VarianceProfile::uniform(100).unwrap(), LawFamily::Gaussian);
    let r = evaluate_conditions(&s, &[0.5], &[]).unwrap();
    assert!((r.lindeberg.unwrap()[0] - 1.5440498291e-5).abs() < 1e-13);
}

#[test]
fn rank_two_perturbations_move_little() {
    let spec = EnsembleSpec::new(VarianceProfile::uniform(30).unwrap(), LawFamily::Gaussian).with_seed(8);
    for t in 0..100 {
        let a = spec.sample(t);
        let mut d = vec![0.0; 900];
        d[0] = 3.0;
        d[31] = -2.0;
        let b = a.sub(&MatrixSample::from_real(30, d).unwrap()).unwrap();
        let c = rank_bound_check(&a, &b).unwrap();
        assert!(c.satisfied && c.lhs <= 2.0 / 30.0 + 1e-12);
    }
}

#[test]
fn suites_have_no_violations() {
    for ineq in [Inequality::Rank, Inequality::Perturbation] {
        let s = property_suite(ineq, 20, 200, 77).unwrap();
        assert_eq!(s.violations, 0);
    }
}
