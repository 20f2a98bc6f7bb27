mod common;

use common::{close, int_sample, law, nonconstant_law, real_law};
use lawinv::laws::{dilate, ssd_dominated, DiscreteLaw, UniformSample};
use lawinv::riskmeasures::{adjusted_es_sup, crm_eval, es, phi_example, ConsistentRiskMeasure};
use proptest::prelude::*;

fn centered(x: &DiscreteLaw<f64>) -> DiscreteLaw<f64> {
    x.shifted(-x.mean())
}

fn crm() -> impl Strategy<Value = ConsistentRiskMeasure<f64>> {
    prop::collection::vec(law(4), 1..=3).prop_map(|g| ConsistentRiskMeasure::new(g).unwrap())
}

/// A sample, a partition of its indices and nonnegative decrements: the
/// block averages minus the decrements are dominated by the sample.
fn dominated_pair() -> impl Strategy<Value = (UniformSample<f64>, UniformSample<f64>)> {
    (2usize..=6)
        .prop_flat_map(|n| (int_sample(n), prop::collection::vec(0usize..3, n), prop::collection::vec(0u8..3, n)))
        .prop_map(|(x, labels, dec)| {
            let blocks: Vec<Vec<usize>> = (0..3)
                .map(|b| (0..labels.len()).filter(|&i| labels[i] == b).collect::<Vec<_>>())
                .filter(|b| !b.is_empty())
                .collect();
            let avg = dilate(&x, &blocks).unwrap();
            let y: Vec<f64> = avg.values().iter().zip(&dec).map(|(v, d)| v - f64::from(*d)).collect();
            (x, UniformSample::new(y).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn es_is_nondecreasing_in_the_level(x in real_law(6), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(es(&x, lo).unwrap() <= es(&x, hi).unwrap() + 1e-10);
    }

    #[test]
    fn es_of_centered_law_is_positive(x in nonconstant_law(6)) {
        let u = centered(&x);
        for k in 1..100 {
            prop_assert!(es(&u, f64::from(k) / 100.0).unwrap() > 0.0);
        }
    }

    #[test]
    fn es_stays_close_to_the_mean_for_small_levels(x in real_law(8), frac in 0.0f64..=1.0) {
        for q in [0.01, 0.05, 0.1] {
            let p = frac * q;
            let bound = 2.0 * q / (1.0 - q) * x.max_abs();
            prop_assert!((es(&x, p).unwrap() - x.mean()).abs() <= bound + 1e-12);
        }
    }

    #[test]
    fn crm_is_cash_additive(phi in crm(), x in real_law(6), c in -10.0f64..10.0) {
        prop_assert!(close(crm_eval(&phi, &x.shifted(c)), crm_eval(&phi, &x) + c, 1e-10));
    }

    #[test]
    fn crm_respects_ssd(phi in crm(), (x, y) in dominated_pair()) {
        let (xl, yl) = (x.law(), y.law());
        prop_assert!(ssd_dominated(&xl, &yl));
        prop_assert!(crm_eval(&phi, &yl) <= crm_eval(&phi, &xl) + 1e-10);
    }

    #[test]
    fn crm_ignores_the_arrangement(
        phi in crm(),
        (x, perm) in (1usize..=6).prop_flat_map(|n| (int_sample(n), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())),
    ) {
        let y = x.permuted(&perm).unwrap();
        prop_assert_eq!(crm_eval(&phi, &x.law()), crm_eval(&phi, &y.law()));
    }

    #[test]
    fn normalised_crm_is_star_shaped(g in law(4), x in real_law(6), lambda in 0.0f64..=1.0) {
        let phi = ConsistentRiskMeasure::new(vec![centered(&g)]).unwrap();
        prop_assert!(crm_eval(&phi, &DiscreteLaw::point(0.0)).abs() <= 1e-12);
        prop_assert!(crm_eval(&phi, &x.affine(lambda, 0.0)) <= lambda * crm_eval(&phi, &x) + 1e-10);
    }

    #[test]
    fn adjusted_sup_dominates_its_endpoints(x in real_law(6), y in real_law(6)) {
        let s = adjusted_es_sup(&x, &y);
        prop_assert!(s >= es(&x, 0.0).unwrap() - es(&y, 0.0).unwrap() - 1e-10);
        prop_assert!(s >= x.max_value() - y.max_value() - 1e-10);
    }

    #[test]
    fn adjusted_sup_dominates_a_fine_level_grid(x in real_law(6), y in real_law(6)) {
        let s = adjusted_es_sup(&x, &y);
        for k in 0..=200 {
            let p = f64::from(k) / 200.0;
            prop_assert!(s >= es(&x, p).unwrap() - es(&y, p).unwrap() - 1e-10);
        }
    }
}

#[test]
fn phi_example_is_quasiconvex_on_three_points() {
    let grid: Vec<[f64; 3]> = (0..125)
        .map(|k| [k % 5, (k / 5) % 5, k / 25].map(|v| f64::from(v) - 2.0))
        .collect();
    let phi = |v: &[f64; 3]| phi_example(&DiscreteLaw::uniform(v).unwrap());
    for x in &grid {
        for y in &grid {
            let mid = [0, 1, 2].map(|i| 0.5 * (x[i] + y[i]));
            assert!(
                phi(&mid) <= phi(x).max(phi(y)) + 1e-12,
                "midpoint of {x:?} and {y:?}"
            );
        }
    }
}
