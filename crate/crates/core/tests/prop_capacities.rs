mod common;

use common::{close, rng};
use lawinv::capacities::{
    cardinality, choquet, choquet_survival, is_law_invariant, is_submodular, jp_recover_nu, Capacity,
};
use lawinv::laws::UniformSample;
use lawinv::probes;
use proptest::prelude::*;

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec((-6i32..=6).prop_map(f64::from), n),
        prop::collection::vec(-10.0f64..10.0, n),
    ]
}

fn sample(v: Vec<f64>) -> UniformSample<f64> {
    UniformSample::new(v).unwrap()
}

fn case() -> impl Strategy<Value = (u64, Vec<f64>, Vec<f64>)> {
    (1usize..=6).prop_flat_map(|n| (any::<u64>(), values(n), values(n)))
}

fn ch(mu: &Capacity<f64>, x: &UniformSample<f64>) -> f64 {
    choquet(mu, x).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn layer_and_survival_formulas_agree((seed, x, _) in case()) {
        let mu = probes::capacity::<f64, _>(&mut rng(seed), x.len());
        let x = sample(x);
        prop_assert!(close(ch(&mu, &x), choquet_survival(&mu, &x).unwrap(), 1e-10));
    }

    #[test]
    fn dual_integral_reflects((seed, x, _) in case()) {
        let mu = probes::capacity::<f64, _>(&mut rng(seed), x.len());
        let x = sample(x);
        prop_assert!(close(ch(&mu.dual(), &x), -ch(&mu, &x.neg()), 1e-10));
        let back = mu.dual().dual().table().unwrap();
        for (a, b) in back.iter().zip(mu.table().unwrap()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn positive_homogeneity_and_cash((seed, x, _) in case(), t in 0.0f64..5.0, c in -5.0f64..5.0) {
        let mu = probes::capacity::<f64, _>(&mut rng(seed), x.len());
        let x = sample(x);
        let lhs = ch(&mu, &x.scaled(t).shifted(c));
        prop_assert!(close(lhs, t * ch(&mu, &x) + c, 1e-10));
    }

    #[test]
    fn monotone_in_the_integrand((seed, x, bump) in case()) {
        let mu = probes::capacity::<f64, _>(&mut rng(seed), x.len());
        let y: Vec<f64> = x.iter().zip(&bump).map(|(a, b)| a + b.abs()).collect();
        prop_assert!(ch(&mu, &sample(x)) <= ch(&mu, &sample(y)) + 1e-10);
    }

    #[test]
    fn comonotone_additivity((seed, x, y) in case()) {
        let n = x.len();
        let mu = probes::capacity::<f64, _>(&mut rng(seed), n);
        // Arrange y in the order of x.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
        let mut ys = y.clone();
        ys.sort_by(f64::total_cmp);
        let mut yc = vec![0.0; n];
        for (rank, &i) in order.iter().enumerate() {
            yc[i] = ys[rank];
        }
        let sum: Vec<f64> = x.iter().zip(&yc).map(|(a, b)| a + b).collect();
        let (x, yc, sum) = (sample(x), sample(yc), sample(sum));
        prop_assert!(close(ch(&mu, &sum), ch(&mu, &x) + ch(&mu, &yc), 1e-10));
    }

    #[test]
    fn submodular_capacities_are_subadditive((seed, x, y) in case()) {
        let mu = probes::capacity::<f64, _>(&mut rng(seed), x.len());
        prop_assume!(is_submodular(&mu).unwrap().holds());
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(ch(&mu, &sample(sum)) <= ch(&mu, &sample(x)) + ch(&mu, &sample(y)) + 1e-9);
    }

    #[test]
    fn law_invariance_iff_permutation_invariance(seed in any::<u64>(), n in 1usize..=5) {
        let mu = probes::capacity::<f64, _>(&mut rng(seed), n);
        let table = mu.table().unwrap();
        // Indicators of equal-size sets are permutations of each other.
        let mut perm_invariant = true;
        for a in 0..table.len() {
            for b in 0..table.len() {
                if cardinality(a as u64) == cardinality(b as u64) {
                    let ia = sample((0..n).map(|i| f64::from(((a >> i) & 1) as u8)).collect());
                    let ib = sample((0..n).map(|i| f64::from(((b >> i) & 1) as u8)).collect());
                    if (ch(&mu, &ia) - ch(&mu, &ib)).abs() > 1e-9 {
                        perm_invariant = false;
                    }
                }
            }
        }
        prop_assert_eq!(is_law_invariant(&mu).unwrap(), perm_invariant);
    }

    #[test]
    fn law_invariant_capacities_ignore_permutations(
        (x, perm) in (1usize..=6).prop_flat_map(|n| (values(n), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())),
        seed in any::<u64>(),
    ) {
        let n = x.len();
        let concave = seed % 2 == 0;
        let mu = Capacity::distortion(n, probes::distortion::<f64, _>(&mut rng(seed), 3, concave)).unwrap();
        let x = sample(x);
        prop_assert!(close(ch(&mu, &x), ch(&mu, &x.permuted(&perm).unwrap()), 1e-12));
    }

    #[test]
    fn jp_polarisation_recovers_nu(seed in any::<u64>(), n in 1usize..=5, alpha in prop_oneof![0.0f64..0.45, 0.55f64..1.0]) {
        let mut r = rng(seed);
        let nu = Capacity::densities(n, probes::density_family::<f64, _>(&mut r, n, 2)).unwrap();
        let mu = Capacity::jp(nu.clone(), alpha).unwrap();
        let back = jp_recover_nu(&mu, alpha).unwrap().table().unwrap();
        for (a, b) in back.iter().zip(nu.table().unwrap()) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + 1.0 / (2.0 * alpha - 1.0).abs()));
        }
    }
}
