mod common;

use common::{close, int_sample, law, real_law, rng};
use lawinv::laws::{convex_order_dominates, dilate, partial_integral, QuantileFn};
use lawinv::probes;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn quantile_round_trip(x in real_law(8)) {
        let back = QuantileFn::from_law(&x).to_law().unwrap();
        prop_assert!(back.approx_eq(&x, 1e-12));
    }
}

proptest! {
    #[test]
    fn partial_integral_of_whole_range_is_mean(x in real_law(8)) {
        let q = x.quantile_fn();
        prop_assert!(close(partial_integral(&q, 0.0, 1.0).unwrap(), x.mean(), 1e-12));
    }

    #[test]
    fn quantile_is_nondecreasing(x in law(8), mut s in prop::collection::vec(0.001f64..0.999, 2..20)) {
        s.sort_by(f64::total_cmp);
        let q: Vec<f64> = s.iter().map(|&u| x.quantile(u).unwrap()).collect();
        prop_assert!(q.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn dilation_preserves_mean_and_contracts(x in (1usize..=7).prop_flat_map(int_sample), seed in any::<u64>()) {
        let part = probes::random_partition(&mut rng(seed), x.n());
        let y = dilate(&x, &part).unwrap();
        prop_assert!(close(y.mean(), x.mean(), 1e-12));
        prop_assert!(convex_order_dominates(&x.law(), &y.law()));
    }

    #[test]
    fn tail_integral_matches_atom_sum(x in law(6), p in 0.0f64..1.0) {
        // Atom i occupies (F_{i-1}, F_i] of the quantile axis.
        let mut lo = 0.0;
        let mut want = 0.0;
        for (v, w) in x.atoms() {
            let hi = lo + w;
            want += v * (hi.min(1.0) - lo.max(p)).max(0.0);
            lo = hi;
        }
        prop_assert!(close(x.tail_integral(p).unwrap(), want, 1e-12));
    }
}
