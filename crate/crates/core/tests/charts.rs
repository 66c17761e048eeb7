//! Property tests of the chart round trip over random trees.

use confint_core::fmc_charts::sample::{random_finite_point, random_infinity_point, random_tree};
use confint_core::fmc_charts::{
    chart_xi, chart_xi_infty, check_conditions, check_conditions_infty, retraction_r,
    retraction_r_infty, Variant,
};
use confint_core::rng;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn finite_round_trip(seed in any::<u64>()) {
        let mut r = rng::master(seed);
        let t = random_tree(&mut r, Variant::Finite);
        let p = random_finite_point(&mut r, &t);
        let q = chart_xi(&t, &p).unwrap();
        prop_assert!(retraction_r(&t, &q).unwrap().distance(&p) < 1e-9);
        let c = check_conditions(&t, &q).unwrap();
        prop_assert!(c.c1 < 1e-12 && c.c2 < 1e-10 && c.min_multiple >= -1e-12);
        prop_assert_eq!(t.codim(), p.mu.len());
    }

    #[test]
    fn infinity_round_trip(seed in any::<u64>()) {
        let mut r = rng::master(seed);
        let t = random_tree(&mut r, Variant::Infinity);
        let p = random_infinity_point(&mut r, &t);
        let q = chart_xi_infty(&t, &p).unwrap();
        prop_assert!(retraction_r_infty(&t, &q).unwrap().distance(&p) < 1e-9);
        let c = check_conditions_infty(&t, &q).unwrap();
        prop_assert!(c.c1 < 1e-12 && c.c2 < 1e-10 && c.min_multiple >= -1e-12);
        prop_assert_eq!(t.codim(), p.nu.len() + p.mu.len());
    }
}
