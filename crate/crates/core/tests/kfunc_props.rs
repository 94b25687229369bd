mod common;

use common::step;
use proptest::prelude::*;
use symmcouple_core::kfunc::{k_curve, k_generic, k_lp_weighted, KOptions};
use symmcouple_core::{PhiFunction, Sequential, SpaceSpec, StepFunction, Weight};

fn weight() -> impl Strategy<Value = Weight> {
    prop_oneof![
        (2u32..12).prop_map(|d| Weight::recip(d).unwrap()),
        (1.5f64..4.0, 2u32..8).prop_map(|(q, d)| Weight::dyadic_geom(q, d).unwrap()),
    ]
}

fn k(space: &SpaceSpec, w: &Weight, x: &StepFunction, t: f64) -> f64 {
    k_generic(space, w, x, t, &KOptions::default()).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lp_split_envelope(x in step(8), w in weight(), lt in -8.0f64..8.0, p in prop_oneof![Just(1.0), Just(2.0)]) {
        let t = libm::exp2(lt);
        let s = SpaceSpec::lp(p).unwrap();
        let kp = k_lp_weighted(p, &w, &x, t);
        let kg = k(&s, &w, &x, t);
        prop_assert!(kg >= kp * (1.0 - 1e-6) - 1e-12, "{kg} < {kp}");
        prop_assert!(kg <= 2.0 * kp * (1.0 + 1e-6) + 1e-12, "{kg} > 2 {kp}");
    }

    #[test]
    fn subadditive_in_x(x in step(6), y in step(6), w in weight(), lt in -6.0f64..6.0) {
        let t = libm::exp2(lt);
        let s = SpaceSpec::lambda(PhiFunction::tlog()).unwrap();
        let sum = x.add(&y).unwrap();
        let lhs = k(&s, &w, &sum, t);
        let rhs = k(&s, &w, &x, t) + k(&s, &w, &y, t);
        prop_assert!(lhs <= rhs * (1.0 + 1e-5) + 1e-12, "{lhs} > {rhs}");
    }

    #[test]
    fn positively_homogeneous(x in step(6), w in weight(), lt in -6.0f64..6.0, c in 0.01f64..100.0) {
        let t = libm::exp2(lt);
        let s = SpaceSpec::marcinkiewicz(PhiFunction::power(0.5).unwrap()).unwrap();
        let a = k(&s, &w, &x.scale(c), t);
        let b = c * k(&s, &w, &x, t);
        prop_assert!((a - b).abs() <= 1e-5 * b.max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn curves_are_monotone(x in step(6), w in weight(), which in 0usize..3) {
        let s = [
            SpaceSpec::lp(2.0).unwrap(),
            SpaceSpec::lambda(PhiFunction::tlog()).unwrap(),
            SpaceSpec::orlicz(symmcouple_core::OrliczFunction::power(3.0).unwrap()),
        ][which].clone();
        let grid: Vec<f64> = (-16..=8).map(|j| libm::exp2(j as f64 / 2.0)).collect();
        let c = k_curve(&s, &w, &x, &grid, &KOptions::default(), &Sequential).unwrap();
        prop_assert!(c.monotonicity_defect() <= 1e-5, "{}", c.monotonicity_defect());
    }
}
