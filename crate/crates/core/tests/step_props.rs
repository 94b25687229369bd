mod common;

use common::{rel, step};
use proptest::prelude::*;

proptest! {
    #[test]
    fn rearrangement_preserves_distribution(x in step(24), lambdas in prop::collection::vec(0.0f64..110.0, 1..8)) {
        let star = x.rearrange();
        for l in lambdas.iter().copied().chain(x.values().iter().copied()) {
            prop_assert!((star.distribution(l) - x.distribution(l)).abs() <= 1e-12);
        }
    }

    #[test]
    fn rearrangement_is_monotone_and_idempotent(x in step(24)) {
        let star = x.rearrange();
        prop_assert!(star.is_non_increasing());
        prop_assert_eq!(star.rearrange(), star);
    }

    #[test]
    fn norms_are_rearrangement_invariant(x in step(24), p in prop_oneof![Just(1.0), Just(2.0), 1.0f64..6.0, Just(f64::INFINITY)]) {
        let (a, b) = (x.lp_norm(p), x.rearrange().lp_norm(p));
        prop_assert!(rel(a, b) <= 1e-12 || (a == 0.0 && b == 0.0));
        prop_assert!(rel(x.integral_abs(), x.rearrange().integral_abs()) <= 1e-12 || x.integral_abs() == 0.0);
    }

    #[test]
    fn maximal_function_dominates(x in step(24), ts in prop::collection::vec(1e-6f64..=1.0, 2..10)) {
        let mut ts = ts;
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let star = x.rearrange();
        let mut prev = f64::INFINITY;
        for t in ts {
            let ds = x.double_star(t).unwrap();
            prop_assert!(ds <= prev * (1.0 + 1e-12));
            prop_assert!(ds >= star.eval(t) * (1.0 - 1e-12));
            prev = ds;
        }
    }

    #[test]
    fn compressions_compose(x in step(16), a in 0i32..12, b in 0i32..12) {
        let (s, t) = (libm::exp2(-a as f64), libm::exp2(-b as f64));
        prop_assert_eq!(x.dilate(s).unwrap().dilate(t).unwrap().simplify(), x.dilate(s * t).unwrap().simplify());
    }

    #[test]
    fn compressions_compose_off_grid(x in step(16), s in 0.05f64..1.0, t in 0.05f64..1.0) {
        let lhs = x.dilate(s).unwrap().dilate(t).unwrap();
        let rhs = x.dilate(s * t).unwrap();
        for k in 0..200 {
            let u = (k as f64 + 0.5) / 200.0;
            // skip points within rounding distance of a break
            if rhs.breaks().iter().any(|b| (b - u).abs() < 1e-9) {
                continue;
            }
            prop_assert_eq!(lhs.eval(u), rhs.eval(u));
        }
    }
}
