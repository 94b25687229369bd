mod common;

use common::{rel, step};
use proptest::prelude::*;
use symmcouple_core::{OrliczFunction, PhiFunction, SpaceSpec};

fn spaces() -> Vec<SpaceSpec> {
    vec![
        SpaceSpec::lp(1.0).unwrap(),
        SpaceSpec::lp(2.5).unwrap(),
        SpaceSpec::lp(f64::INFINITY).unwrap(),
        SpaceSpec::lambda(PhiFunction::tlog()).unwrap(),
        SpaceSpec::lambda(PhiFunction::power(0.5).unwrap()).unwrap(),
        SpaceSpec::marcinkiewicz(PhiFunction::tlog()).unwrap(),
        SpaceSpec::marcinkiewicz(PhiFunction::power(0.5).unwrap()).unwrap(),
        SpaceSpec::lorentz(2.0, PhiFunction::power(0.5).unwrap()).unwrap(),
        SpaceSpec::lorentz(3.0, PhiFunction::tlog()).unwrap(),
        SpaceSpec::orlicz(OrliczFunction::power(3.0).unwrap()),
        SpaceSpec::orlicz(OrliczFunction::power_log1(3.0).unwrap()),
    ]
}

fn space() -> impl Strategy<Value = SpaceSpec> {
    (0..spaces().len()).prop_map(|i| spaces().swap_remove(i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn norms_depend_only_on_distribution(s in space(), x in step(24)) {
        let (a, b) = (s.norm(&x).unwrap(), s.norm(&x.rearrange()).unwrap());
        prop_assert!(rel(a, b) <= 1e-9 || (a == 0.0 && b == 0.0), "{}: {a} vs {b}", s.label());
    }

    #[test]
    fn norms_are_monotone(s in space(), x in step(16), bump in step(16)) {
        let y = x.add(&bump).unwrap();
        prop_assert!(s.norm(&x).unwrap() <= s.norm(&y).unwrap() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn homogeneity_and_triangle(s in space(), x in step(16), y in step(16), c in 0.001f64..1000.0) {
        let nx = s.norm(&x).unwrap();
        let ncx = s.norm(&x.scale(c)).unwrap();
        prop_assert!((ncx - c * nx).abs() <= 1e-9 * c * nx.max(1e-300));
        let nsum = s.norm(&x.add(&y).unwrap()).unwrap();
        prop_assert!(nsum <= (nx + s.norm(&y).unwrap()) * (1.0 + 1e-9));
    }

    #[test]
    fn embedding_chain_for_orlicz(x in step(16), which in 0usize..2) {
        let f = [OrliczFunction::power(3.0).unwrap(), OrliczFunction::power_log1(3.0).unwrap()][which].clone();
        let space = SpaceSpec::orlicz(f.clone());
        let phi = space.fundamental_phi().unwrap();
        let mid = space.norm(&x).unwrap();
        // Λ sum over the level sets of x*, with φ(t) = 1/F^{-1}(1/t) taken exactly at the breaks
        let star = x.rearrange();
        let vals = star.values();
        let upper: f64 = (0..vals.len())
            .map(|k| (vals[k] - vals.get(k + 1).copied().unwrap_or(0.0)) / f.inverse(1.0 / star.breaks()[k + 1]))
            .sum();
        let lower = SpaceSpec::marcinkiewicz(phi).unwrap().norm(&x).unwrap();
        prop_assert!(mid <= upper * (1.0 + 1e-6), "{mid} > {upper}");
        prop_assert!(lower <= mid * (1.0 + 1e-6), "{lower} > {mid}");
    }

    #[test]
    fn endpoint_sandwich(x in step(24), which in 0usize..4) {
        let phis = [PhiFunction::tlog(), PhiFunction::power(0.5).unwrap(), PhiFunction::power(0.8).unwrap(), PhiFunction::power_log(0.5, vec![1.0]).unwrap()];
        let phi = phis[which].clone();
        let at_one = phi.eval(1.0);
        for s in [SpaceSpec::lambda(phi.clone()).unwrap(), SpaceSpec::marcinkiewicz(phi.clone()).unwrap()] {
            let n = s.norm(&x).unwrap();
            prop_assert!(n <= at_one * x.sup_norm() * (1.0 + 1e-12));
            prop_assert!(x.integral_abs() <= n / at_one * (1.0 + 1e-12));
        }
    }
}
