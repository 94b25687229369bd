use proptest::prelude::*;
use symmcouple_core::decomp::{
    decomp_empirical_test, fundfunc_additivity_test, replay_additivity, replay_family, FamilySpec,
};
use symmcouple_core::report::escalates;
use symmcouple_core::{Partition, PhiFunction, Sequential, SpaceSpec, Weight, Witness};

fn dyadic_wr(n: i32) -> Vec<f64> {
    (1..=n).map(|r| libm::exp2(-r as f64)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reports_are_reproducible(seed in any::<u64>(), n in 2usize..8) {
        let w = Weight::recip(12).unwrap();
        let fam = FamilySpec::from_weight(&w, n, seed).unwrap();
        let s = SpaceSpec::lambda(PhiFunction::tlog()).unwrap();
        let a = decomp_empirical_test(&s, 1.0, &fam, 40, &Sequential).unwrap();
        let b = decomp_empirical_test(&s, 1.0, &fam, 40, &Sequential).unwrap();
        prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn witnesses_replay(seed in any::<u64>(), n in 2usize..8, which in 0usize..3) {
        let w = Weight::recip(12).unwrap();
        let fam = FamilySpec::from_weight(&w, n, seed).unwrap();
        let (s, p) = [
            (SpaceSpec::lambda(PhiFunction::tlog()).unwrap(), 1.0),
            (SpaceSpec::marcinkiewicz(PhiFunction::power(0.5).unwrap()).unwrap(), 2.0),
            (SpaceSpec::orlicz(symmcouple_core::OrliczFunction::power_log1(3.0).unwrap()), 3.0),
        ][which].clone();
        let rep = decomp_empirical_test(&s, p, &fam, 30, &Sequential).unwrap();
        for (wit, r) in [(&rep.witness_min, rep.min_ratio), (&rep.witness_max, rep.max_ratio)] {
            let Witness::Family(xs) = wit else { panic!("missing witness") };
            let again = replay_family(&s, p, xs).unwrap();
            prop_assert!((again - r).abs() <= 1e-9 * r);
        }
        let add = fundfunc_additivity_test(&PhiFunction::tlog(), 1.0, &dyadic_wr(16), 30, seed, &Sequential).unwrap();
        let Witness::Values(tau) = &add.witness_max else { panic!("missing witness") };
        prop_assert!((replay_additivity(&PhiFunction::tlog(), 1.0, tau) - add.max_ratio).abs() <= 1e-9 * add.max_ratio);
    }
}

fn curve(f: impl Fn(usize) -> f64) -> Vec<(usize, f64)> {
    [2usize, 4, 8, 16].into_iter().map(|n| (n, f(n))).collect()
}

fn non_decreasing(c: &[(usize, f64)]) -> bool {
    c.windows(2).all(|p| p[1].1 >= p[0].1 * (1.0 - 1e-12))
}

#[test]
fn failure_cases_escalate_monotonically() {
    let sqrt = PhiFunction::power(0.5).unwrap();
    let add = curve(|n| {
        fundfunc_additivity_test(&sqrt, 1.0, &dyadic_wr(n as i32), 400, 1, &Sequential).unwrap().constant()
    });
    assert!(non_decreasing(&add) && escalates(&add), "{add:?}");

    let w = Weight::recip(30).unwrap();
    let lam = SpaceSpec::lambda(sqrt.clone()).unwrap();
    let fam_curve = curve(|n| {
        let fam = FamilySpec::from_weight(&w, n, 1).unwrap();
        decomp_empirical_test(&lam, 1.0, &fam, 400, &Sequential).unwrap().constant()
    });
    assert!(non_decreasing(&fam_curve) && escalates(&fam_curve), "{fam_curve:?}");

    let l2 = SpaceSpec::orlicz(symmcouple_core::OrliczFunction::power(2.0).unwrap());
    let orl = curve(|n| {
        let fam = FamilySpec::from_weight(&w, n, 1).unwrap().with_max_blocks(1);
        decomp_empirical_test(&l2, 1.0, &fam, 400, &Sequential).unwrap().constant()
    });
    assert!(non_decreasing(&orl) && escalates(&orl), "{orl:?}");
}

#[test]
fn interval_families_match_weight_families() {
    // measures 2^{-k-1} as explicit intervals, and the weight with those level sets
    let n = 16;
    let mut ivs = Vec::new();
    let mut at = 0.0;
    for k in 1..=n {
        let len = libm::exp2(-(k as f64) - 1.0);
        ivs.push((at, at + len));
        at += len;
    }
    let intervals = Partition::new(ivs).unwrap();
    let mut levels: Vec<(i32, f64)> = (1..=n).map(|k| (k as i32, libm::exp2(-(k as f64) - 1.0))).collect();
    levels.push((0, 1.0 - at));
    let w = Weight::from_level_measures(&levels).unwrap();
    for (space, p, bounded) in [
        (SpaceSpec::lambda(PhiFunction::tlog()).unwrap(), 1.0, true),
        (SpaceSpec::lambda(PhiFunction::power(0.5).unwrap()).unwrap(), 1.0, false),
    ] {
        let verdict = |make: &dyn Fn(usize) -> FamilySpec| {
            let c = curve(|m| decomp_empirical_test(&space, p, &make(m.min(n)), 300, &Sequential).unwrap().constant());
            !escalates(&c)
        };
        let from_intervals = verdict(&|m| {
            // the m largest explicit intervals: skip the weight's complement level
            let part = Partition::new(intervals.intervals()[..m].to_vec()).unwrap();
            FamilySpec::from_intervals(&part, 3).unwrap()
        });
        let from_weight = verdict(&|m| {
            let mut f = FamilySpec::from_weight(&w, m + 1, 3).unwrap();
            f.supports.remove(0);
            f
        });
        assert_eq!(from_intervals, from_weight, "{}", space.label());
        assert_eq!(from_intervals, bounded, "{}", space.label());
    }
}
