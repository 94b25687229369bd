use proptest::prelude::*;
use symmcouple_core::{Schedule, StepFunction, Weight};

fn weight_pieces() -> impl Strategy<Value = Vec<(u32, f64)>> {
    prop::collection::vec((1u32..1000, prop_oneof![0.01f64..1e6, Just(1.0), Just(8.0)]), 1..12)
}

fn build(pieces: &[(u32, f64)]) -> StepFunction {
    let total: f64 = pieces.iter().map(|p| p.0 as f64).sum();
    let mut acc = 0.0;
    let mut breaks = vec![0.0];
    for (len, _) in &pieces[..pieces.len() - 1] {
        acc += *len as f64;
        breaks.push(acc / total);
    }
    breaks.push(1.0);
    StepFunction::new(breaks, pieces.iter().map(|p| p.1).collect()).unwrap()
}

proptest! {
    #[test]
    fn level_measures_partition_the_interval(pieces in weight_pieces()) {
        let w = Weight::new(build(&pieces)).unwrap();
        let total: f64 = w.level_sets().iter().map(|l| l.measure).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn wr_is_non_increasing_and_order_free(pieces in weight_pieces(), rot in 0usize..12) {
        let w = Weight::new(build(&pieces)).unwrap();
        let wr = w.wr();
        prop_assert!(wr.windows(2).all(|p| p[1] <= p[0]));
        let mut shuffled = pieces.clone();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let other = Weight::new(build(&shuffled)).unwrap().wr();
        // measures are the same multiset of piece lengths, up to summation order
        prop_assert_eq!(wr.len(), other.len());
        for (a, b) in wr.iter().zip(&other) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn schedule_weights_halve(taus in prop::collection::vec(1e-9f64..=1.0, 1..20), n_max in 2usize..40) {
        let mut taus = taus;
        taus.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let w = Weight::from_schedule(&Schedule::list(taus).unwrap(), n_max).unwrap();
        let wr = w.wr();
        for r in 1..wr.len().saturating_sub(1) {
            prop_assert!(2.0 * wr[r + 1] <= wr[r] * (1.0 + 1e-12), "r = {}: {:?}", r + 1, wr);
        }
    }

    #[test]
    fn squared_weight_levels_split_levels(pieces in weight_pieces()) {
        let base = build(&pieces);
        let w = Weight::new(base.clone()).unwrap();
        let w2 = Weight::new(base.mul(&base).unwrap()).unwrap();
        for level in w.level_sets() {
            let merged: f64 = w2
                .level_sets()
                .iter()
                .filter(|l| l.k.div_euclid(2) == level.k)
                .map(|l| l.measure)
                .sum();
            prop_assert!((merged - level.measure).abs() <= 1e-12);
        }
        prop_assert!(w2.level_sets().iter().all(|l| w.level_sets().iter().any(|m| m.k == l.k.div_euclid(2))));
    }
}
