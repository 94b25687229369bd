#![allow(dead_code)]

use proptest::prelude::*;
use symmcouple_core::StepFunction;

/// Step functions with up to `max` pieces; values include repeats and zeros.
pub fn step(max: usize) -> impl Strategy<Value = StepFunction> {
    let value = prop_oneof![3 => 0.0f64..100.0, 1 => Just(0.0), 1 => Just(1.0), 1 => Just(7.5)];
    prop::collection::vec((1u32..1000, value), 1..=max).prop_map(|pieces| {
        let total: f64 = pieces.iter().map(|p| p.0 as f64).sum();
        let mut acc = 0.0;
        let mut breaks = vec![0.0];
        for (len, _) in &pieces[..pieces.len() - 1] {
            acc += *len as f64;
            breaks.push(acc / total);
        }
        breaks.push(1.0);
        StepFunction::new(breaks, pieces.iter().map(|p| p.1).collect()).unwrap()
    })
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
