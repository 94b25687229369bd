//! Empirical two-sided equivalence constants.

use alloc::string::String;
use alloc::vec::Vec;

use crate::step::StepFunction;

/// Input that produced an extreme ratio, kept so the ratio can be replayed.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Witness {
    #[default]
    None,
    /// Scalar inputs such as `(t, N)` pairs or a sequence `τ_1, …, τ_n`.
    Values(Vec<f64>),
    /// A family of step functions (the summands of a disjoint family).
    Family(Vec<StepFunction>),
}

/// Observed range of a ratio `LHS / RHS` over a set of trials.
///
/// Ratios are not normalised around 1; `passed_at_c` is only set by
/// [`EquivalenceReport::judge`], never implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub p_used: f64,
    pub trials: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub witness_min: Witness,
    pub witness_max: Witness,
    pub passed_at_c: Option<f64>,
    pub notes: Vec<String>,
}

impl EquivalenceReport {
    pub fn empty(p_used: f64) -> Self {
        EquivalenceReport {
            p_used,
            trials: 0,
            min_ratio: f64::INFINITY,
            max_ratio: f64::NEG_INFINITY,
            witness_min: Witness::None,
            witness_max: Witness::None,
            passed_at_c: None,
            notes: Vec::new(),
        }
    }

    /// Records one observation. Only strict improvements replace a witness,
    /// so the first extreme in trial order wins.
    pub fn observe(&mut self, ratio: f64, witness: impl FnOnce() -> Witness) {
        self.trials += 1;
        let new_min = ratio < self.min_ratio;
        let new_max = ratio > self.max_ratio;
        if new_min || new_max {
            let w = witness();
            if new_min {
                self.min_ratio = ratio;
                self.witness_min = w.clone();
            }
            if new_max {
                self.max_ratio = ratio;
                self.witness_max = w;
            }
        }
    }

    /// Folds in another report, keeping `self`'s witnesses on ties.
    pub fn merge(&mut self, other: EquivalenceReport) {
        self.trials += other.trials;
        if other.min_ratio < self.min_ratio {
            self.min_ratio = other.min_ratio;
            self.witness_min = other.witness_min;
        }
        if other.max_ratio > self.max_ratio {
            self.max_ratio = other.max_ratio;
            self.witness_max = other.witness_max;
        }
        self.notes.extend(other.notes);
    }

    /// Two-sided constant `max(max_ratio, 1/min_ratio)`.
    pub fn constant(&self) -> f64 {
        self.max_ratio.max(1.0 / self.min_ratio)
    }

    /// Whether every observed ratio lies in `[1/c, c]`.
    pub fn within(&self, c: f64) -> bool {
        self.trials > 0 && self.max_ratio <= c && self.min_ratio >= 1.0 / c
    }

    /// Sets `passed_at_c` to `c` when the ratios lie in `[1/c, c]`.
    pub fn judge(mut self, c: f64) -> Self {
        self.passed_at_c = if self.within(c) { Some(c) } else { None };
        self
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }
}

/// Flags the failure signature of a family test: the two-sided constant
/// at least doubles over three successive doublings of the family size.
///
/// `constants` holds `(n, constant)` pairs sorted by `n`; the check looks
/// for any `n₀` with `8·n₀` also present.
pub fn escalates(constants: &[(usize, f64)]) -> bool {
    constants.iter().any(|&(n0, c0)| {
        constants.iter().any(|&(n, c)| n == 8 * n0 && c >= 2.0 * c0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn observe_tracks_extremes_and_first_witness() {
        let mut r = EquivalenceReport::empty(1.0);
        r.observe(2.0, || Witness::Values(vec![0.0]));
        r.observe(0.5, || Witness::Values(vec![1.0]));
        r.observe(2.0, || Witness::Values(vec![2.0]));
        r.observe(3.0, || Witness::Values(vec![3.0]));
        assert_eq!(r.trials, 4);
        assert_eq!(r.min_ratio, 0.5);
        assert_eq!(r.max_ratio, 3.0);
        assert_eq!(r.witness_min, Witness::Values(vec![1.0]));
        assert_eq!(r.witness_max, Witness::Values(vec![3.0]));
        assert_eq!(r.constant(), 3.0);
        assert!(r.clone().judge(3.0).passed_at_c.is_some());
        assert!(r.judge(2.5).passed_at_c.is_none());
    }

    #[test]
    fn single_observation_sets_both_witnesses() {
        let mut r = EquivalenceReport::empty(2.0);
        r.observe(1.5, || Witness::Values(vec![7.0]));
        assert_eq!(r.witness_min, r.witness_max);
        assert_eq!((r.min_ratio, r.max_ratio), (1.5, 1.5));
    }

    #[test]
    fn escalation_signature() {
        assert!(escalates(&[(2, 1.0), (4, 1.4), (8, 1.9), (16, 2.1)]));
        assert!(!escalates(&[(2, 1.0), (4, 1.2), (8, 1.3), (16, 1.35)]));
    }
}
