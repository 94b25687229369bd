//! Weights on `[0, 1]`: positive step functions with their dyadic level
//! sets `M_k = {w ∈ [2^k, 2^{k+1})}` and the sorted level measures `(w_r)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math;
use crate::phi::Schedule;
use crate::step::{Partition, StepFunction};

/// Default dynamic range above which a weight counts as non-trivial.
pub const NONTRIVIAL_RANGE: f64 = 1_048_576.0;

/// One dyadic level set.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub k: i32,
    pub measure: f64,
    pub intervals: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    base: StepFunction,
    levels: Vec<Level>,
    order: Vec<usize>,
    truncated_tail: bool,
    warnings: Vec<String>,
}

impl Weight {
    pub fn new(base: StepFunction) -> Result<Self> {
        if base.values().iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::validation("weight values must be positive and finite"));
        }
        let mut levels: Vec<Level> = Vec::new();
        for (lo, hi, v) in base.intervals() {
            let k = math::floor_log2(v);
            match levels.iter_mut().find(|l| l.k == k) {
                Some(l) => {
                    l.measure += hi - lo;
                    match l.intervals.last_mut() {
                        Some(last) if last.1 == lo => last.1 = hi,
                        _ => l.intervals.push((lo, hi)),
                    }
                }
                None => levels.push(Level { k, measure: hi - lo, intervals: alloc::vec![(lo, hi)] }),
            }
        }
        levels.sort_by_key(|l| l.k);
        let mut order: Vec<usize> = (0..levels.len()).collect();
        order.sort_by(|&a, &b| {
            let (la, lb) = (&levels[a], &levels[b]);
            lb.measure
                .partial_cmp(&la.measure)
                .unwrap_or(Ordering::Equal)
                .then(la.k.abs().cmp(&lb.k.abs()))
                .then(la.k.cmp(&lb.k))
        });
        Ok(Weight { base, levels, order, truncated_tail: false, warnings: Vec::new() })
    }

    /// Dyadic discretisation of `1/t` to depth `J`: value `2^k` on
    /// `(2^{-k-1}, 2^{-k}]` for `k < J` and `2^J` on `(0, 2^{-J}]`.
    pub fn recip(depth: u32) -> Result<Self> {
        if depth == 0 || depth > 1000 {
            return Err(Error::validation("recip depth must be in 1..=1000"));
        }
        let j = depth as i32;
        let mut breaks = alloc::vec![0.0];
        breaks.extend((0..=j).rev().map(|k| math::pow2(-k)));
        let mut values = alloc::vec![math::pow2(j)];
        values.extend((0..j).rev().map(math::pow2));
        let mut w = Weight::new(StepFunction::new(breaks, values)?)?;
        w.truncated_tail = true;
        Ok(w)
    }

    /// Levels `N = 1..=J` of measure `(q−1)q^{-N}` carrying `w = 2^N`, plus a
    /// tail level `J+1` of measure `q^{-J}`.
    pub fn dyadic_geom(q: f64, depth: u32) -> Result<Self> {
        if !(q > 1.0) || depth == 0 {
            return Err(Error::validation("dyadic-geom needs q > 1 and depth >= 1"));
        }
        let mut measures: Vec<(i32, f64)> =
            (1..=depth as i32).map(|n| (n, (q - 1.0) * math::powf(q, -(n as f64)))).collect();
        measures.push((depth as i32 + 1, math::powf(q, -(depth as f64))));
        let mut w = Self::from_level_measures(&measures)?;
        w.truncated_tail = true;
        Ok(w)
    }

    /// Packs levels left to right, largest `k` first, with value `2^k` on a
    /// block of the given measure. Measures must sum to 1 within `1e-12`.
    pub fn from_level_measures(levels: &[(i32, f64)]) -> Result<Self> {
        let total: f64 = levels.iter().map(|l| l.1).sum();
        if levels.iter().any(|l| !(l.1 > 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation("level measures must be positive and sum to 1"));
        }
        let mut sorted = levels.to_vec();
        sorted.sort_by(|a, b| b.0.cmp(&a.0));
        let mut breaks = alloc::vec![0.0];
        let mut values = Vec::new();
        let mut acc = 0.0;
        for (i, &(k, m)) in sorted.iter().enumerate() {
            acc += m;
            breaks.push(if i + 1 == sorted.len() { 1.0 } else { acc });
            values.push(math::pow2(k));
        }
        Weight::new(StepFunction::new(breaks, values)?)
    }

    pub fn base(&self) -> &StepFunction {
        &self.base
    }

    /// Level sets sorted by `k`.
    pub fn level_sets(&self) -> &[Level] {
        &self.levels
    }

    /// Level sets in the order of `(w_r)`: measure descending, ties to the
    /// smaller `|k|`.
    pub fn rearranged_levels(&self) -> impl Iterator<Item = &Level> + '_ {
        self.order.iter().map(|&i| &self.levels[i])
    }

    /// First `r_max` entries of `(w_r)` (fewer when there are fewer levels).
    pub fn wr_sequence(&self, r_max: usize) -> Vec<f64> {
        self.rearranged_levels().take(r_max).map(|l| l.measure).collect()
    }

    pub fn wr(&self) -> Vec<f64> {
        self.wr_sequence(usize::MAX)
    }

    /// `(w_r)` without the lumped tail level of a discretised weight.
    pub fn resolved_wr(&self) -> Vec<f64> {
        let mut wr = self.wr();
        if self.truncated_tail && wr.len() > 1 {
            wr.pop();
        }
        wr
    }

    /// Whether the last level lumps together the unresolved part of a
    /// discretised continuous weight.
    pub fn has_truncated_tail(&self) -> bool {
        self.truncated_tail
    }

    /// `M̄_1, …, M̄_n` as partitions of `[0, 1]`.
    pub fn mbar(&self, n: usize) -> Result<Vec<Partition>> {
        if n > self.levels.len() {
            return Err(Error::validation(format!(
                "requested {n} level sets but the weight has {}",
                self.levels.len()
            )));
        }
        self.rearranged_levels().take(n).map(|l| Partition::new(l.intervals.clone())).collect()
    }

    pub fn dynamic_range(&self) -> f64 {
        let vals = self.base.values();
        let max = vals.iter().copied().fold(0.0, f64::max);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn is_nontrivial(&self, threshold: f64) -> bool {
        self.dynamic_range() >= threshold
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Checks `w_k 2^k ≥ c0` for every available `k ≥ k0` (1-based).
    pub fn fast_weight_check(&self, c0: f64, k0: usize) -> Result<FastWeightReport> {
        let wr = self.resolved_wr();
        if k0 == 0 || k0 > wr.len() {
            return Err(Error::validation("insufficient levels"));
        }
        let mut worst_k = k0;
        let mut worst = f64::INFINITY;
        for (i, w) in wr.iter().enumerate().skip(k0 - 1) {
            let v = w * math::pow2(i as i32 + 1);
            if v < worst {
                worst = v;
                worst_k = i + 1;
            }
        }
        Ok(FastWeightReport { pass: worst >= c0, worst_k, worst_value: worst })
    }

    /// The weight of the schedule construction: `m(M_2) = min(τ(2), 1/4)`,
    /// `m(M_N) = min(τ(N), m(M_{N-1})/2)` up to `n_max`, `M_1` the rest, and
    /// `w = 2^N` on `M_N`. Levels that would underflow stop the chain with a
    /// warning.
    pub fn from_schedule(sched: &Schedule, n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::validation("n_max must be at least 2"));
        }
        let mut measures: Vec<(i32, f64)> = Vec::new();
        let mut prev = 0.25f64;
        let mut warnings = Vec::new();
        for n in 2..=n_max {
            let m = if n == 2 { sched.tau(2).min(0.25) } else { sched.tau(n).min(prev / 2.0) };
            if !(m > 1e-300) {
                warnings.push(format!("schedule truncated at N = {n}: zero-length level"));
                break;
            }
            measures.push((n as i32, m));
            prev = m;
        }
        let used: f64 = measures.iter().map(|l| l.1).sum();
        measures.push((1, 1.0 - used));
        let mut w = Self::from_level_measures(&measures)?;
        w.warnings = warnings;
        Ok(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastWeightReport {
    pub pass: bool,
    pub worst_k: usize,
    pub worst_value: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_weight() {
        let w = Weight::new(StepFunction::constant(1.0)).unwrap();
        assert_eq!(w.level_sets().len(), 1);
        assert_eq!((w.level_sets()[0].k, w.level_sets()[0].measure), (0, 1.0));
        assert_eq!(w.wr_sequence(5), vec![1.0]);
        assert!(w.fast_weight_check(0.5, 2).is_err());
    }

    #[test]
    fn recip_levels() {
        let j = 30;
        let w = Weight::recip(j).unwrap();
        for l in w.level_sets() {
            let expect = if l.k < j as i32 { libm::ldexp(1.0, -l.k - 1) } else { libm::ldexp(1.0, -(j as i32)) };
            assert_eq!(l.measure, expect, "k={}", l.k);
        }
        let wr = w.wr_sequence(10);
        for (r, v) in wr.iter().enumerate() {
            assert_eq!(*v, libm::ldexp(1.0, -(r as i32) - 1));
        }
        assert_eq!(w.resolved_wr().len(), j as usize);
        assert!(w.is_nontrivial(NONTRIVIAL_RANGE));
    }

    #[test]
    fn two_level_weight() {
        let base = StepFunction::from_pieces(&[(1.0 / 3.0, 2.0), (1.0, 8.0)]).unwrap();
        let w = Weight::new(base).unwrap();
        let got: Vec<(i32, f64)> = w.level_sets().iter().map(|l| (l.k, l.measure)).collect();
        assert_eq!(got.iter().map(|g| g.0).collect::<Vec<_>>(), vec![1, 3]);
        assert!((got[0].1 - 1.0 / 3.0).abs() < 1e-15 && (got[1].1 - 2.0 / 3.0).abs() < 1e-15);
        let wr = w.wr_sequence(3);
        assert!(wr.len() == 2 && (wr[0] - 2.0 / 3.0).abs() < 1e-15 && (wr[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!(!w.is_nontrivial(NONTRIVIAL_RANGE));
    }

    #[test]
    fn fast_weight_examples() {
        let r = Weight::recip(30).unwrap().fast_weight_check(0.5, 1).unwrap();
        assert!(r.pass);
        let r = Weight::dyadic_geom(4.0, 20).unwrap().fast_weight_check(0.01, 1).unwrap();
        assert!(!r.pass && r.worst_k == 20);
    }

    #[test]
    fn schedule_weights() {
        let w = Weight::from_schedule(&Schedule::Pow2, 10).unwrap();
        let ms: Vec<(i32, f64)> = w.level_sets().iter().map(|l| (l.k, l.measure)).collect();
        for &(k, m) in &ms[1..] {
            assert_eq!(m, libm::ldexp(1.0, -k));
        }
        let rest: f64 = (2..=10).map(|n| libm::ldexp(1.0, -n)).sum();
        assert!((ms[0].1 - (1.0 - rest)).abs() < 1e-15);

        let w = Weight::from_schedule(&Schedule::Constant(1.0), 6).unwrap();
        let ms: Vec<f64> = w.level_sets().iter().skip(1).map(|l| l.measure).collect();
        assert_eq!(ms, vec![0.25, 0.125, 0.0625, 0.03125, 0.015625]);

        let w = Weight::from_schedule(&Schedule::Pow2, 2).unwrap();
        assert_eq!(w.level_sets().len(), 2);
    }

    #[test]
    fn measures_sum_to_one() {
        for w in [Weight::recip(40).unwrap(), Weight::dyadic_geom(3.0, 12).unwrap()] {
            let s: f64 = w.level_sets().iter().map(|l| l.measure).sum();
            assert!((s - 1.0).abs() < 1e-15);
        }
    }
}
