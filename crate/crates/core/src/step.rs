//! Piecewise-constant functions on `[0, 1]` and their exact calculus.
//!
//! A [`StepFunction`] stores breaks `0 = b_0 < b_1 < … < b_n = 1` and one value
//! per interval `(b_{i-1}, b_i]`. Distribution functions, decreasing
//! rearrangements, running averages and `L_p` norms are all computed from
//! the (value, length) pairs directly, without sampling.
//!
//! Values are stored signed; every norm and rearrangement works with `|x|`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Builds a step function from its full break list (starting at 0 and
    /// ending at 1) and one value per interval.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("step function needs at least one piece"));
        }
        if breaks.len() != values.len() + 1 {
            return Err(Error::validation("breaks must have one more entry than values"));
        }
        if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
            return Err(Error::validation("breaks must start at 0 and end at 1"));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation("breaks must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("values must be finite"));
        }
        Ok(StepFunction { breaks, values })
    }

    /// Builds from `(right endpoint, value)` rows, the layout of the CSV format.
    pub fn from_pieces(pieces: &[(f64, f64)]) -> Result<Self> {
        let mut breaks = Vec::with_capacity(pieces.len() + 1);
        breaks.push(0.0);
        breaks.extend(pieces.iter().map(|p| p.0));
        Self::new(breaks, pieces.iter().map(|p| p.1).collect())
    }

    pub fn constant(c: f64) -> Self {
        StepFunction { breaks: alloc::vec![0.0, 1.0], values: alloc::vec![c] }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `χ_[0,a]`; `a = 0` gives the zero function.
    pub fn indicator(a: f64) -> Result<Self> {
        Self::indicator_of(0.0, a)
    }

    /// `c·χ_(lo,hi]` inside `[0,1]`.
    pub fn block(lo: f64, hi: f64, c: f64) -> Result<Self> {
        let mut s = Self::indicator_of(lo, hi)?;
        for v in s.values.iter_mut() {
            *v *= c;
        }
        Ok(s)
    }

    fn indicator_of(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || hi < lo {
            return Err(Error::domain("indicator interval must lie in [0,1]"));
        }
        if hi == lo {
            return Ok(Self::zero());
        }
        let mut breaks = alloc::vec![0.0];
        let mut values = Vec::new();
        if lo > 0.0 {
            breaks.push(lo);
            values.push(0.0);
        }
        breaks.push(hi);
        values.push(1.0);
        if hi < 1.0 {
            breaks.push(1.0);
            values.push(0.0);
        }
        Self::new(breaks, values)
    }

    /// Assembles a function from disjoint `(lo, hi, value)` blocks; the
    /// uncovered part of `[0,1]` is zero.
    pub fn from_blocks(blocks: &[(f64, f64, f64)]) -> Result<Self> {
        let mut sorted: Vec<(f64, f64, f64)> = blocks.iter().copied().filter(|b| b.1 > b.0).collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut breaks = alloc::vec![0.0];
        let mut values = Vec::new();
        let mut cursor = 0.0;
        for &(lo, hi, v) in &sorted {
            if lo < cursor || hi > 1.0 || lo < 0.0 {
                return Err(Error::validation("blocks must be disjoint and inside [0,1]"));
            }
            if lo > cursor {
                breaks.push(lo);
                values.push(0.0);
            }
            breaks.push(hi);
            values.push(v);
            cursor = hi;
        }
        if cursor < 1.0 {
            breaks.push(1.0);
            values.push(0.0);
        }
        Self::new(breaks, values)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(right break, value)` rows.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breaks[1..].iter().copied().zip(self.values.iter().copied())
    }

    /// `(lo, hi, value)` per interval.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breaks.windows(2).zip(self.values.iter()).map(|(w, &v)| (w[0], w[1], v))
    }

    pub fn lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.breaks.windows(2).map(|w| w[1] - w[0])
    }

    /// Value at `t ∈ (0,1]` (left-open pieces; `t = 0` reads the first piece).
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.breaks[1..].partition_point(|&b| b < t);
        self.values[idx.min(self.values.len() - 1)]
    }

    pub fn support_measure(&self) -> f64 {
        self.intervals().filter(|p| p.2 != 0.0).map(|p| p.1 - p.0).sum()
    }

    /// `d_x(λ) = m{t : |x(t)| > λ}`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        self.intervals().filter(|p| math::abs(p.2) > lambda).map(|p| p.1 - p.0).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
    }

    pub fn integral_abs(&self) -> f64 {
        self.intervals().map(|p| math::abs(p.2) * (p.1 - p.0)).sum()
    }

    /// `‖x‖_p` for `p ∈ [1, ∞]`; pass `f64::INFINITY` for the sup norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        if p == 1.0 {
            return self.integral_abs();
        }
        let s: f64 = self.intervals().map(|q| math::powf(math::abs(q.2), p) * (q.1 - q.0)).sum();
        math::powf(s, 1.0 / p)
    }

    pub fn abs(&self) -> StepFunction {
        StepFunction { breaks: self.breaks.clone(), values: self.values.iter().map(|v| math::abs(*v)).collect() }
    }

    pub fn scale(&self, c: f64) -> StepFunction {
        StepFunction { breaks: self.breaks.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<StepFunction> {
        Self::new(self.breaks.clone(), self.values.iter().map(|v| f(*v)).collect())
    }

    /// Whether the values are non-increasing left to right.
    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    /// Decreasing rearrangement `x*`.
    ///
    /// Sorts `(|value|, length)` pairs by value, ties kept in original order.
    /// An input that is already non-increasing in `|x|` keeps its breaks.
    pub fn rearrange(&self) -> StepFunction {
        let abs = self.abs();
        if abs.is_non_increasing() {
            return abs;
        }
        let mut pairs: Vec<(f64, f64)> = abs.intervals().map(|p| (p.2, p.1 - p.0)).collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
        let mut breaks = Vec::with_capacity(pairs.len() + 1);
        let mut values = Vec::with_capacity(pairs.len());
        breaks.push(0.0);
        let mut acc = 0.0;
        let last = pairs.len() - 1;
        for (i, (v, len)) in pairs.iter().enumerate() {
            acc += len;
            let hi = if i == last { 1.0 } else { acc };
            // rounding in the running sum can swallow a piece near 1
            if hi <= *breaks.last().unwrap() || (i != last && hi >= 1.0) {
                continue;
            }
            breaks.push(hi);
            values.push(*v);
        }
        if values.is_empty() {
            return StepFunction::constant(pairs[0].0);
        }
        StepFunction { breaks, values }
    }

    /// `∫_0^t x*(s) ds` for `t ∈ [0, 1]`, computed from `self` assumed
    /// already rearranged. Use [`RunningIntegral`] for repeated queries.
    pub fn integral_star(&self, t: f64) -> f64 {
        RunningIntegral::new(&self.rearrange()).at(t)
    }

    /// `x**(t) = (1/t) ∫_0^t x*(s) ds` for `0 < t ≤ 1`.
    pub fn double_star(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain("double_star requires 0 < t <= 1"));
        }
        Ok(self.integral_star(t) / t)
    }

    /// Dilation `σ_t x(s) = x(s/t) χ_[0,1](s/t)`, restricted to `[0,1]`.
    pub fn dilate(&self, t: f64) -> Result<StepFunction> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain("dilation factor must be positive"));
        }
        if t == 1.0 {
            return Ok(self.clone());
        }
        let mut breaks = alloc::vec![0.0];
        let mut values = Vec::new();
        for (_, hi, v) in self.intervals() {
            let nhi = if hi == 1.0 { t } else { hi * t };
            if nhi >= 1.0 {
                breaks.push(1.0);
                values.push(v);
                break;
            }
            breaks.push(nhi);
            values.push(v);
        }
        if *breaks.last().unwrap() < 1.0 {
            breaks.push(1.0);
            values.push(0.0);
        }
        StepFunction::new(breaks, values)
    }

    /// Breaks of the common refinement of `self` and `other`, with each
    /// function's value on every refined interval.
    pub fn refine_with(&self, other: &StepFunction) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut breaks = alloc::vec![0.0];
        let mut va = Vec::new();
        let mut vb = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.values.len() && j < other.values.len() {
            let (ba, bb) = (self.breaks[i + 1], other.breaks[j + 1]);
            let hi = ba.min(bb);
            breaks.push(hi);
            va.push(self.values[i]);
            vb.push(other.values[j]);
            if ba <= hi {
                i += 1;
            }
            if bb <= hi {
                j += 1;
            }
        }
        let n = breaks.len();
        breaks[n - 1] = 1.0;
        (breaks, va, vb)
    }

    /// Pointwise combination on the common refinement.
    pub fn zip_with(&self, other: &StepFunction, f: impl Fn(f64, f64) -> f64) -> Result<StepFunction> {
        let (breaks, va, vb) = self.refine_with(other);
        StepFunction::new(breaks, va.iter().zip(&vb).map(|(a, b)| f(*a, *b)).collect())
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Merges adjacent pieces with equal values.
    pub fn simplify(&self) -> StepFunction {
        let mut breaks = alloc::vec![0.0];
        let mut values: Vec<f64> = Vec::new();
        for (_, hi, v) in self.intervals() {
            if values.last() == Some(&v) {
                *breaks.last_mut().unwrap() = hi;
            } else {
                breaks.push(hi);
                values.push(v);
            }
        }
        StepFunction { breaks, values }
    }
}

/// Cumulative integral of a non-increasing step function `x*`, answering
/// `∫_0^t x*` exactly (piecewise linear in `t`).
#[derive(Debug, Clone)]
pub struct RunningIntegral {
    breaks: Vec<f64>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl RunningIntegral {
    /// `star` must be non-increasing and non-negative (a rearrangement).
    pub fn new(star: &StepFunction) -> Self {
        let mut cumulative = Vec::with_capacity(star.breaks.len());
        cumulative.push(0.0);
        let mut acc = 0.0;
        for (lo, hi, v) in star.intervals() {
            acc += v * (hi - lo);
            cumulative.push(acc);
        }
        RunningIntegral { breaks: star.breaks.clone(), values: star.values.clone(), cumulative }
    }

    pub fn at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return *self.cumulative.last().unwrap();
        }
        let idx = self.breaks[1..].partition_point(|&b| b < t);
        self.cumulative[idx] + self.values[idx] * (t - self.breaks[idx])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∫_0^{b_i} x*` at each break.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}

/// A family of pairwise disjoint intervals inside `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    intervals: Vec<(f64, f64)>,
}

impl Partition {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if !(lo >= 0.0 && hi <= 1.0 && hi >= lo) {
                return Err(Error::validation("partition intervals must lie in [0,1]"));
            }
        }
        let mut sorted = intervals.clone();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        if sorted.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::validation("partition intervals overlap"));
        }
        Ok(Partition { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|i| i.1 - i.0).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sf(pieces: &[(f64, f64)]) -> StepFunction {
        StepFunction::from_pieces(pieces).unwrap()
    }

    #[test]
    fn validation_errors() {
        assert!(StepFunction::new(vec![0.0, 0.5], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![f64::NAN]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![]).is_err());
    }

    #[test]
    fn distribution_examples() {
        let x = StepFunction::indicator(0.5).unwrap();
        assert_eq!(x.distribution(0.0), 0.5);
        assert_eq!(x.distribution(1.0), 0.0);
        let y = sf(&[(0.25, 2.0), (1.0, 1.0)]);
        assert_eq!(y.distribution(1.5), 0.25);
    }

    #[test]
    fn rearrange_examples() {
        let x = sf(&[(0.25, 1.0), (0.5, 3.0), (1.0, 2.0)]);
        let r = x.rearrange();
        assert_eq!(r, sf(&[(0.25, 3.0), (0.75, 2.0), (1.0, 1.0)]));
        let dec = sf(&[(0.3, -5.0), (0.6, 2.0), (1.0, 1.0)]);
        assert_eq!(dec.rearrange(), dec.abs());
    }

    #[test]
    fn double_star_examples() {
        let a = 0.3;
        let x = StepFunction::indicator(a).unwrap();
        assert!((x.double_star(0.2).unwrap() - 1.0).abs() < 1e-15);
        assert!((x.double_star(0.6).unwrap() - a / 0.6).abs() < 1e-15);
        let y = sf(&[(0.25, 3.0), (1.0, 1.0)]);
        assert!((y.double_star(0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!(y.double_star(0.0).is_err());
        assert!(y.double_star(1.5).is_err());
    }

    #[test]
    fn dilate_examples() {
        let x = StepFunction::indicator(0.5).unwrap();
        assert_eq!(x.dilate(1.0).unwrap(), x);
        assert_eq!(x.dilate(0.5).unwrap().simplify(), StepFunction::indicator(0.25).unwrap());
        assert_eq!(x.dilate(4.0).unwrap().simplify(), StepFunction::constant(1.0));
        assert!(x.dilate(0.0).is_err());
    }

    #[test]
    fn lp_examples() {
        let t = 0.3;
        let x = StepFunction::indicator(t).unwrap();
        for p in [1.0, 2.0, 3.5] {
            assert!((x.lp_norm(p) - libm::pow(t, 1.0 / p)).abs() < 1e-15);
        }
        let y = sf(&[(0.25, 2.0), (1.0, 0.0)]);
        assert!((y.lp_norm(2.0) - 1.0).abs() < 1e-15);
        assert_eq!(y.lp_norm(f64::INFINITY), 2.0);
    }

    #[test]
    fn refinement_and_blocks() {
        let a = sf(&[(0.5, 1.0), (1.0, 2.0)]);
        let b = sf(&[(0.25, 3.0), (1.0, 4.0)]);
        let s = a.add(&b).unwrap();
        assert_eq!(s, sf(&[(0.25, 4.0), (0.5, 5.0), (1.0, 6.0)]));
        let blocks = StepFunction::from_blocks(&[(0.5, 0.75, 2.0), (0.1, 0.2, 1.0)]).unwrap();
        assert_eq!(blocks, sf(&[(0.1, 0.0), (0.2, 1.0), (0.5, 0.0), (0.75, 2.0), (1.0, 0.0)]));
        assert!(StepFunction::from_blocks(&[(0.1, 0.5, 1.0), (0.4, 0.6, 1.0)]).is_err());
    }

    #[test]
    fn partition_checks() {
        assert!(Partition::new(vec![(0.0, 0.5), (0.4, 0.6)]).is_err());
        let p = Partition::new(vec![(0.5, 0.75), (0.0, 0.25)]).unwrap();
        assert_eq!(p.total_length(), 0.5);
    }
}
