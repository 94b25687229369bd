//! Peetre's K-functional for the couples `(X, X(w))` and `(L_1, L_∞)`.
//!
//! The generic solver restricts the infimum to splits `x = (|x| − g) + g`
//! with `0 ≤ g ≤ |x|` on the common refinement of `x` and `w`. For a lattice
//! couple on one measure space this loses nothing: truncating both parts of
//! any decomposition to the sign and size of `x` lowers neither norm.

use alloc::vec::Vec;

use crate::bundle;
use crate::error::Result;
use crate::math;
use crate::numeric;
use crate::runner::TrialRunner;
use crate::spaces::SpaceSpec;
use crate::step::{RunningIntegral, StepFunction};
use crate::weights::Weight;

/// `K(t, x; L_1, L_∞) = ∫_0^{min(t,1)} x*`.
pub fn k_l1_linf(x: &StepFunction, t: f64) -> f64 {
    RunningIntegral::new(&x.rearrange()).at(t.min(1.0))
}

/// `(∫ |x|^p min(1, t w)^p)^{1/p}`, the pointwise `p`-version of the
/// K-functional of `(L_p, L_p(w))`. Exact for `p = 1`.
pub fn k_lp_weighted(p: f64, w: &Weight, x: &StepFunction, t: f64) -> f64 {
    let (breaks, xv, wv) = x.refine_with(w.base());
    let mut total = 0.0;
    for i in 0..xv.len() {
        let len = breaks[i + 1] - breaks[i];
        let m = (t * wv[i]).min(1.0);
        total += math::powf(math::abs(xv[i]) * m, p) * len;
    }
    math::powf(total, 1.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KOptions {
    /// Relative improvement per sweep below which descent stops.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for KOptions {
    fn default() -> Self {
        KOptions { tol: 1e-7, max_sweeps: 500 }
    }
}

/// Result of one generic K-functional minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct KSolution {
    pub value: f64,
    /// Sweeps used by the start that produced `value`.
    pub sweeps: usize,
    /// 0: `g = 0`, 1: `g = |x|`, 2: best threshold split.
    pub start: usize,
    pub converged: bool,
    /// The optimal `g` on the refined breaks.
    pub g: StepFunction,
    /// Certified bound on `value − K`; infinite when no certificate was
    /// obtained. Valid when the norm is convex.
    pub gap: f64,
    /// Bundle iterations spent polishing the best start.
    pub polish_steps: usize,
}

struct Problem<'a> {
    space: &'a SpaceSpec,
    breaks: Vec<f64>,
    ax: Vec<f64>,
    wv: Vec<f64>,
    t: f64,
}

impl Problem<'_> {
    fn objective(&self, g: &[f64]) -> Result<f64> {
        let rest: Vec<f64> = self.ax.iter().zip(g).map(|(a, b)| (a - b).max(0.0)).collect();
        let gw: Vec<f64> = g.iter().zip(&self.wv).map(|(a, w)| a * w).collect();
        let x0 = StepFunction::new(self.breaks.clone(), rest)?;
        let x1 = StepFunction::new(self.breaks.clone(), gw)?;
        Ok(self.space.norm(&x0)? + self.t * self.space.norm(&x1)?)
    }

    /// Line search along `g + s·dir`, `s` ranging over the feasible
    /// segment; accepts the step only if it improves `best`.
    fn line(&self, g: &mut [f64], best: &mut f64, dir: &[f64]) -> Result<()> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..g.len() {
            let d = dir[i];
            if d > 0.0 {
                lo = lo.max(-g[i] / d);
                hi = hi.min((self.ax[i] - g[i]) / d);
            } else if d < 0.0 {
                lo = lo.max((self.ax[i] - g[i]) / d);
                hi = hi.min(-g[i] / d);
            }
        }
        if !(hi - lo > 0.0) || !lo.is_finite() || !hi.is_finite() {
            return Ok(());
        }
        let mut err = None;
        let mut trial = g.to_vec();
        // search over u ∈ [0, 1] so the tolerance is relative to the segment
        let span = hi - lo;
        let (u, f) = numeric::golden_section_min(
            |u| {
                let s = lo + u * span;
                for i in 0..trial.len() {
                    trial[i] = (g[i] + s * dir[i]).clamp(0.0, self.ax[i]);
                }
                match self.objective(&trial) {
                    Ok(v) => v,
                    Err(e) => {
                        err = Some(e);
                        f64::INFINITY
                    }
                }
            },
            0.0,
            1.0,
            1e-10,
        );
        let s = lo + u * span;
        if let Some(e) = err {
            return Err(e);
        }
        if f < *best {
            *best = f;
            for i in 0..g.len() {
                g[i] = (g[i] + s * dir[i]).clamp(0.0, self.ax[i]);
            }
        }
        Ok(())
    }

    /// Directions that move a whole upper level set of `|x| − g` (or of
    /// `g w`) at once. Rearrangement-invariant norms are kinked where values
    /// tie, and single coordinates cannot cross such kinks.
    fn level_moves(&self, g: &mut [f64], best: &mut f64) -> Result<()> {
        let n = g.len();
        for side in 0..2 {
            let vals: Vec<f64> = (0..n)
                .map(|i| if side == 0 { self.ax[i] - g[i] } else { g[i] * self.wv[i] })
                .collect();
            let top = vals.iter().copied().fold(0.0, f64::max);
            let mut levels: Vec<f64> = vals.iter().copied().filter(|v| *v > 0.0).collect();
            levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
            levels.dedup_by(|a, b| *b - *a <= 1e-9 * top);
            for level in levels {
                let dir: Vec<f64> = (0..n)
                    .map(|i| {
                        if self.ax[i] == 0.0 || vals[i] < level - 1e-9 * top {
                            0.0
                        } else if side == 0 {
                            1.0
                        } else {
                            1.0 / self.wv[i]
                        }
                    })
                    .collect();
                self.line(g, best, &dir)?;
            }
        }
        Ok(())
    }

    /// Joint moves of two coordinates, equal in `g` or in `g w`, with both
    /// signs. Used once the cheaper moves stall.
    fn pair_moves(&self, g: &mut [f64], best: &mut f64) -> Result<()> {
        let n = g.len();
        let mut dir = alloc::vec![0.0; n];
        for i in 0..n {
            for j in i + 1..n {
                if self.ax[i] == 0.0 || self.ax[j] == 0.0 {
                    continue;
                }
                for (di, dj) in [
                    (1.0, 1.0),
                    (1.0, -1.0),
                    (1.0 / self.wv[i], 1.0 / self.wv[j]),
                    (1.0 / self.wv[i], -1.0 / self.wv[j]),
                ] {
                    dir[i] = di;
                    dir[j] = dj;
                    self.line(g, best, &dir)?;
                }
                dir[i] = 0.0;
                dir[j] = 0.0;
            }
        }
        Ok(())
    }

    /// Value and subgradient of the objective extended to all of `ℝⁿ`,
    /// `‖|x| − g‖ + t‖g w‖`, which is convex and has the same infimum.
    fn oracle(&self, g: &[f64]) -> Result<(f64, Vec<f64>)> {
        let rest: Vec<f64> = self.ax.iter().zip(g).map(|(a, b)| a - b).collect();
        let gw: Vec<f64> = g.iter().zip(&self.wv).map(|(a, w)| a * w).collect();
        let (n0, s0) = self.space.norm_subgradient(&StepFunction::new(self.breaks.clone(), rest)?)?;
        let (n1, s1) = self.space.norm_subgradient(&StepFunction::new(self.breaks.clone(), gw)?)?;
        let grad = (0..g.len()).map(|i| self.t * self.wv[i] * s1[i] - s0[i]).collect();
        Ok((n0 + self.t * n1, grad))
    }

    /// Bundle iterations from `g`, returning the projected end point.
    fn polish(&self, g: Vec<f64>, opts: &KOptions) -> Result<(f64, Vec<f64>, f64, usize)> {
        let n = g.len();
        let zero = alloc::vec![0.0; n];
        let out = bundle::bundle_minimize(|g| self.oracle(g), g, &zero, &self.ax, 1e-2 * opts.tol, 40 * n + 200)?;
        // truncating to 0 ≤ g ≤ |x| lowers neither norm
        let g: Vec<f64> = out.x.iter().zip(&self.ax).map(|(v, a)| v.clamp(0.0, *a)).collect();
        let value = self.objective(&g)?;
        Ok((value, g, out.gap + (value - out.value).max(0.0), out.iterations))
    }

    fn descend(&self, mut g: Vec<f64>, opts: &KOptions) -> Result<(f64, Vec<f64>, usize, bool)> {
        let mut best = self.objective(&g)?;
        let n = g.len();
        let mut unit = alloc::vec![0.0; n];
        for sweep in 1..=opts.max_sweeps {
            let before = best;
            for i in 0..n {
                if self.ax[i] == 0.0 {
                    continue;
                }
                unit[i] = 1.0;
                self.line(&mut g, &mut best, &unit)?;
                unit[i] = 0.0;
            }
            self.level_moves(&mut g, &mut best)?;
            let stalled = |b: f64| before - b <= opts.tol * b.abs().max(f64::MIN_POSITIVE);
            if stalled(best) {
                self.pair_moves(&mut g, &mut best)?;
                if stalled(best) {
                    return Ok((best, g, sweep, true));
                }
            }
        }
        Ok((best, g, opts.max_sweeps, false))
    }
}

/// `inf_{0 ≤ g ≤ |x|} ‖|x| − g‖_X + t‖g w‖_X` by projected coordinate
/// descent with golden-section line searches, started from `g = 0`,
/// `g = |x|` and the best threshold split `g = |x| χ_{w ≤ s}`.
pub fn k_generic(space: &SpaceSpec, w: &Weight, x: &StepFunction, t: f64, opts: &KOptions) -> Result<KSolution> {
    let (breaks, xv, wv) = x.refine_with(w.base());
    let ax: Vec<f64> = xv.iter().map(|v| math::abs(*v)).collect();
    let prob = Problem { space, breaks, ax, wv, t };

    let zero = alloc::vec![0.0; prob.ax.len()];
    let full = prob.ax.clone();
    let mut thresholds: Vec<f64> = prob.wv.clone();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();
    let mut best_split = (f64::INFINITY, zero.clone());
    for s in thresholds {
        let g: Vec<f64> = prob.ax.iter().zip(&prob.wv).map(|(a, w)| if *w <= s { *a } else { 0.0 }).collect();
        let f = prob.objective(&g)?;
        if f < best_split.0 {
            best_split = (f, g);
        }
    }

    let mut best: Option<(f64, Vec<f64>, usize, usize, bool)> = None;
    for (start, g0) in [zero, full, best_split.1].into_iter().enumerate() {
        let (value, g, sweeps, converged) = prob.descend(g0, opts)?;
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, g, sweeps, start, converged));
        }
    }
    let (mut value, mut g, sweeps, start, converged) = best.unwrap();
    let (pv, pg, gap, polish_steps) = prob.polish(g.clone(), opts)?;
    if pv < value {
        (value, g) = (pv, pg);
    }
    let gap = gap + (value - pv).max(0.0);
    Ok(KSolution {
        value,
        sweeps,
        start,
        converged: converged || gap <= opts.tol * value,
        g: StepFunction::new(prob.breaks.clone(), g)?,
        gap,
        polish_steps,
    })
}

/// `K(t, x)` sampled on a grid of `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct KCurve {
    pub t_grid: Vec<f64>,
    pub k_values: Vec<f64>,
    pub converged: bool,
}

impl KCurve {
    /// Worst relative violation of "K non-decreasing" and "K/t
    /// non-increasing" along the grid.
    pub fn monotonicity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 1..self.t_grid.len() {
            let (k0, k1) = (self.k_values[i - 1], self.k_values[i]);
            let (t0, t1) = (self.t_grid[i - 1], self.t_grid[i]);
            worst = worst.max((k0 - k1) / k0.max(f64::MIN_POSITIVE));
            worst = worst.max((k1 / t1 - k0 / t0) / (k0 / t0).max(f64::MIN_POSITIVE));
        }
        worst.max(0.0)
    }
}

/// `t_j = 2^{j/per_octave}` for `j` from `-30·per_octave` to `hi·per_octave`.
pub fn log_grid(per_octave: u32, hi_octaves: i32) -> Vec<f64> {
    let n = per_octave as i32;
    (-30 * n..=hi_octaves * n).map(|j| math::powf(2.0, j as f64 / n as f64)).collect()
}

pub fn k_curve<R: TrialRunner>(
    space: &SpaceSpec,
    w: &Weight,
    x: &StepFunction,
    t_grid: &[f64],
    opts: &KOptions,
    runner: &R,
) -> Result<KCurve> {
    let sols = runner.run(t_grid.len(), |i| k_generic(space, w, x, t_grid[i], opts));
    let mut k_values = Vec::with_capacity(sols.len());
    let mut converged = true;
    for s in sols {
        let s = s?;
        converged &= s.converged;
        k_values.push(s.value);
    }
    Ok(KCurve { t_grid: t_grid.to_vec(), k_values, converged })
}

/// Weighted `ℓ_q` norm `(Σ (c_i K(t_i))^q)^{1/q}` of a K-curve sampled on
/// `(t_i, c_i)` pairs; `q = ∞` takes the maximum.
pub fn k_method_norm(curve: &[f64], grid_weights: &[f64], q: f64) -> f64 {
    let terms = curve.iter().zip(grid_weights).map(|(k, c)| k * c);
    if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        math::powf(terms.map(|v| math::powf(v, q)).sum::<f64>(), 1.0 / q)
    }
}

/// Computes the curve with [`k_generic`] and then [`k_method_norm`].
pub fn k_method_norm_of<R: TrialRunner>(
    space: &SpaceSpec,
    w: &Weight,
    x: &StepFunction,
    q: f64,
    grid: &[(f64, f64)],
    opts: &KOptions,
    runner: &R,
) -> Result<f64> {
    let ts: Vec<f64> = grid.iter().map(|g| g.0).collect();
    let cs: Vec<f64> = grid.iter().map(|g| g.1).collect();
    let curve = k_curve(space, w, x, &ts, opts, runner)?;
    Ok(k_method_norm(&curve.k_values, &cs, q))
}
