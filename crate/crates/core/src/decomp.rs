//! Randomised certifiers for decomposability conditions.
//!
//! Each certifier samples inputs trial by trial (trial `i` draws from its own
//! generator, see [`crate::runner::trial_rng`]) and reports the observed
//! range of a ratio as an [`EquivalenceReport`]. Witnesses can be re-evaluated
//! with the matching `replay_*` function.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::orlicz::OrliczFunction;
use crate::phi::{PhiFunction, Schedule};
use crate::report::{escalates, EquivalenceReport, Witness};
use crate::runner::{trial_rng, TrialRunner};
use crate::spaces::SpaceSpec;
use crate::step::{Partition, StepFunction};
use crate::weights::Weight;

pub use crate::report::escalates as escalation_detected;

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.gen();
    math::exp(math::ln(lo) + u * (math::ln(hi) - math::ln(lo)))
}

/// A random step function with 1..=`max_pieces` pieces at uniform breaks
/// and values log-uniform in `[2^{-levels}, 2^{levels}]`.
pub fn random_step<R: Rng>(rng: &mut R, max_pieces: usize, levels: i32) -> StepFunction {
    let n = rng.gen_range(1..=max_pieces.max(1));
    let mut cuts: Vec<f64> = (1..n).map(|_| rng.gen::<f64>()).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    cuts.retain(|c| *c > 0.0);
    let mut breaks = alloc::vec![0.0];
    breaks.extend(cuts);
    breaks.push(1.0);
    let (lo, hi) = (math::pow2(-levels), math::pow2(levels));
    let values = (0..breaks.len() - 1).map(|_| log_uniform(rng, lo, hi)).collect();
    StepFunction::new(breaks, values).expect("sorted distinct cuts")
}

/// Law of the random disjoint families `x_1, …, x_n` with `supp x_i` inside
/// `supports[i]`.
///
/// Each trial picks, with equal odds, independent support measures (a
/// log-uniform fraction of each support) or one common measure for all
/// functions, and raw values or functions rescaled to unit norm. Each `x_i`
/// has 1..=`max_blocks` blocks with values log-uniform in
/// `[2^{-levels}, 2^{levels}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub supports: Vec<Partition>,
    pub levels: i32,
    pub max_blocks: usize,
    pub seed: u64,
}

/// One sampled family and how it was drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub members: Vec<StepFunction>,
    pub normalize: bool,
}

impl FamilySpec {
    /// Supports `M̄_1, …, M̄_n` of a weight.
    pub fn from_weight(w: &Weight, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("family size must be at least 1"));
        }
        Ok(FamilySpec { supports: w.mbar(n)?, levels: 8, max_blocks: 8, seed })
    }

    /// One explicit interval per function.
    pub fn from_intervals(intervals: &Partition, seed: u64) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::validation("family size must be at least 1"));
        }
        let supports = intervals.intervals().iter().map(|&iv| Partition::new(alloc::vec![iv])).collect::<Result<_>>()?;
        Ok(FamilySpec { supports, levels: 8, max_blocks: 8, seed })
    }

    pub fn n(&self) -> usize {
        self.supports.len()
    }

    pub fn with_max_blocks(mut self, b: usize) -> Self {
        self.max_blocks = b.max(1);
        self
    }

    pub fn sample(&self, trial: usize) -> Family {
        let mut rng = trial_rng(self.seed, trial);
        let floor = math::pow2(-self.levels);
        let common = rng.gen_bool(0.5);
        let normalize = rng.gen_bool(0.5);
        let smallest = self.supports.iter().map(|s| s.total_length()).fold(f64::INFINITY, f64::min);
        let shared = smallest * log_uniform(&mut rng, floor, 1.0);
        let members = self
            .supports
            .iter()
            .map(|s| {
                let used = if common { shared } else { s.total_length() * log_uniform(&mut rng, floor, 1.0) };
                let blocks = rng.gen_range(1..=self.max_blocks);
                let mut cuts: Vec<f64> = (1..blocks).map(|_| rng.gen::<f64>() * used).collect();
                cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                cuts.push(used);
                let mut pieces = Vec::with_capacity(blocks);
                let mut prev = 0.0;
                for c in cuts {
                    let v = log_uniform(&mut rng, floor, 1.0 / floor);
                    pieces.push((prev, c, v));
                    prev = c;
                }
                place_in_support(s, &pieces)
            })
            .collect();
        Family { members, normalize }
    }
}

/// Maps offsets `[lo, hi)` measured along the support (left to right through
/// its intervals) to actual blocks in `[0, 1]`.
fn place_in_support(support: &Partition, pieces: &[(f64, f64, f64)]) -> StepFunction {
    let mut ivs: Vec<(f64, f64)> = support.intervals().to_vec();
    ivs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut blocks = Vec::new();
    for &(lo, hi, v) in pieces {
        let mut offset = 0.0;
        for &(a, b) in &ivs {
            let len = b - a;
            let (s, e) = ((lo - offset).max(0.0), (hi - offset).min(len));
            if e > s {
                let start = a + s;
                let end = if e >= len { b } else { a + e };
                if end > start {
                    blocks.push((start, end, v));
                }
            }
            offset += len;
        }
    }
    StepFunction::from_blocks(&blocks).expect("blocks inside disjoint support")
}

fn lp_combine(parts: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        parts.iter().copied().fold(0.0, f64::max)
    } else {
        math::powf(parts.iter().map(|v| math::powf(*v, p)).sum::<f64>(), 1.0 / p)
    }
}

fn sum_family(xs: &[StepFunction]) -> Result<StepFunction> {
    let mut acc = StepFunction::zero();
    for x in xs {
        acc = acc.add(x)?;
    }
    Ok(acc)
}

/// `φ(Σ τ_r) / (Σ φ^p(τ_r))^{1/p}` (max-form for `p = ∞`).
pub fn replay_additivity(phi: &PhiFunction, p: f64, tau: &[f64]) -> f64 {
    let s: f64 = tau.iter().sum();
    let parts: Vec<f64> = tau.iter().map(|t| phi.eval(*t)).collect();
    phi.eval(s) / lp_combine(&parts, p)
}

/// Samples `0 < τ_r ≤ w_r` with a random truncation length, either
/// log-uniformly per coordinate or all equal to one common value (each with
/// probability 1/2), and reports [`replay_additivity`].
pub fn fundfunc_additivity_test<R: TrialRunner>(
    phi: &PhiFunction,
    p: f64,
    wr: &[f64],
    trials: usize,
    seed: u64,
    runner: &R,
) -> Result<EquivalenceReport> {
    if wr.is_empty() || wr.iter().any(|w| !(*w > 0.0)) || wr.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::validation("w_r must be positive and non-increasing"));
    }
    let results = runner.run(trials, |i| {
        let mut rng = trial_rng(seed, i);
        loop {
            let len = rng.gen_range(1..=wr.len());
            let tau: Vec<f64> = if rng.gen_bool(0.5) {
                let mu = wr[len - 1] * log_uniform(&mut rng, math::pow2(-8), 1.0);
                alloc::vec![mu; len]
            } else {
                wr[..len].iter().map(|w| w * log_uniform(&mut rng, math::pow2(-16), 1.0)).collect()
            };
            if tau.iter().sum::<f64>() <= 1.0 {
                let r = replay_additivity(phi, p, &tau);
                return (r, tau);
            }
        }
    });
    let mut rep = EquivalenceReport::empty(p);
    for (r, tau) in results {
        rep.observe(r, || Witness::Values(tau));
    }
    Ok(rep)
}

/// `‖Σ x_i‖_X / (Σ ‖x_i‖_X^p)^{1/p}`.
pub fn replay_family(space: &SpaceSpec, p: f64, xs: &[StepFunction]) -> Result<f64> {
    let total = space.norm(&sum_family(xs)?)?;
    let parts = xs.iter().map(|x| space.norm(x)).collect::<Result<Vec<f64>>>()?;
    Ok(total / lp_combine(&parts, p))
}

fn family_ratio(space: &SpaceSpec, p: f64, fam: Family) -> Result<(f64, Vec<StepFunction>)> {
    let mut xs = fam.members;
    if fam.normalize {
        for x in xs.iter_mut() {
            let n = space.norm(x)?;
            if n > 0.0 {
                *x = x.scale(1.0 / n);
            }
        }
    }
    let r = replay_family(space, p, &xs)?;
    Ok((r, xs))
}

/// Disjoint random families drawn from `fam` against the `ℓ_p` sum of
/// their norms.
pub fn decomp_empirical_test<R: TrialRunner>(
    space: &SpaceSpec,
    p: f64,
    fam: &FamilySpec,
    trials: usize,
    runner: &R,
) -> Result<EquivalenceReport> {
    let results = runner.run(trials, |i| family_ratio(space, p, fam.sample(i)));
    let mut rep = EquivalenceReport::empty(p);
    for res in results {
        let (r, xs) = res?;
        rep.observe(r, || Witness::Family(xs));
    }
    Ok(rep)
}

/// Measured `max F(2u)/F(u)` for `u ∈ [1, 2^{40}]`; larger than `1e6`
/// counts as failing the `Δ_2` audit.
pub fn delta2_audit(f: &OrliczFunction) -> Result<f64> {
    let c = f.delta2_constant(1.0, math::pow2(40));
    if !c.is_finite() || c > 1e6 {
        return Err(Error::validation(format!("Delta_2 audit failed: F(2u)/F(u) reaches {c}")));
    }
    Ok(c)
}

/// The family test for `L_F` restricted to single blocks `c_k χ_{A_k}`,
/// `A_k ⊂ M̄_k`.
pub fn orlicz_char_test<R: TrialRunner>(
    f: &OrliczFunction,
    p: f64,
    fam: &FamilySpec,
    trials: usize,
    runner: &R,
) -> Result<EquivalenceReport> {
    delta2_audit(f)?;
    let fam = fam.clone().with_max_blocks(1);
    decomp_empirical_test(&SpaceSpec::orlicz(f.clone()), p, &fam, trials, runner)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMode {
    UpperP,
    LowerQ,
}

/// One-sided estimates over `n` arbitrary disjoint sets `A_k` (the `n`
/// equal cells of `[0, 1]`): the maximum of `‖Σ c_k χ_{A_k}‖ / (Σ ‖·‖^r)^{1/r}`
/// in upper mode, of its reciprocal in lower mode.
pub fn estimate_test<R: TrialRunner>(
    f: &OrliczFunction,
    mode: EstimateMode,
    r: f64,
    n: usize,
    trials: usize,
    seed: u64,
    runner: &R,
) -> Result<EquivalenceReport> {
    if !(r > 1.0) || n == 0 {
        return Err(Error::validation("estimate test needs r > 1 and n >= 1"));
    }
    let cells: Vec<(f64, f64)> = (0..n).map(|k| (k as f64 / n as f64, (k + 1) as f64 / n as f64)).collect();
    let fam = FamilySpec::from_intervals(&Partition::new(cells)?, seed)?.with_max_blocks(1);
    let mut rep = decomp_empirical_test(&SpaceSpec::orlicz(f.clone()), r, &fam, trials, runner)?;
    if mode == EstimateMode::LowerQ {
        let (lo, hi) = (rep.min_ratio, rep.max_ratio);
        rep.min_ratio = 1.0 / hi;
        rep.max_ratio = 1.0 / lo;
        core::mem::swap(&mut rep.witness_min, &mut rep.witness_max);
    }
    Ok(rep)
}

/// Smallest accepted gap `q` in `q w_{r+1} ≤ w_r`.
pub const MIN_GAP: f64 = 1.125;

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentTransferReport {
    pub q: f64,
    pub regvar: EquivalenceReport,
    pub additivity: Option<EquivalenceReport>,
}

impl ExponentTransferReport {
    pub fn passed(&self) -> bool {
        self.regvar.passed_at_c.is_some() && self.additivity.is_some()
    }
}

/// Checks the geometric gap of `(w_r)`, runs the regular-variation test with
/// `τ(N) = w_N`, and when that passes the fundamental-function additivity
/// test on the same `(w_r)`.
pub fn exponent_transfer_check<R: TrialRunner>(
    phi: &PhiFunction,
    w: &Weight,
    p: f64,
    c: f64,
    trials: usize,
    seed: u64,
    runner: &R,
) -> Result<ExponentTransferReport> {
    let wr = w.resolved_wr();
    if wr.len() < 2 {
        return Err(Error::validation("hypothesis violated: fewer than two levels"));
    }
    let q = wr.windows(2).map(|v| v[0] / v[1]).fold(f64::INFINITY, f64::min);
    if q < MIN_GAP {
        return Err(Error::validation(format!("hypothesis violated: best gap q = {q} < {MIN_GAP}")));
    }
    let sched = Schedule::list(wr.clone())?;
    let regvar = phi.regvar_test(p, &sched, c, wr.len())?;
    let additivity = if regvar.passed_at_c.is_some() {
        Some(fundfunc_additivity_test(phi, p, &wr, trials, seed, runner)?)
    } else {
        None
    };
    Ok(ExponentTransferReport { q, regvar, additivity })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityReport {
    pub m_norm: f64,
    pub pairing_sup: f64,
    pub ratio: f64,
}

/// `‖x‖_{M_φ̃}` with `φ̃ = t/φ` against `max_s (1/φ(s)) ∫_0^s x*` over
/// `s_grid` (the breaks of `x*` when `None`).
pub fn duality_pair_test(phi: &PhiFunction, x: &StepFunction, s_grid: Option<&[f64]>) -> Result<DualityReport> {
    let m_norm = SpaceSpec::marcinkiewicz(PhiFunction::dual(phi.clone()))?.norm(x)?;
    let star = x.rearrange();
    let run = crate::step::RunningIntegral::new(&star);
    let grid: Vec<f64> = match s_grid {
        Some(g) => g.to_vec(),
        None => star.breaks()[1..].to_vec(),
    };
    let pairing_sup = grid.iter().filter(|s| **s > 0.0).map(|&s| run.at(s) / phi.eval(s)).fold(0.0, f64::max);
    Ok(DualityReport { m_norm, pairing_sup, ratio: m_norm / pairing_sup })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualTransferReport {
    /// Family sizes tested.
    pub sizes: Vec<usize>,
    /// Additivity of `t/φ(t)` with `p = 1`, one report per size.
    pub dual_additivity: Vec<EquivalenceReport>,
    /// Family test of `M_φ`, one report per size.
    pub marcinkiewicz: Vec<EquivalenceReport>,
    pub p_marcinkiewicz: f64,
    pub dual_escalates: bool,
    pub marcinkiewicz_escalates: bool,
}

impl DualTransferReport {
    pub fn agree(&self) -> bool {
        self.dual_escalates == self.marcinkiewicz_escalates
    }
}

/// Runs the additivity test for `t/φ(t)` with `p = 1` and the family test of
/// `M_φ` (exponent from the indices of `φ`) at each family size, and flags
/// escalation on each side.
pub fn dual_decomp_transfer<R: TrialRunner>(
    phi: &PhiFunction,
    w: &Weight,
    sizes: &[usize],
    trials: usize,
    seed: u64,
    runner: &R,
) -> Result<DualTransferReport> {
    let idx = phi.dilation_indices()?;
    if idx.delta >= 0.99 {
        return Err(Error::domain("dual transfer needs an upper index below 1"));
    }
    let space = SpaceSpec::marcinkiewicz(phi.clone())?;
    let p_m = idx.exponent();
    let dual = PhiFunction::dual(phi.clone());
    let wr = w.wr();
    let mut dual_reports = Vec::new();
    let mut m_reports = Vec::new();
    for &n in sizes {
        let n_eff = n.min(wr.len());
        dual_reports.push(fundfunc_additivity_test(&dual, 1.0, &wr[..n_eff], trials, seed, runner)?);
        let fam = FamilySpec::from_weight(w, n_eff, seed)?;
        m_reports.push(decomp_empirical_test(&space, p_m, &fam, trials, runner)?);
    }
    let curve = |reps: &[EquivalenceReport]| -> Vec<(usize, f64)> {
        sizes.iter().copied().zip(reps.iter().map(|r| r.constant())).collect()
    };
    let dual_escalates = escalates(&curve(&dual_reports));
    let marcinkiewicz_escalates = escalates(&curve(&m_reports));
    Ok(DualTransferReport {
        sizes: sizes.to_vec(),
        dual_additivity: dual_reports,
        marcinkiewicz: m_reports,
        p_marcinkiewicz: p_m,
        dual_escalates,
        marcinkiewicz_escalates,
    })
}

/// `‖x‖_X / ‖x‖_{Λ_{p,φ}}`.
pub fn replay_vs_lorentz(space: &SpaceSpec, lorentz: &SpaceSpec, x: &StepFunction) -> Result<f64> {
    Ok(space.norm(x)? / lorentz.norm(x)?)
}

/// Ratio of the norm of `space` to the `Λ_{p,φ}` norm over random step
/// functions with up to 64 pieces.
pub fn space_vs_lorentz<R: TrialRunner>(
    space: &SpaceSpec,
    p: f64,
    phi: &PhiFunction,
    trials: usize,
    seed: u64,
    runner: &R,
) -> Result<EquivalenceReport> {
    let lorentz = SpaceSpec::lorentz(p, phi.clone())?;
    let results = runner.run(trials, |i| {
        let mut rng = trial_rng(seed, i);
        let x = random_step(&mut rng, 64, 8);
        replay_vs_lorentz(space, &lorentz, &x).map(|r| (r, x))
    });
    let mut rep = EquivalenceReport::empty(p);
    for res in results {
        let (r, x) = res?;
        rep.observe(r, || Witness::Family(alloc::vec![x]));
    }
    Ok(rep)
}

/// Two-sided constants of a family test at several family sizes.
pub fn escalation_curve<R: TrialRunner>(
    space: &SpaceSpec,
    p: f64,
    w: &Weight,
    sizes: &[usize],
    trials: usize,
    seed: u64,
    runner: &R,
) -> Result<Vec<(usize, EquivalenceReport)>> {
    sizes
        .iter()
        .map(|&n| {
            let fam = FamilySpec::from_weight(w, n, seed)?;
            Ok((n, decomp_empirical_test(space, p, &fam, trials, runner)?))
        })
        .collect()
}

/// Human-readable verdict line for an escalation curve.
pub fn describe_curve(curve: &[(usize, EquivalenceReport)]) -> String {
    let pts: Vec<String> = curve.iter().map(|(n, r)| format!("n={n}: C={:.4}", r.constant())).collect();
    pts.join(", ")
}
