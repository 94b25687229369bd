//! Explicit constructions: a quasi-concave `φ` adapted to a weight, its
//! `p`-th roots, interval systems for Orlicz functions and a gallery of
//! named examples.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::decomp::random_step;
use crate::error::{Error, Result};
use crate::math;
use crate::orlicz::{regvar_orlicz_test, OrliczFunction};
use crate::phi::{PhiFunction, Schedule};
use crate::report::{EquivalenceReport, Witness};
use crate::runner::{trial_rng, TrialRunner};
use crate::step::Partition;
use crate::weights::Weight;

/// `G(α) = Σ_r min(α, w_r)` over the available levels.
pub fn g_function(w: &Weight, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::validation("G needs alpha >= 0"));
    }
    Ok(w.wr().iter().map(|wr| wr.min(alpha)).sum())
}

/// Smallest dyadic exponent the greedy level search will try.
pub const LEVEL_FLOOR_EXP: i32 = 1020;

pub const DEFAULT_LEVELS: usize = 40;

/// Result of [`build_phi_theorem6`].
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem6Build {
    /// `1 = t_0 > t_1 > … > t_K`, all powers of two.
    pub t_levels: Vec<f64>,
    pub phi: PhiFunction,
    /// `G(t_k)` for each level.
    pub g_samples: Vec<f64>,
}

/// Greedy construction: `t_k` is the largest `2^{-m}` with `t_k < t_{k-1}/3`
/// and `G(t_k) ≤ 2^{-(k-1)} t_{k-1}`; `φ` has slope `2^k` on
/// `(t_{k+1}, t_k]`. The result is audited before it is returned.
pub fn build_phi_theorem6(w: &Weight, k: usize) -> Result<Theorem6Build> {
    if k == 0 {
        return Err(Error::validation("need at least one level (K >= 1)"));
    }
    let mut levels = alloc::vec![1.0];
    let mut g_samples = alloc::vec![g_function(w, 1.0)?];
    let mut m = 0;
    for step in 1..=k {
        let prev = levels[step - 1];
        let budget = math::pow2(-(step as i32 - 1)) * prev;
        loop {
            m += 1;
            if m > LEVEL_FLOOR_EXP {
                return Err(Error::non_convergence(format!(
                    "greedy level search stalled at level {step}: no admissible 2^-m with m <= {LEVEL_FLOOR_EXP} \
                     (t_{} = {prev:e}, G budget {budget:e})",
                    step - 1
                )));
            }
            let t = math::pow2(-m);
            if 3.0 * t < prev {
                let g = g_function(w, t)?;
                if g <= budget {
                    levels.push(t);
                    g_samples.push(g);
                    break;
                }
            }
        }
    }
    let phi = PhiFunction::theorem6(levels.clone())?;
    let build = Theorem6Build { t_levels: levels, phi, g_samples };
    build.audit(w)?;
    Ok(build)
}

impl Theorem6Build {
    pub fn depth(&self) -> usize {
        self.t_levels.len() - 1
    }

    /// Re-checks the level gaps, the `G` bounds, the slopes and the
    /// geometric decay `2^k t_k ≤ (2/3)^k` of the derivative mass.
    pub fn audit(&self, w: &Weight) -> Result<()> {
        let t = &self.t_levels;
        for k in 1..t.len() {
            if !(3.0 * t[k] < t[k - 1]) {
                return Err(Error::validation(format!("level gap fails at k = {k}")));
            }
            let g = g_function(w, t[k])?;
            if g > math::pow2(-(k as i32 - 1)) * t[k - 1] {
                return Err(Error::validation(format!("G bound fails at k = {k}: G = {g:e}")));
            }
            if math::pow2(k as i32) * t[k] > math::powf(2.0 / 3.0, k as f64) {
                return Err(Error::validation(format!("derivative mass does not decay at k = {k}")));
            }
        }
        for k in 0..t.len() - 1 {
            let slope = (self.phi.eval(t[k]) - self.phi.eval(t[k + 1])) / (t[k] - t[k + 1]);
            let expect = math::pow2(k as i32);
            if math::abs(slope / expect - 1.0) > 1e-9 {
                return Err(Error::validation(format!("slope on level {k} is {slope}, expected {expect}")));
            }
        }
        let last = t.len() - 1;
        let bottom = self.phi.eval(t[last]) / t[last];
        if math::abs(bottom / math::pow2(last as i32) - 1.0) > 1e-9 {
            return Err(Error::validation("bottom slope is not 2^K"));
        }
        Ok(())
    }

    /// `φ_k`: the same levels cut after `t_k`.
    pub fn truncation(&self, k: usize) -> Result<PhiFunction> {
        PhiFunction::theorem6(self.t_levels[..=k.min(self.depth())].to_vec())
    }
}

/// `Σ φ(d_r) / φ(Σ d_r)`.
pub fn replay_ratio(phi: &PhiFunction, d: &[f64]) -> f64 {
    let total: f64 = d.iter().sum();
    d.iter().map(|x| phi.eval(*x)).sum::<f64>() / phi.eval(total)
}

/// Bound certified for every truncation of a valid build.
pub const RATIO_BOUND: f64 = 3.0 + 1e-6;

/// Samples `0 < d_r ≤ w_r` (trial 0 is `d = w` itself) and records the
/// largest [`replay_ratio`] over all truncations `φ_0, …, φ_K`.
pub fn ratio_bound_check<R: TrialRunner>(
    build: &Theorem6Build,
    w: &Weight,
    trials: usize,
    seed: u64,
    runner: &R,
) -> Result<EquivalenceReport> {
    build.audit(w)?;
    let wr = w.wr();
    let truncations = (0..=build.depth()).map(|k| build.truncation(k)).collect::<Result<Vec<_>>>()?;
    let results = runner.run(trials, |i| {
        let d: Vec<f64> = if i == 0 {
            wr.clone()
        } else {
            let mut rng = trial_rng(seed, i);
            let len = rng.gen_range(1..=wr.len());
            if rng.gen_bool(0.5) {
                let u: f64 = rng.gen_range(-16.0..=0.0);
                wr[..len].iter().map(|x| x * math::powf(2.0, u)).collect()
            } else {
                wr[..len].iter().map(|x| x * math::powf(2.0, rng.gen_range(-16.0..=0.0))).collect()
            }
        };
        let worst = truncations.iter().map(|phi| replay_ratio(phi, &d)).fold(0.0, f64::max);
        (worst, d)
    });
    let mut rep = EquivalenceReport::empty(1.0);
    for (r, d) in results {
        rep.observe(r, || Witness::Values(d));
    }
    Ok(rep.judge(RATIO_BOUND))
}

/// `ψ = φ^{1/p}` for `p > 1`, audited for quasi-concavity.
pub fn psi_p(phi: &PhiFunction, p: f64) -> Result<PhiFunction> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::validation("psi_p needs a finite p > 1"));
    }
    let psi = match phi {
        PhiFunction::Power { alpha } => PhiFunction::power(alpha / p)?,
        _ => PhiFunction::pth_root(phi.clone(), p)?,
    };
    psi.audit_quasi_concave()?;
    Ok(psi)
}

/// Range of `ψ(t)/t^{1/p}` over `t = 2^{-j}`, `j = 0..=60`.
pub fn power_deviation(psi: &PhiFunction, p: f64) -> (f64, f64) {
    (0..=60).fold((f64::INFINITY, 0.0f64), |(lo, hi), j| {
        let t = math::pow2(-j);
        let r = psi.eval(t) / math::powf(t, 1.0 / p);
        (lo.min(r), hi.max(r))
    })
}

/// `v_k` for `k = 1..=k_max`: the largest `t_0(u)` over the grid points
/// `u = 2^{-j/4} ∈ [k^{-2}/8, 1]`, made non-decreasing.
pub fn v_schedule(f: &OrliczFunction, p: f64, c: f64, k_max: usize, t_max: f64) -> Result<Vec<f64>> {
    if k_max == 0 {
        return Err(Error::validation("v schedule needs k_max >= 1"));
    }
    let u_min = 1.0 / (8.0 * (k_max * k_max) as f64);
    let steps = math::floor(-4.0 * math::ln(u_min) / core::f64::consts::LN_2) as i32;
    let grid: Vec<f64> = (0..=steps).map(|j| math::powf(2.0, -(j as f64) / 4.0)).collect();
    let rep = regvar_orlicz_test(f, p, c, &grid, t_max);
    let mut out = Vec::with_capacity(k_max);
    let mut running = 0.0f64;
    for k in 1..=k_max {
        let lo = 1.0 / (8.0 * (k * k) as f64);
        for &(u, t0) in rep.t0.iter().filter(|(u, _)| *u >= lo) {
            match t0 {
                Some(t) => running = running.max(t),
                None => {
                    return Err(Error::non_convergence(format!(
                        "no t_0 up to {t_max:e} for u = {u:e} at tolerance {c}"
                    )))
                }
            }
        }
        out.push(running);
    }
    Ok(out)
}

/// The weight of the schedule construction with
/// `τ(N) = min(1, 2^{-N-1}/F(v_N))`, `v` from [`v_schedule`].
pub fn orlicz_weight(f: &OrliczFunction, p: f64, c: f64, n_max: usize, t_max: f64) -> Result<Weight> {
    let v = v_schedule(f, p, c, n_max, t_max)?;
    let mut tau = Vec::with_capacity(n_max);
    let mut prev = 1.0f64;
    for (i, vk) in v.iter().enumerate() {
        let t = (math::pow2(-(i as i32) - 2) / f.eval(*vk)).min(prev);
        if !(t > 0.0) {
            break;
        }
        tau.push(t);
        prev = t;
    }
    Weight::from_schedule(&Schedule::list(tau)?, n_max)
}

/// Intervals `Δ_1, Δ_2, …` packed from `0` with
/// `m(Δ_k) = min(2^{-k-1}/F(v_k), remaining length)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrliczIntervals {
    pub partition: Partition,
    pub v: Vec<f64>,
    pub warnings: Vec<String>,
}

pub fn orlicz_intervals(f: &OrliczFunction, v: &[f64], k: usize) -> Result<OrliczIntervals> {
    if k == 0 || v.len() < k {
        return Err(Error::validation(format!("need {k} schedule values, got {}", v.len())));
    }
    let v = &v[..k];
    if v.iter().any(|x| !(*x > 0.0)) || v.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::validation("v_k must be positive and increasing"));
    }
    let mut ivs = Vec::with_capacity(k);
    let mut warnings = Vec::new();
    let mut at = 0.0;
    for (i, &vk) in v.iter().enumerate() {
        let fv = f.eval(vk);
        if !fv.is_finite() || !(fv > 0.0) {
            return Err(Error::domain(format!("F(v_{}) = {fv} is not a positive finite number", i + 1)));
        }
        let len = (math::pow2(-(i as i32) - 2) / fv).min(1.0 - at);
        if !(len > 0.0) {
            warnings.push(format!("length budget exhausted after {i} intervals"));
            break;
        }
        let end = if at + len >= 1.0 { 1.0 } else { at + len };
        ivs.push((at, end));
        at = end;
    }
    Ok(OrliczIntervals { partition: Partition::new(ivs)?, v: v.to_vec(), warnings })
}

/// Largest `∫_{Δ_k} F(z) / 2^{-k-1}` over random step functions `z` on
/// `Δ_k` with values in `(0, v_k]`; at most `1` when the system is valid.
pub fn modular_audit<R: TrialRunner>(
    f: &OrliczFunction,
    sys: &OrliczIntervals,
    samples: usize,
    seed: u64,
    runner: &R,
) -> f64 {
    let ivs = sys.partition.intervals();
    let per_interval = runner.run(ivs.len(), |k| {
        let (a, b) = ivs[k];
        let vk = sys.v[k];
        let cap = math::pow2(-(k as i32) - 2);
        (0..samples)
            .map(|s| {
                let mut rng = trial_rng(seed ^ ((k as u64) << 32), s);
                let z = random_step(&mut rng, 16, 8);
                let top = z.sup_norm();
                let modular: f64 = z
                    .intervals()
                    .map(|(lo, hi, val)| (b - a) * (hi - lo) * f.eval(val / top * vk * rng.gen::<f64>()))
                    .sum();
                modular / cap
            })
            .fold(0.0, f64::max)
    });
    per_interval.into_iter().fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GalleryItem {
    Orlicz(OrliczFunction),
    Phi(PhiFunction),
    PhiWithWeight(PhiFunction, Weight),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub item: GalleryItem,
    pub metadata: String,
}

/// The named examples: `u^p(1 + |ln u|)` with `p = 3`,
/// `u^p[1 + c sin(p ln u)]` with `c = 1/√5`, `p = 6`, an iterated-log
/// function of order 3, and `t ln(e/t)` paired with the weight `1/t`.
pub fn example_gallery() -> Result<Vec<GalleryEntry>> {
    let c = 1.0 / math::sqrt(5.0);
    let p3 = 3.0;
    Ok(alloc::vec![
        GalleryEntry {
            name: "powerlog1",
            item: GalleryItem::Orlicz(OrliczFunction::power_log1(3.0)?),
            metadata: String::from("convex for p >= (3+sqrt5)/2; regularly varying of order p"),
        },
        GalleryEntry {
            name: "sinlog",
            item: GalleryItem::Orlicz(OrliczFunction::sin_log(6.0, c)?),
            metadata: String::from("not regularly varying; 1/4 u^p <= F(u) <= 2 u^p"),
        },
        GalleryEntry {
            name: "iterated-log",
            item: GalleryItem::Orlicz(OrliczFunction::from_phi(PhiFunction::power_log(
                1.0 / p3,
                alloc::vec![1.0 / p3, 1.0 / p3]
            )?)?),
            metadata: String::from("equivalent at infinity to u^3 (ln u)(ln ln u); regularly varying of order 3"),
        },
        GalleryEntry {
            name: "tlog-recip",
            item: GalleryItem::PhiWithWeight(PhiFunction::TLog, Weight::recip(30)?),
            metadata: String::from("quasi-concave; Lambda_phi is w-decomposable for w = 1/t"),
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::Sequential;

    #[test]
    fn g_examples() {
        let w = Weight::recip(30).unwrap();
        assert_eq!(g_function(&w, 0.0).unwrap(), 0.0);
        assert!((g_function(&w, 1.0).unwrap() - 1.0).abs() < 1e-15);
        for m in 0..25 {
            let a = math::pow2(-m);
            assert!((g_function(&w, a).unwrap() - (m as f64 + 1.0) * a).abs() < 1e-15 * (m as f64 + 1.0));
        }
        assert!((g_function(&w, 5.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn greedy_levels_recip() {
        let w = Weight::recip(30).unwrap();
        let b = build_phi_theorem6(&w, 40).unwrap();
        assert_eq!(b.t_levels[1], 0.25);
        assert_eq!(b.t_levels[2], math::pow2(-6));
        // 2^-7 also satisfies both conditions but is not the largest
        assert!(g_function(&w, math::pow2(-7)).unwrap() <= 0.125);
        assert!(g_function(&w, math::pow2(-6)).unwrap() <= 0.125 && math::pow2(-6) < 0.25 / 3.0);
        assert_eq!(b.depth(), 40);
        let b1 = build_phi_theorem6(&w, 1).unwrap();
        assert!((b1.phi.eval(1.0) - (0.25 * 2.0 + 0.75)).abs() < 1e-15);
        assert!(build_phi_theorem6(&w, 0).is_err());
    }

    #[test]
    fn ratio_bound_recip() {
        let w = Weight::recip(30).unwrap();
        let b = build_phi_theorem6(&w, 40).unwrap();
        let r = ratio_bound_check(&b, &w, 300, 7, &Sequential).unwrap();
        assert!(r.passed_at_c.is_some(), "{}", r.max_ratio);
        assert!((replay_ratio(&b.phi, &[0.3]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn psi_examples() {
        let psi = psi_p(&PhiFunction::power(0.5).unwrap(), 2.0).unwrap();
        assert_eq!(psi, PhiFunction::Power { alpha: 0.25 });
        assert!(psi_p(&PhiFunction::TLog, 1.0).is_err());
        let (lo, hi) = power_deviation(&psi_p(&PhiFunction::TLog, 2.0).unwrap(), 2.0);
        assert!(hi / lo > 5.0);
    }

    #[test]
    fn intervals_power2() {
        let f = OrliczFunction::power(2.0).unwrap();
        let v: Vec<f64> = (1..=8).map(|k| math::pow2(k)).collect();
        let sys = orlicz_intervals(&f, &v, 8).unwrap();
        for (k, (a, b)) in sys.partition.intervals().iter().enumerate() {
            let k = k as i32 + 1;
            assert!(((b - a) / math::pow2(-3 * k - 1) - 1.0).abs() < 1e-12);
        }
        let worst = modular_audit(&f, &sys, 200, 1, &Sequential);
        assert!(worst <= 1.0 + 1e-12 && worst > 0.0);
    }

    #[test]
    fn schedule_increasing() {
        let f = OrliczFunction::power_log1(3.0).unwrap();
        let v = v_schedule(&f, 3.0, 2.0, 6, math::pow2(120)).unwrap();
        assert!(v.windows(2).all(|p| p[1] >= p[0]) && v[0] > 0.0);
    }

    #[test]
    fn gallery_audits() {
        let g = example_gallery().unwrap();
        assert_eq!(g.len(), 4);
        for e in &g {
            match &e.item {
                GalleryItem::Orlicz(f) => f.audit_convex(-20, 20).unwrap(),
                GalleryItem::Phi(p) | GalleryItem::PhiWithWeight(p, _) => p.audit_quasi_concave().unwrap(),
            }
        }
        if let GalleryItem::Orlicz(f) = &g[1].item {
            assert!(f.sandwich_violation().is_none());
        }
    }

    #[test]
    fn powerlog1_pipelines_bounded() {
        let f = OrliczFunction::power_log1(3.0).unwrap();
        let w = orlicz_weight(&f, 3.0, 2.0, 8, math::pow2(120)).unwrap();
        let fam = crate::decomp::FamilySpec::from_weight(&w, 6, 3).unwrap();
        let r = crate::decomp::orlicz_char_test(&f, 3.0, &fam, 200, &Sequential).unwrap();
        assert!(r.constant() < 4.0, "{r:?}");
        let v = v_schedule(&f, 3.0, 2.0, 6, math::pow2(120)).unwrap();
        let sys = orlicz_intervals(&f, &v, 6).unwrap();
        assert!(modular_audit(&f, &sys, 200, 2, &Sequential) <= 1.0 + 1e-12);
        let fam = crate::decomp::FamilySpec::from_intervals(&sys.partition, 5).unwrap();
        let space = crate::spaces::SpaceSpec::orlicz(f.clone());
        let r = crate::decomp::decomp_empirical_test(&space, 3.0, &fam, 200, &Sequential).unwrap();
        assert!(r.constant() < 4.0, "{r:?}");
    }
}
