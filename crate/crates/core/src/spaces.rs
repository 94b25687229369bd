//! Norms of symmetric spaces on `[0, 1]` evaluated on step functions.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::numeric;
use crate::orlicz::OrliczFunction;
use crate::phi::{DilationIndices, PhiFunction};
use crate::step::{RunningIntegral, StepFunction};

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceSpec {
    /// `Λ_{p,φ}`: `(∫ [x*(t) φ(t)]^p dt/t)^{1/p}`.
    Lorentz { p: f64, phi: PhiFunction },
    /// `Λ_φ`: `∫ x* dφ`.
    LambdaPhi { phi: PhiFunction },
    /// `M_φ`: `sup_t φ(t) x**(t)`.
    Marcinkiewicz { phi: PhiFunction },
    /// `L_F` with the Luxemburg norm.
    Orlicz { f: OrliczFunction },
    Lp { p: f64 },
}

impl SpaceSpec {
    /// Requires `p ≥ 1` and a positive lower dilation index of `φ`.
    pub fn lorentz(p: f64, phi: PhiFunction) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::validation("Lorentz exponent must be a finite p >= 1"));
        }
        phi.audit_quasi_concave()?;
        if phi.dilation_indices()?.gamma <= 0.01 {
            return Err(Error::domain("Lorentz space needs a positive lower index of phi"));
        }
        Ok(SpaceSpec::Lorentz { p, phi })
    }

    pub fn lambda(phi: PhiFunction) -> Result<Self> {
        phi.audit_quasi_concave()?;
        Ok(SpaceSpec::LambdaPhi { phi })
    }

    pub fn marcinkiewicz(phi: PhiFunction) -> Result<Self> {
        phi.audit_quasi_concave()?;
        Ok(SpaceSpec::Marcinkiewicz { phi })
    }

    pub fn orlicz(f: OrliczFunction) -> Self {
        SpaceSpec::Orlicz { f }
    }

    pub fn lp(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::validation("L_p needs p >= 1"));
        }
        Ok(SpaceSpec::Lp { p })
    }

    pub fn label(&self) -> String {
        match self {
            SpaceSpec::Lorentz { p, phi } => format!("lorentz:p={p},phi={}", phi.label()),
            SpaceSpec::LambdaPhi { phi } => format!("lambda:phi={}", phi.label()),
            SpaceSpec::Marcinkiewicz { phi } => format!("marcinkiewicz:phi={}", phi.label()),
            SpaceSpec::Orlicz { f } => format!("orlicz:F={}", f.label()),
            SpaceSpec::Lp { p } => {
                if p.is_infinite() {
                    String::from("lp:p=inf")
                } else {
                    format!("lp:p={p}")
                }
            }
        }
    }

    pub fn norm(&self, x: &StepFunction) -> Result<f64> {
        match self {
            SpaceSpec::Lp { p } => Ok(x.lp_norm(*p)),
            SpaceSpec::Lorentz { p, phi } => lorentz_norm(*p, phi, &x.rearrange()),
            SpaceSpec::LambdaPhi { phi } => Ok(lambda_norm(phi, &x.rearrange())),
            SpaceSpec::Marcinkiewicz { phi } => Ok(marcinkiewicz_sup(phi, &x.rearrange()).0),
            SpaceSpec::Orlicz { f: OrliczFunction::Power { p } } => Ok(x.lp_norm(*p)),
            SpaceSpec::Orlicz { f } => luxemburg_norm(f, x),
        }
    }

    /// The norm together with a subgradient with respect to the values of
    /// the pieces of `x`. It is a true subgradient whenever the norm is
    /// convex in those values (every family here with concave `φ`).
    pub fn norm_subgradient(&self, x: &StepFunction) -> Result<(f64, Vec<f64>)> {
        let vals = x.values();
        let mut grad = alloc::vec![0.0; vals.len()];
        let sign = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
        let lp = |p: f64, grad: &mut [f64]| {
            let norm = x.lp_norm(p);
            if norm > 0.0 {
                if p.is_infinite() {
                    let i = (0..vals.len()).fold(0, |b, i| if math::abs(vals[i]) > math::abs(vals[b]) { i } else { b });
                    grad[i] = sign(vals[i]);
                } else {
                    for (i, (lo, hi, v)) in x.intervals().enumerate() {
                        grad[i] = sign(v) * math::powf(math::abs(v) / norm, p - 1.0) * (hi - lo);
                    }
                }
            }
            norm
        };
        let norm = match self {
            SpaceSpec::Lp { p } | SpaceSpec::Orlicz { f: OrliczFunction::Power { p } } => lp(*p, &mut grad),
            SpaceSpec::Lorentz { p, phi } => {
                let mut total = 0.0;
                let order = sorted_pieces(x);
                let mut coef = alloc::vec![0.0; vals.len()];
                for &(i, a, b) in &order {
                    if vals[i] == 0.0 {
                        break;
                    }
                    coef[i] = if a == 0.0 { phi.integral_from_zero(b, *p)? } else { phi.integral_pow_over_s(a, b, *p) };
                    total += math::powf(math::abs(vals[i]), *p) * coef[i];
                }
                let norm = math::powf(total, 1.0 / p);
                if norm > 0.0 {
                    for &(i, _, _) in &order {
                        grad[i] = sign(vals[i]) * math::powf(math::abs(vals[i]) / norm, p - 1.0) * coef[i];
                    }
                }
                norm
            }
            SpaceSpec::LambdaPhi { phi } => {
                let mut total = 0.0;
                for (i, a, b) in sorted_pieces(x) {
                    let c = phi.eval(b) - phi.eval(a);
                    total += math::abs(vals[i]) * c;
                    grad[i] = sign(vals[i]) * c;
                }
                total
            }
            SpaceSpec::Marcinkiewicz { phi } => {
                let (norm, t) = marcinkiewicz_sup(phi, &x.rearrange());
                if norm > 0.0 {
                    let scale = phi.eval(t) / t;
                    for (i, a, b) in sorted_pieces(x) {
                        grad[i] = sign(vals[i]) * scale * (t.min(b) - a).max(0.0);
                    }
                }
                norm
            }
            SpaceSpec::Orlicz { f } => {
                let norm = luxemburg_norm(f, x)?;
                if norm > 0.0 {
                    let d: Vec<f64> = vals.iter().map(|v| f.derivative(math::abs(*v) / norm)).collect();
                    let den: f64 = x.intervals().zip(&d).map(|((lo, hi, v), d)| d * math::abs(v) / norm * (hi - lo)).sum();
                    for (i, (lo, hi, v)) in x.intervals().enumerate() {
                        grad[i] = sign(v) * d[i] * (hi - lo) / den;
                    }
                }
                norm
            }
        };
        Ok((norm, grad))
    }

    /// `φ_X(t) = ‖χ_[0,t]‖_X`. For Orlicz spaces the value is cross-checked
    /// against `1/F^{-1}(1/t)`.
    pub fn fundamental_function(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain("fundamental function needs 0 < t <= 1"));
        }
        let v = self.norm(&StepFunction::indicator(t)?)?;
        if let SpaceSpec::Orlicz { f } = self {
            let closed = 1.0 / f.inverse(1.0 / t);
            if (v - closed).abs() > 1e-8 * closed {
                return Err(Error::non_convergence(format!(
                    "Luxemburg norm {v} disagrees with 1/F^-1(1/t) = {closed}"
                )));
            }
        }
        Ok(v)
    }

    /// A quasi-concave function equivalent to the fundamental function,
    /// used to read off dilation indices.
    pub fn fundamental_phi(&self) -> Result<PhiFunction> {
        match self {
            SpaceSpec::Lorentz { phi, .. } | SpaceSpec::LambdaPhi { phi } | SpaceSpec::Marcinkiewicz { phi } => {
                Ok(phi.clone())
            }
            SpaceSpec::Lp { p } => {
                if p.is_infinite() {
                    PhiFunction::tabulated(&[f64::MIN_POSITIVE, 1.0], &[1.0, 1.0])
                } else {
                    PhiFunction::power(1.0 / p)
                }
            }
            SpaceSpec::Orlicz { f: OrliczFunction::Power { p } } => PhiFunction::power(1.0 / p),
            SpaceSpec::Orlicz { f } => {
                let ts: Vec<f64> = (0..=8 * 300).rev().map(crate::phi::eighth_octave).collect();
                let vs: Vec<f64> = ts.iter().map(|t| 1.0 / f.inverse(1.0 / t)).collect();
                PhiFunction::tabulated(&ts, &vs)
            }
        }
    }

    /// Dilation indices of the fundamental function.
    pub fn indices(&self) -> Result<DilationIndices> {
        self.fundamental_phi()?.dilation_indices()
    }

    /// The exponent `1/γ̂` of the fundamental function, snapped to an
    /// integer within 0.1 and infinite for `γ̂ < 0.01`.
    pub fn default_exponent(&self) -> Result<f64> {
        if let SpaceSpec::Lp { p } = self {
            return Ok(*p);
        }
        Ok(self.indices()?.exponent())
    }
}

fn lorentz_norm(p: f64, phi: &PhiFunction, star: &StepFunction) -> Result<f64> {
    let mut total = 0.0;
    for (i, (lo, hi, v)) in star.intervals().enumerate() {
        if v == 0.0 {
            break;
        }
        let part = if i == 0 { phi.integral_from_zero(hi, p)? } else { phi.integral_pow_over_s(lo, hi, p) };
        total += math::powf(v, p) * part;
    }
    Ok(math::powf(total, 1.0 / p))
}

/// `Σ (v_i − v_{i+1}) φ(b_i)`: `x*` written as a sum of indicators
/// `χ_[0,b_i]`, each of norm `φ(b_i)`.
fn lambda_norm(phi: &PhiFunction, star: &StepFunction) -> f64 {
    let vals = star.values();
    let breaks = star.breaks();
    let mut total = 0.0;
    for i in 0..vals.len() {
        let next = if i + 1 < vals.len() { vals[i + 1] } else { 0.0 };
        let drop = vals[i] - next;
        if drop > 0.0 {
            total += drop * phi.eval(breaks[i + 1]);
        }
    }
    total
}

/// `(index, a, b)` for each piece of `x` in the order of `x*`, which places
/// it on `[a, b]`.
fn sorted_pieces(x: &StepFunction) -> Vec<(usize, f64, f64)> {
    let mut idx: Vec<usize> = (0..x.values().len()).collect();
    let vals = x.values();
    idx.sort_by(|&i, &j| math::abs(vals[j]).partial_cmp(&math::abs(vals[i])).unwrap());
    let breaks = x.breaks();
    let mut acc = 0.0;
    let last = idx.len() - 1;
    idx.iter()
        .enumerate()
        .map(|(k, &i)| {
            let a = acc;
            acc += breaks[i + 1] - breaks[i];
            (i, a, if k == last { 1.0 } else { acc.min(1.0) })
        })
        .collect()
}

/// `sup_t φ(t) x**(t)` and a point where it is attained. On `(b_k, b_{k+1}]` the product is
/// `(A + v t) φ(t)/t` with `A, v ≥ 0`. On `[a, b]` inside it,
/// `φ(t) ≤ min(φ(a) t/a, φ(b))`, and the maximum of the resulting bound sits
/// where the two pieces cross. Intervals are split until no bound beats the
/// best value by more than a relative `1e-10`, or down to a relative width
/// of `1e-9`.
fn marcinkiewicz_sup(phi: &PhiFunction, star: &StepFunction) -> (f64, f64) {
    let run = RunningIntegral::new(star);
    let breaks = star.breaks();
    let h = |t: f64| phi.eval(t) * run.at(t) / t;
    let mut best = (0.0, 1.0);
    let consider = |best: &mut (f64, f64), t: f64| {
        let v = h(t);
        if v > best.0 {
            *best = (v, t);
        }
    };
    for &b in &breaks[1..] {
        consider(&mut best, b);
    }
    if power_like(phi) {
        // A t^{α-1} + v t^α has only interior minima
        return best;
    }
    let vals = star.values();
    let mut stack = Vec::new();
    for k in 1..vals.len() {
        let v = vals[k];
        let (a, b) = (breaks[k], breaks[k + 1]);
        let base = run.at(a) - v * a;
        let r = math::powf(b / a, 0.25);
        let mut lo = a;
        for _ in 0..4 {
            let hi = if stack.len() % 4 == 3 { b } else { lo * r };
            consider(&mut best, hi);
            stack.push((lo, hi, 0u32));
            lo = hi;
        }
        while let Some((lo, hi, depth)) = stack.pop() {
            let (slope, cap) = (phi.eval(lo) / lo, phi.eval(hi));
            let cross = if slope > 0.0 { (cap / slope).clamp(lo, hi) } else { hi };
            let bound = (base + v * cross) * slope;
            if bound <= best.0 * (1.0 + 1e-10) || hi <= lo * (1.0 + 1e-9) || depth > 80 {
                continue;
            }
            let mid = math::sqrt(lo * hi);
            consider(&mut best, mid);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    best
}

fn power_like(phi: &PhiFunction) -> bool {
    match phi {
        PhiFunction::Power { .. } => true,
        PhiFunction::Dual { base } | PhiFunction::PthRoot { base, .. } => matches!(**base, PhiFunction::Power { .. }),
        _ => false,
    }
}

fn modular(f: &OrliczFunction, x: &StepFunction, lambda: f64) -> f64 {
    x.intervals().map(|(lo, hi, v)| if v == 0.0 { 0.0 } else { f.eval(math::abs(v) / lambda) * (hi - lo) }).sum()
}

fn luxemburg_norm(f: &OrliczFunction, x: &StepFunction) -> Result<f64> {
    let top = x.sup_norm();
    if top == 0.0 {
        return Ok(0.0);
    }
    let m = |l: f64| modular(f, x, l);
    // convexity gives F(st) >= s F(t) for s >= 1, so one value brackets the root
    let mu = m(top);
    let (mut lo, mut hi) = if mu <= 1.0 { (top * mu, top) } else { (top, top * mu) };
    if !(lo > 0.0 && hi.is_finite() && m(lo) > 1.0 && m(hi) <= 1.0) {
        (lo, hi) = bracket_by_doubling(&m, top)?;
    }
    // Illinois on g = m - 1; λ|m'(λ)| >= m(λ), so |g| bounds the relative error in λ
    let (mut glo, mut ghi) = (m(lo) - 1.0, m(hi) - 1.0);
    let mut side = 0i8;
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mut mid = if glo.is_finite() && ghi < glo { hi - ghi * (hi - lo) / (ghi - glo) } else { 0.5 * (lo + hi) };
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        let g = m(mid) - 1.0;
        if math::abs(g) <= 1e-15 {
            return Ok(mid);
        }
        if g <= 0.0 {
            hi = mid;
            ghi = g;
            if side == -1 {
                glo *= 0.5;
            }
            side = -1;
        } else {
            lo = mid;
            glo = g;
            if side == 1 {
                ghi *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn bracket_by_doubling(m: &impl Fn(f64) -> f64, top: f64) -> Result<(f64, f64)> {
    let mut hi = top;
    let mut guard = 0;
    while !(m(hi) <= 1.0) {
        if !m(hi).is_finite() && guard > 2000 {
            return Err(Error::domain("Orlicz function not finite on the range of |x|"));
        }
        hi *= 2.0;
        guard += 1;
        if guard > 4000 {
            return Err(Error::non_convergence("Luxemburg bracket did not close"));
        }
    }
    let mut lo = hi * 0.5;
    while m(lo) <= 1.0 {
        hi = lo;
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::non_convergence("Luxemburg bracket did not close"));
        }
    }
    Ok((lo, hi))
}

/// The equivalent Lorentz norm with `x**` in place of `x*`. Requires
/// `0 < γ̂ ≤ δ̂ < 1`.
pub fn lorentz_norm_doublestar(p: f64, phi: &PhiFunction, x: &StepFunction) -> Result<f64> {
    let idx = phi.dilation_indices()?;
    if !(idx.gamma > 0.01 && idx.delta < 0.99) {
        return Err(Error::domain("double-star Lorentz norm needs 0 < gamma <= delta < 1"));
    }
    let star = x.rearrange();
    if star.sup_norm() == 0.0 {
        return Ok(0.0);
    }
    let run = RunningIntegral::new(&star);
    let mut total = 0.0;
    for (i, (lo, hi, v)) in star.intervals().enumerate() {
        if i == 0 {
            total += math::powf(v, p) * phi.integral_from_zero(hi, p)?;
            continue;
        }
        let c0 = run.at(lo);
        let g = |t: f64| math::powf((c0 + v * (t - lo)) / t * phi.eval(t), p);
        total += numeric::integrate_over_log(&g, lo, hi, crate::phi::QUAD_TOL);
    }
    Ok(math::powf(total, 1.0 / p))
}

/// Both sides of the step-function identity for `Λ_{p,φ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepIdentity {
    pub lhs_p: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// The function `Σ_i b^{-(j0+i)} χ_(a_i, a_{i+1}]` for a non-decreasing
/// `a_seq` in `[0, 1]`.
pub fn step_from_sequence(b: f64, a_seq: &[f64], j0: i32) -> Result<StepFunction> {
    if !(b > 1.0) {
        return Err(Error::validation("base b must exceed 1"));
    }
    if a_seq.len() < 2 {
        return Err(Error::validation("sequence needs at least two points"));
    }
    if a_seq.windows(2).any(|w| w[1] < w[0]) || a_seq.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::validation("sequence must be non-decreasing in [0, 1]"));
    }
    let blocks: Vec<(f64, f64, f64)> = a_seq
        .windows(2)
        .enumerate()
        .map(|(i, w)| (w[0], w[1], math::powf(b, -((j0 + i as i32) as f64))))
        .collect();
    StepFunction::from_blocks(&blocks)
}

/// `‖x‖^p_{Λ_{p,φ}}` against `Σ b^{-pj} φ^p(a_j − a_{j−1})` for the step
/// function of [`step_from_sequence`].
pub fn step_lorentz_identity(p: f64, phi: &PhiFunction, b: f64, a_seq: &[f64], j0: i32) -> Result<StepIdentity> {
    let x = step_from_sequence(b, a_seq, j0)?;
    let lhs_p = math::powf(lorentz_norm(p, phi, &x.rearrange())?, p);
    let rhs: f64 = a_seq
        .windows(2)
        .enumerate()
        .map(|(i, w)| math::powf(b, -p * (j0 + i as i32) as f64) * math::powf(phi.eval(w[1] - w[0]), p))
        .sum();
    Ok(StepIdentity { lhs_p, rhs, ratio: lhs_p / rhs })
}

/// Exact `‖x‖_{Λ_φ}` for the step function of [`step_from_sequence`]:
/// `Σ_{i<last} (b^{-j_i} − b^{-j_i−1}) φ(a'_{i+1}) + b^{-j_last} φ(a'_{last+1})`
/// with `a'_i = a_i − a_0`.
pub fn lambda_phi_exact_step(phi: &PhiFunction, b: f64, a_seq: &[f64], j0: i32) -> Result<f64> {
    step_from_sequence(b, a_seq, j0)?;
    let a0 = a_seq[0];
    let last = a_seq.len() - 2;
    let mut total = 0.0;
    for i in 0..=last {
        let v = math::powf(b, -((j0 + i as i32) as f64));
        let drop = if i < last { v - v / b } else { v };
        total += drop * phi.eval(a_seq[i + 1] - a0);
    }
    Ok(total)
}
