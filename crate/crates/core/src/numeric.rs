//! Quadrature and root finding shared by the function registries and norms.

use crate::error::{Error, Result};
use crate::math;

/// Adaptive Simpson quadrature of `f` over `[a, b]` with relative tolerance
/// `rel_tol` (absolute floor `abs_tol`).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = (rel_tol * math::abs(whole)).max(abs_tol);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || math::abs(delta) <= 15.0 * tol || (m - a) <= f64::EPSILON * math::abs(m) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `∫_a^b g(s) ds / s` computed in the logarithmic variable `u = ln s`, where
/// integrands of the form `φ(s)^p / s` are smooth. Requires `0 < a < b`.
pub fn integrate_over_log<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if !(b > a) || a <= 0.0 {
        return 0.0;
    }
    let h = |u: f64| g(math::exp(u));
    let (la, lb) = (math::ln(a), math::ln(b));
    // split into unit chunks in u so that Simpson sees comparable scales
    let chunks = (math::ceil(lb - la) as usize).clamp(1, 4096);
    let step = (lb - la) / chunks as f64;
    let mut total = 0.0;
    for i in 0..chunks {
        let lo = la + step * i as f64;
        let hi = if i + 1 == chunks { lb } else { lo + step };
        total += adaptive_simpson(&h, lo, hi, rel_tol, 0.0);
    }
    total
}

/// `∫_0^t g(s) ds / s` for integrands that vanish at zero like a power of `s`.
///
/// Walks down dyadic octaves from `t` until the octave contribution is
/// negligible. Returns an error when the tail does not decay (divergent
/// integral at zero).
pub fn integrate_from_zero_over_log<F: Fn(f64) -> f64>(g: &F, t: f64, rel_tol: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut hi = t;
    for _ in 0..4000 {
        let lo = hi * 0.5;
        let part = integrate_over_log(g, lo, hi, rel_tol);
        total += part;
        if part <= 1e-17 * total {
            return Ok(total);
        }
        if lo < 1e-300 {
            if part <= 1e-12 * total {
                return Ok(total);
            }
            break;
        }
        hi = lo;
    }
    Err(Error::domain("integral diverges at zero"))
}

/// Bisection for an increasing function: the `x` in `[lo, hi]` with
/// `f(x) = target`, assuming `f(lo) <= target <= f(hi)`. Works in the
/// logarithmic variable when `lo > 0`, which gives relative accuracy.
pub fn bisect_increasing<F: Fn(f64) -> f64>(f: &F, target: f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    for _ in 0..400 {
        if hi - lo <= rel_tol * hi {
            break;
        }
        let mid = if lo > 0.0 && hi / lo > 4.0 { math::sqrt(lo * hi) } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `f(x) = y` for an increasing `f` on `(0, hi]` with `f(0+) = 0`,
/// bracketing by halving from `hi` first so tiny targets cost only a few
/// hundred evaluations. Returns `None` when `y > f(hi)` or the bracket leaves
/// the normal range.
pub fn invert_increasing<F: Fn(f64) -> f64>(f: &F, y: f64, hi: f64, rel_tol: f64) -> Option<f64> {
    if !(y > 0.0) {
        return if y == 0.0 { Some(0.0) } else { None };
    }
    let top = f(hi);
    if y > top {
        return None;
    }
    if y == top {
        return Some(hi);
    }
    let mut upper = hi;
    let mut lower = 0.5 * hi;
    let mut step = 2;
    while f(lower) > y {
        upper = lower;
        lower = hi * math::pow2(-step);
        step = (step * 2).min(1100);
        if lower < f64::MIN_POSITIVE {
            if upper <= f64::MIN_POSITIVE {
                return None;
            }
            lower = f64::MIN_POSITIVE;
            if f(lower) > y {
                return None;
            }
        }
    }
    Some(bisect_increasing(f, y, lower, upper, rel_tol))
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`; the endpoints
/// are compared too so linear objectives land exactly on the boundary.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let fa = f(a);
    let fb = f(b);
    let (mut best_x, mut best_f) = if fa <= fb { (a, fa) } else { (b, fb) };
    if !(b > a) {
        return (best_x, best_f);
    }
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol * (1.0 + math::abs(lo) + math::abs(hi)) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx < best_f {
            best_x = x;
            best_f = fx;
        }
    }
    (best_x, best_f)
}

/// Ordinary least-squares slope and RMS residual of `y` against `x`.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        ss += r * r;
    }
    (slope, intercept, math::sqrt(ss / n))
}
