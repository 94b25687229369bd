//! Quasi-concave functions `φ` on `[0, 1]`, their indices and the
//! regular-variation testers.
//!
//! Every kind is quasi-concave by construction: non-decreasing, `φ(0) = 0`
//! (except the degenerate [`PhiFunction::Dual`] of a linear function), and
//! `φ(t)/t` non-increasing. Integrals `∫_a^b φ(s)^p ds/s` use closed forms
//! for powers and piecewise-linear kinds and adaptive quadrature otherwise.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::numeric;
use crate::report::{EquivalenceReport, Witness};

pub(crate) const QUAD_TOL: f64 = 1e-11;

/// `2^{-j/8}` built from an exact power of two and a fixed eighth-root table,
/// so grids are bit-identical everywhere they are used.
pub(crate) fn eighth_octave(j: i32) -> f64 {
    const FRAC: [f64; 8] = [
        1.0,
        0.917_004_043_204_671_2,
        0.840_896_415_253_714_5,
        0.771_105_412_703_970_4,
        0.707_106_781_186_547_6,
        0.648_419_777_325_504_8,
        0.594_603_557_501_360_5,
        0.545_253_866_332_628_8,
    ];
    let q = j.div_euclid(8);
    let r = j.rem_euclid(8) as usize;
    math::pow2(-q) * FRAC[r]
}

/// Piecewise-linear interpolant through `(xs[i], ys[i])`, with `xs[0] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Table {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::validation("table needs at least two matching points"));
        }
        if xs[0] != 0.0 {
            return Err(Error::validation("table must start at 0"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation("table abscissae must be strictly increasing"));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::validation("table values must be finite"));
        }
        Ok(Table { xs, ys })
    }

    /// Prepends `(0, 0)` to sample points taken on `(0, ∞)`.
    pub fn from_samples(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let mut x = alloc::vec![0.0];
        let mut y = alloc::vec![0.0];
        x.extend_from_slice(xs);
        y.extend_from_slice(ys);
        Self::new(x, y)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    fn last_slope(&self) -> f64 {
        let n = self.xs.len();
        (self.ys[n - 1] - self.ys[n - 2]) / (self.xs[n - 1] - self.xs[n - 2])
    }

    /// Interpolated value; past the last point the table is either held
    /// constant or continued with its last slope.
    pub fn eval(&self, x: f64, extend_linearly: bool) -> f64 {
        let n = self.xs.len();
        if x >= self.xs[n - 1] {
            return if extend_linearly {
                self.ys[n - 1] + self.last_slope() * (x - self.xs[n - 1])
            } else {
                self.ys[n - 1]
            };
        }
        if x <= 0.0 {
            return self.ys[0];
        }
        let i = self.xs.partition_point(|&b| b <= x) - 1;
        let (x0, x1, y0, y1) = (self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]);
        y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
    }

    /// Slope of the segment containing `x` (the right derivative).
    pub fn slope_at(&self, x: f64, extend_linearly: bool) -> f64 {
        let n = self.xs.len();
        if x >= self.xs[n - 1] {
            return if extend_linearly { self.last_slope() } else { 0.0 };
        }
        let i = self.xs.partition_point(|&b| b <= x).max(1) - 1;
        (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])
    }

    /// `(lo, hi, c, m)` with the table equal to `c + m·s` on `[lo, hi]`.
    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.xs.windows(2).zip(self.ys.windows(2)).map(|(x, y)| {
            let m = (y[1] - y[0]) / (x[1] - x[0]);
            let c = if x[0] == 0.0 { y[0] } else { y[0] - m * x[0] };
            (x[0], x[1], c, m)
        })
    }

    /// `∫_a^b (c + m s)^p ds / s` summed over the segments meeting `[a, b]`,
    /// with the constant tail beyond the last point when `b` exceeds it.
    fn integral_pow_over_s(&self, a: f64, b: f64, p: f64) -> f64 {
        let mut total = 0.0;
        for (lo, hi, c, m) in self.segments() {
            let (l, h) = (lo.max(a), hi.min(b));
            if h > l {
                total += linear_pow_over_s(c, m, l, h, p);
            }
        }
        let last = *self.xs.last().unwrap();
        if b > last {
            let l = a.max(last);
            total += math::powf(*self.ys.last().unwrap(), p) * math::ln(b / l);
        }
        total
    }
}

fn linear_pow_over_s(c: f64, m: f64, l: f64, h: f64, p: f64) -> f64 {
    if c == 0.0 {
        return math::powf(m, p) * (math::powf(h, p) - math::powf(l, p)) / p;
    }
    if l <= 0.0 {
        return f64::INFINITY;
    }
    if p == 1.0 {
        c * math::ln(h / l) + m * (h - l)
    } else if p == 2.0 {
        c * c * math::ln(h / l) + 2.0 * c * m * (h - l) + 0.5 * m * m * (h * h - l * l)
    } else {
        numeric::integrate_over_log(&|s: f64| math::powf(c + m * s, p), l, h, QUAD_TOL)
    }
}

/// A quasi-concave function on `[0, 1]`.
///
/// Build values through the associated constructors, which validate the
/// parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiFunction {
    /// `t^α`, `α ∈ (0, 1]`.
    Power { alpha: f64 },
    /// `t^α ∏ ℓ_k(t)^{q_k}` with `ℓ_1 = B + ln(1/t)`, `ℓ_{k+1} = 1 + ln ℓ_k`.
    /// The shift `B` is large enough to keep the log-derivative in `[0, 1]`.
    PowerLog { alpha: f64, q: Vec<f64>, shift: f64 },
    /// `t·ln(e/t)`.
    TLog,
    /// Piecewise-linear `φ` with slope `2^k` on `(t_{k+1}, t_k]` and `2^K`
    /// on `(0, t_K]`, for levels `1 = t_0 > t_1 > … > t_K`.
    Theorem6 { levels: Vec<f64>, table: Table },
    /// `base^{1/p}`.
    PthRoot { base: Box<PhiFunction>, p: f64 },
    /// `t / base(t)`.
    Dual { base: Box<PhiFunction> },
    /// Linear interpolation through samples, constant past the last one.
    Tabulated { table: Table },
}

impl PhiFunction {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::validation("power exponent must lie in (0, 1]"));
        }
        Ok(PhiFunction::Power { alpha })
    }

    pub fn power_log(alpha: f64, q: Vec<f64>) -> Result<Self> {
        if q.iter().all(|v| *v == 0.0) {
            return Self::power(alpha);
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::validation("powerlog needs 0 < alpha < 1 when log exponents are present"));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("log exponents must be finite"));
        }
        let total: f64 = q.iter().map(|v| math::abs(*v)).sum();
        let shift = (total / alpha.min(1.0 - alpha)).max(1.0);
        Ok(PhiFunction::PowerLog { alpha, q, shift })
    }

    pub fn tlog() -> Self {
        PhiFunction::TLog
    }

    pub fn theorem6(levels: Vec<f64>) -> Result<Self> {
        if levels.first() != Some(&1.0) {
            return Err(Error::validation("levels must start at 1"));
        }
        if levels.windows(2).any(|w| !(w[1] < w[0])) || levels.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::validation("levels must be positive and strictly decreasing"));
        }
        let k_max = levels.len() - 1;
        // values at the levels, accumulated from the bottom slope 2^K
        let mut at = alloc::vec![0.0; levels.len()];
        at[k_max] = math::pow2(k_max as i32) * levels[k_max];
        for k in (0..k_max).rev() {
            at[k] = at[k + 1] + math::pow2(k as i32) * (levels[k] - levels[k + 1]);
        }
        let xs: Vec<f64> = levels.iter().rev().copied().collect();
        let ys: Vec<f64> = at.iter().rev().copied().collect();
        let table = Table::from_samples(&xs, &ys)?;
        Ok(PhiFunction::Theorem6 { levels, table })
    }

    pub fn pth_root(base: PhiFunction, p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::validation("root order must be a finite p >= 1"));
        }
        Ok(PhiFunction::PthRoot { base: Box::new(base), p })
    }

    pub fn dual(base: PhiFunction) -> Self {
        PhiFunction::Dual { base: Box::new(base) }
    }

    /// Samples `(t_i, φ_i)` on `(0, 1]`; audited for quasi-concavity.
    pub fn tabulated(ts: &[f64], vs: &[f64]) -> Result<Self> {
        if ts.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
            return Err(Error::validation("tabulated abscissae must lie in (0, 1]"));
        }
        if vs.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::validation("tabulated values must be non-negative"));
        }
        let table = Table::from_samples(ts, vs)?;
        for w in table.xs.windows(2).zip(table.ys.windows(2)) {
            let ((x0, x1), (y0, y1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
            let slack = 1e-12 * y1.max(1e-300);
            if y1 + slack < y0 || (x0 > 0.0 && y1 / x1 > y0 / x0 * (1.0 + 1e-12)) {
                return Err(Error::validation("tabulated function is not quasi-concave"));
            }
        }
        Ok(PhiFunction::Tabulated { table })
    }

    /// The level sequence of a `Theorem6` function.
    pub fn levels(&self) -> Option<&[f64]> {
        match self {
            PhiFunction::Theorem6 { levels, .. } => Some(levels),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.at_zero();
        }
        match self {
            PhiFunction::Power { alpha } => math::powf(t, *alpha),
            PhiFunction::PowerLog { alpha, q, shift } => {
                let mut v = math::powf(t, *alpha);
                let mut l = shift + math::ln(1.0 / t);
                for (i, qk) in q.iter().enumerate() {
                    if i > 0 {
                        l = 1.0 + math::ln(l);
                    }
                    if *qk != 0.0 {
                        v *= math::powf(l, *qk);
                    }
                }
                v
            }
            PhiFunction::TLog => t * (1.0 - math::ln(t)),
            PhiFunction::Theorem6 { table, .. } | PhiFunction::Tabulated { table } => table.eval(t, false),
            PhiFunction::PthRoot { base, p } => math::powf(base.eval(t), 1.0 / p),
            PhiFunction::Dual { base } => {
                let b = base.eval(t);
                if b > 0.0 {
                    t / b
                } else {
                    0.0
                }
            }
        }
    }

    /// `φ(0+)`, taken from the kind rather than by sampling.
    pub fn at_zero(&self) -> f64 {
        match self {
            PhiFunction::PthRoot { base, p } => math::powf(base.at_zero(), 1.0 / p),
            PhiFunction::Dual { base } => {
                let b0 = base.at_zero();
                if b0 > 0.0 {
                    0.0
                } else {
                    1.0 / base.slope_at_zero()
                }
            }
            _ => 0.0,
        }
    }

    /// `lim_{t→0+} φ(t)/t`, possibly infinite.
    pub fn slope_at_zero(&self) -> f64 {
        match self {
            PhiFunction::Power { alpha } => {
                if *alpha == 1.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            PhiFunction::Theorem6 { table, .. } | PhiFunction::Tabulated { table } => table.ys[1] / table.xs[1],
            PhiFunction::PthRoot { base, p } => {
                if *p == 1.0 {
                    base.slope_at_zero()
                } else {
                    f64::INFINITY
                }
            }
            PhiFunction::Dual { base } => {
                if base.at_zero() > 0.0 {
                    1.0 / base.at_zero()
                } else if base.slope_at_zero().is_finite() {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            PhiFunction::PowerLog { .. } | PhiFunction::TLog => f64::INFINITY,
        }
    }

    /// `∫_a^b φ(s)^p ds/s` for `0 < a ≤ b ≤ 1`.
    pub fn integral_pow_over_s(&self, a: f64, b: f64, p: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        match self {
            PhiFunction::Power { alpha } => {
                let e = alpha * p;
                (math::powf(b, e) - math::powf(a, e)) / e
            }
            PhiFunction::TLog if p == 1.0 => b * (2.0 - math::ln(b)) - a * (2.0 - math::ln(a)),
            PhiFunction::Theorem6 { table, .. } | PhiFunction::Tabulated { table } => {
                table.integral_pow_over_s(a, b, p)
            }
            PhiFunction::PthRoot { base, p: r } => base.integral_pow_over_s(a, b, p / r),
            _ => numeric::integrate_over_log(&|s: f64| math::powf(self.eval(s), p), a, b, QUAD_TOL),
        }
    }

    /// `∫_0^t φ(s)^p ds/s`; a domain error when the integral diverges.
    pub fn integral_from_zero(&self, t: f64, p: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        if self.at_zero() > 0.0 {
            return Err(Error::domain("integral diverges at zero"));
        }
        match self {
            PhiFunction::Power { alpha } => Ok(math::powf(t, alpha * p) / (alpha * p)),
            PhiFunction::TLog if p == 1.0 => Ok(t * (2.0 - math::ln(t))),
            PhiFunction::Theorem6 { table, .. } | PhiFunction::Tabulated { table } => {
                Ok(table.integral_pow_over_s(0.0, t, p))
            }
            PhiFunction::PthRoot { base, p: r } => base.integral_from_zero(t, p / r),
            _ => numeric::integrate_from_zero_over_log(&|s: f64| math::powf(self.eval(s), p), t, QUAD_TOL),
        }
    }

    /// `φ^{-1}(y)` on `(0, 1]`, or `None` when `y` is out of range.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        numeric::invert_increasing(&|t: f64| self.eval(t), y, 1.0, 1e-15)
    }

    /// Checks `φ(2^{-j})` non-decreasing and `2^j φ(2^{-j})` non-increasing
    /// as `t = 2^{-j}` grows, for `j = 0..=60`.
    pub fn audit_quasi_concave(&self) -> Result<()> {
        if !(self.eval(1.0) > 0.0) {
            return Err(Error::validation("function vanishes at 1"));
        }
        let mut prev = self.eval(math::pow2(-60));
        for j in (0..60).rev() {
            let t = math::pow2(-j);
            let v = self.eval(t);
            let lower = math::pow2(-j - 1);
            if v < prev * (1.0 - 1e-12) {
                return Err(Error::validation(format!("not non-decreasing near t = {t:e}")));
            }
            if v / t > prev / lower * (1.0 + 1e-12) {
                return Err(Error::validation(format!("phi(t)/t increases near t = {t:e}")));
            }
            prev = v;
        }
        Ok(())
    }

    /// Short DSL-style description, used in reports.
    pub fn label(&self) -> String {
        match self {
            PhiFunction::Power { alpha } => format!("power:alpha={alpha}"),
            PhiFunction::PowerLog { alpha, q, .. } => {
                let mut s = format!("powerlog:alpha={alpha}");
                for (i, v) in q.iter().enumerate() {
                    s.push_str(&format!(",q{}={v}", i + 1));
                }
                s
            }
            PhiFunction::TLog => String::from("tlog"),
            PhiFunction::Theorem6 { levels, .. } => format!("theorem6:levels={}", levels.len() - 1),
            PhiFunction::PthRoot { base, p } => format!("root:p={p}({})", base.label()),
            PhiFunction::Dual { base } => format!("dual({})", base.label()),
            PhiFunction::Tabulated { table } => format!("tabulated:points={}", table.xs.len() - 1),
        }
    }

    /// Piecewise-linear concave majorant `t ↦ inf_s (1 + t/s) φ(s)`,
    /// minimised over the knots `s = 2^{-j/8}`, `j = 0..=512`, and tabulated
    /// on the same knots.
    pub fn concave_envelope(&self) -> Result<PhiFunction> {
        self.audit_quasi_concave()?;
        let knots: Vec<f64> = (0..=512).rev().map(eighth_octave).collect();
        let vals: Vec<f64> = knots.iter().map(|s| self.eval(*s)).collect();
        let env: Vec<f64> = knots
            .iter()
            .map(|&t| {
                knots
                    .iter()
                    .zip(&vals)
                    .map(|(&s, &v)| (1.0 + t / s) * v)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(PhiFunction::Tabulated { table: Table::from_samples(&knots, &env)? })
    }

    /// `φ̄(t) = sup_{s, st ∈ (0,1]} φ(st)/φ(s)`, with `s` running over
    /// `s_max·2^{-j/8}` for 200 octaves below `s_max = min(1, 1/t)`.
    pub fn dilation_function(&self, t: f64) -> f64 {
        let s_max = if t <= 1.0 { 1.0 } else { 1.0 / t };
        let mut best = 0.0f64;
        for j in 0..=1600 {
            let s = s_max * eighth_octave(j);
            let den = self.eval(s);
            if den > 0.0 {
                best = best.max(self.eval(s * t) / den);
            }
        }
        best
    }

    /// Regression estimates of the dilation indices over `t = 2^{∓j}`,
    /// `j = 30..=60`.
    pub fn dilation_indices(&self) -> Result<DilationIndices> {
        if !(self.eval(1.0) > 0.0) {
            return Err(Error::validation("degenerate function (vanishes identically)"));
        }
        let fit = |sign: i32| {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for j in 30..=60 {
                let t = math::pow2(sign * j);
                xs.push(math::ln(t));
                ys.push(math::ln(self.dilation_function(t)));
            }
            let (slope, _, rms) = numeric::linear_regression(&xs, &ys);
            (slope, rms)
        };
        let (g, g_rms) = fit(-1);
        let (d, d_rms) = fit(1);
        let gamma = clamp(g, 0.0, 1.0);
        let delta = clamp(d, gamma, 1.0);
        Ok(DilationIndices { gamma, delta, gamma_rms: g_rms, delta_rms: d_rms })
    }

    /// Constants `(A, κ)` with `φ̄(t) ≤ A t^κ` for `t = 2^{-j}`, `j = 0..=60`,
    /// taking `κ = 0.9 γ̂`.
    pub fn power_bound(&self) -> Result<(f64, f64)> {
        let idx = self.dilation_indices()?;
        if idx.gamma <= 0.01 {
            return Err(Error::domain("index too small"));
        }
        let kappa = 0.9 * idx.gamma;
        let a = (0..=60)
            .map(|j| {
                let t = math::pow2(-j);
                self.dilation_function(t) / math::powf(t, kappa)
            })
            .fold(0.0, f64::max);
        Ok((a, kappa))
    }

    /// Ratios `∫_0^t φ^p(s) ds/s ÷ φ^p(t)` over `t = 2^{-j}`, `j = 0..=60`.
    pub fn kps_check(&self, p: f64) -> Result<EquivalenceReport> {
        let mut rep = EquivalenceReport::empty(p);
        for j in 0..=60 {
            let t = math::pow2(-j);
            let lhs = self.integral_from_zero(t, p)?;
            let rhs = math::powf(self.eval(t), p);
            rep.observe(lhs / rhs, || Witness::Values(alloc::vec![t]));
        }
        Ok(rep)
    }

    /// `max φ(tu)/φ(t)` over `t = 2^{-j}`, `j = 10..=40`, `tu ≤ 1`.
    pub fn limsup_ratio(&self, u: f64) -> f64 {
        (10..=40)
            .map(|j| math::pow2(-j))
            .filter(|t| t * u <= 1.0)
            .map(|t| self.eval(t * u) / self.eval(t))
            .fold(0.0, f64::max)
    }

    /// Ratios `φ(Nt) / (φ(t) N^{1/p})` for `2 ≤ N ≤ n_max` and
    /// `t = τ(N)·2^{-j/4}`, `j = 0..=160`, with `Nt ≤ 1`.
    pub fn regvar_test(&self, p: f64, sched: &Schedule, c: f64, n_max: usize) -> Result<EquivalenceReport> {
        if n_max < 2 {
            return Err(Error::validation("n_max must be at least 2"));
        }
        let mut rep = EquivalenceReport::empty(p);
        for n in 2..=n_max {
            let nf = n as f64;
            let scale = if p.is_infinite() { 1.0 } else { math::powf(nf, 1.0 / p) };
            let tau = sched.tau(n);
            let mut used = false;
            for j in 0..=160 {
                let t = tau * math::pow2(-(j / 4)) * quarter_octave(j % 4);
                if nf * t > 1.0 || t < 1e-290 {
                    continue;
                }
                used = true;
                let r = self.eval(nf * t) / (self.eval(t) * scale);
                rep.observe(r, || Witness::Values(alloc::vec![nf, t]));
            }
            if !used {
                rep.note(format!("skipped N = {n}: empty test grid"));
            }
        }
        Ok(rep.judge(c))
    }
}

fn quarter_octave(r: i32) -> f64 {
    eighth_octave(2 * r)
}

fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    if x.is_nan() {
        lo
    } else {
        x.max(lo).min(hi)
    }
}

/// Estimated dilation indices with the RMS residual of each fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationIndices {
    pub gamma: f64,
    pub delta: f64,
    pub gamma_rms: f64,
    pub delta_rms: f64,
}

impl DilationIndices {
    /// `1/γ̂`, snapped to the nearest integer within 0.1; infinite when
    /// `γ̂ < 0.01`.
    pub fn exponent(&self) -> f64 {
        if self.gamma < 0.01 {
            return f64::INFINITY;
        }
        let p = 1.0 / self.gamma;
        let r = math::round(p);
        if math::abs(p - r) <= 0.1 {
            r
        } else {
            p
        }
    }
}

/// A non-increasing map `N ↦ τ(N) ∈ (0, 1]`, `N ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// `τ(N) = 2^{-N}`.
    Pow2,
    /// `τ(N) = c`.
    Constant(f64),
    /// `τ(N) = list[N-1]`, holding the last entry past the end.
    List(Vec<f64>),
}

impl Schedule {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::validation("schedule values must lie in (0, 1]"));
        }
        Ok(Schedule::Constant(c))
    }

    pub fn list(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("schedule list is empty"));
        }
        if values.iter().any(|v| !(*v > 0.0 && *v <= 1.0)) {
            return Err(Error::validation("schedule values must lie in (0, 1]"));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::validation("schedule must be non-increasing"));
        }
        Ok(Schedule::List(values))
    }

    pub fn tau(&self, n: usize) -> f64 {
        match self {
            Schedule::Pow2 => math::pow2(-(n.min(1100) as i32)),
            Schedule::Constant(c) => *c,
            Schedule::List(v) => v[n.saturating_sub(1).min(v.len() - 1)],
        }
    }
}
