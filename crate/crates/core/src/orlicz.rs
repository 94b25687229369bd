//! Orlicz functions `F` (convex, increasing, `F(0) = 0`) and the tests of
//! regular variation at infinity.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::numeric;
use crate::phi::{PhiFunction, Table};
use crate::report::{EquivalenceReport, Witness};

/// `F̃`-based Orlicz function built from a quasi-concave `φ`, with its
/// integral cached on the knots `2^{j/16}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FromPhi {
    phi: PhiFunction,
    inv_one: f64,
    cumulative: Vec<f64>,
}

const FROM_PHI_KNOTS: i32 = 16 * 160;

fn knot(j: i32) -> f64 {
    // 2^{j/16} as an exact power of two times 2^{r/16}
    math::pow2(j.div_euclid(16)) * math::powf(2.0, j.rem_euclid(16) as f64 / 16.0)
}

impl FromPhi {
    /// `F̃(t)`: `t/φ^{-1}(1)` on `[0, 1]`, `1/φ^{-1}(1/t)` above.
    pub fn f_tilde(&self, t: f64) -> f64 {
        if t <= 1.0 {
            return t / self.inv_one;
        }
        match self.phi.inverse(1.0 / t) {
            Some(s) if s > 0.0 => 1.0 / s,
            _ => f64::INFINITY,
        }
    }

    fn piece(&self, a: f64, b: f64) -> f64 {
        numeric::integrate_over_log(&|t: f64| self.f_tilde(t), a, b, 1e-12)
    }

    fn eval(&self, u: f64) -> f64 {
        if u <= 1.0 {
            return u / self.inv_one;
        }
        let j = math::floor(16.0 * math::ln(u) / core::f64::consts::LN_2) as i64;
        let j = (j.max(0) as usize).min(self.cumulative.len() - 1);
        let base = knot(j as i32);
        let (j, base) = if base > u { (j - 1, knot(j as i32 - 1)) } else { (j, base) };
        self.cumulative[j] + self.piece(base, u)
    }

    pub fn phi(&self) -> &PhiFunction {
        &self.phi
    }
}

/// A convex increasing function on `[0, ∞)` with `F(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum OrliczFunction {
    /// `u^p`.
    Power { p: f64 },
    /// `u^p (1 + |ln u|)`.
    PowerLog1 { p: f64 },
    /// `u^p [1 + c sin(p ln u)]`.
    SinLog { p: f64, c: f64 },
    /// `∫_0^u F̃(t) dt/t` for the `F̃` built from `φ`.
    FromPhi(Box<FromPhi>),
    /// Linear interpolation, continued with the last slope.
    Tabulated(Table),
}

impl OrliczFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::validation("Orlicz power needs finite p >= 1"));
        }
        Ok(OrliczFunction::Power { p })
    }

    /// Convex exactly when `p ≥ (3 + √5)/2`.
    pub fn power_log1(p: f64) -> Result<Self> {
        if !(p >= (3.0 + math::sqrt(5.0)) / 2.0 - 1e-12) || !p.is_finite() {
            return Err(Error::validation("powerlog1 is convex only for p >= (3 + sqrt 5)/2"));
        }
        Ok(OrliczFunction::PowerLog1 { p })
    }

    /// Requires `0 < c < 1/√2` and `p ≥ (1 − √2 c/√(1 − 2c²))^{-1}`.
    pub fn sin_log(p: f64, c: f64) -> Result<Self> {
        if !(c > 0.0 && c < core::f64::consts::FRAC_1_SQRT_2) {
            return Err(Error::validation("sinlog needs 0 < c < 1/sqrt 2"));
        }
        let bound = 1.0 / (1.0 - math::sqrt(2.0) * c / math::sqrt(1.0 - 2.0 * c * c));
        if !(p >= bound - 1e-12) || !p.is_finite() {
            return Err(Error::validation(format!("sinlog with c = {c} needs p >= {bound}")));
        }
        Ok(OrliczFunction::SinLog { p, c })
    }

    /// Samples `(u_i, F_i)` on `(0, ∞)`; audited for convexity.
    pub fn tabulated(us: &[f64], fs: &[f64]) -> Result<Self> {
        let table = Table::from_samples(us, fs)?;
        let xs = table.xs();
        let ys = table.ys();
        let mut prev_slope = 0.0;
        for i in 1..xs.len() {
            let slope = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            if !(slope > 0.0) || slope < prev_slope * (1.0 - 1e-12) {
                return Err(Error::validation("tabulated Orlicz function must be increasing and convex"));
            }
            prev_slope = slope;
        }
        Ok(OrliczFunction::Tabulated(table))
    }

    /// Builds `F(u) = ∫_0^u F̃(t)/t dt` from `φ`; needs `φ(1) ≥ 1` so that
    /// `φ^{-1}(1)` exists.
    pub fn from_phi(phi: PhiFunction) -> Result<Self> {
        phi.audit_quasi_concave()?;
        let inv_one = phi
            .inverse(1.0)
            .ok_or_else(|| Error::validation("phi(1) < 1: phi^{-1}(1) does not exist"))?;
        if !(inv_one > 0.0) {
            return Err(Error::validation("phi is not invertible at 1"));
        }
        let mut fp = FromPhi { phi, inv_one, cumulative: Vec::new() };
        let mut acc = 1.0 / inv_one;
        fp.cumulative.push(acc);
        for j in 0..FROM_PHI_KNOTS {
            let part = fp.piece(knot(j), knot(j + 1));
            if !part.is_finite() {
                break;
            }
            acc += part;
            fp.cumulative.push(acc);
        }
        Ok(OrliczFunction::FromPhi(Box::new(fp)))
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match self {
            OrliczFunction::Power { p } => math::powf(u, *p),
            OrliczFunction::PowerLog1 { p } => math::powf(u, *p) * (1.0 + math::abs(math::ln(u))),
            OrliczFunction::SinLog { p, c } => math::powf(u, *p) * (1.0 + c * math::sin(p * math::ln(u))),
            OrliczFunction::FromPhi(fp) => fp.eval(u),
            OrliczFunction::Tabulated(t) => t.eval(u, true),
        }
    }

    /// `F'(u)`; the right derivative for tabulated `F`.
    pub fn derivative(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return match self {
                OrliczFunction::Power { p } if *p == 1.0 => 1.0,
                OrliczFunction::FromPhi(fp) => 1.0 / fp.inv_one,
                OrliczFunction::Tabulated(t) => t.slope_at(0.0, true),
                _ => 0.0,
            };
        }
        match self {
            OrliczFunction::Power { p } => p * math::powf(u, p - 1.0),
            OrliczFunction::PowerLog1 { p } => {
                let l = math::ln(u);
                math::powf(u, p - 1.0) * (p * (1.0 + math::abs(l)) + if l >= 0.0 { 1.0 } else { -1.0 })
            }
            OrliczFunction::SinLog { p, c } => {
                let a = p * math::ln(u);
                p * math::powf(u, p - 1.0) * (1.0 + c * (math::sin(a) + math::cos(a)))
            }
            OrliczFunction::FromPhi(fp) => fp.f_tilde(u) / u,
            OrliczFunction::Tabulated(t) => t.slope_at(u, true),
        }
    }

    /// `F^{-1}(y)` for `y ≥ 0`.
    pub fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self {
            OrliczFunction::Power { p } => math::powf(y, 1.0 / p),
            OrliczFunction::FromPhi(fp) if y <= 1.0 / fp.inv_one => y * fp.inv_one,
            _ => {
                let f = |u: f64| self.eval(u);
                let mut hi = 1.0;
                while f(hi) < y {
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return f64::INFINITY;
                    }
                }
                let mut lo = 0.5 * hi;
                while f(lo) > y {
                    hi = lo;
                    lo *= 0.5;
                    if lo < f64::MIN_POSITIVE {
                        return 0.0;
                    }
                }
                numeric::bisect_increasing(&f, y, lo, hi, 1e-15)
            }
        }
    }

    /// The nominal order `p` of the kind, when it has one.
    pub fn order(&self) -> Option<f64> {
        match self {
            OrliczFunction::Power { p } | OrliczFunction::PowerLog1 { p } | OrliczFunction::SinLog { p, .. } => {
                Some(*p)
            }
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            OrliczFunction::Power { p } => format!("orlicz-power:p={p}"),
            OrliczFunction::PowerLog1 { p } => format!("orlicz-powerlog1:p={p}"),
            OrliczFunction::SinLog { p, c } => format!("orlicz-sinlog:p={p},c={c}"),
            OrliczFunction::FromPhi(fp) => format!("orlicz-from-phi({})", fp.phi.label()),
            OrliczFunction::Tabulated(t) => format!("orlicz-tabulated:points={}", t.xs().len() - 1),
        }
    }

    /// `max F(2u)/F(u)` over `u = u0·2^{j/4}` up to `u_max`.
    pub fn delta2_constant(&self, u0: f64, u_max: f64) -> f64 {
        let mut best = 0.0f64;
        let mut j = 0;
        loop {
            let u = u0 * math::powf(2.0, j as f64 / 4.0);
            if u > u_max {
                break;
            }
            best = best.max(self.eval(2.0 * u) / self.eval(u));
            j += 1;
        }
        best
    }

    /// Convexity on the grid `2^{j/16}`, `j = -16·lo_oct..=16·hi_oct`:
    /// chord slopes must be non-decreasing and positive.
    pub fn audit_convex(&self, lo_oct: i32, hi_oct: i32) -> Result<()> {
        let mut prev_u = 0.0;
        let mut prev_f = 0.0;
        let mut prev_slope = 0.0;
        for j in -16 * lo_oct..=16 * hi_oct {
            let u = knot(j);
            let f = self.eval(u);
            let slope = (f - prev_f) / (u - prev_u);
            if !(slope > 0.0) || slope < prev_slope * (1.0 - 1e-9) {
                return Err(Error::validation(format!("convexity fails near u = {u:e}")));
            }
            prev_u = u;
            prev_f = f;
            prev_slope = slope;
        }
        Ok(())
    }

    /// Largest relative violation of `F̃(u/2) ≤ F(u) ≤ F̃(u)` on
    /// `u = 2^{j/4}`, `j ∈ [-160, 160]`; zero when the sandwich holds.
    /// Only meaningful for the `FromPhi` kind.
    pub fn sandwich_violation(&self) -> Option<f64> {
        let OrliczFunction::FromPhi(fp) = self else { return None };
        let mut worst = 0.0f64;
        for j in -160..=160 {
            let u = math::powf(2.0, j as f64 / 4.0);
            let f = self.eval(u);
            let lo = fp.f_tilde(0.5 * u);
            let hi = fp.f_tilde(u);
            worst = worst.max((lo - f) / f).max((f - hi) / f);
        }
        Some(worst.max(0.0))
    }
}

/// Outcome of the regular-variation test at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct OrliczRegvarReport {
    /// Ratios `F(tu)/(F(t)u^p)` over the part of the grid past each `t_0(u)`.
    pub tail: EquivalenceReport,
    /// `(u, t_0(u))`; `None` when even the last grid point is out of band.
    pub t0: Vec<(f64, Option<f64>)>,
    /// Ratios `F(v)/(N·F(v N^{-1/p}))` for `N ∈ {2, 4, 8, 16}` on the tail.
    pub prop3: EquivalenceReport,
}

impl OrliczRegvarReport {
    pub fn all_found(&self) -> bool {
        self.t0.iter().all(|(_, t)| t.is_some())
    }
}

/// For each `u`, the earliest `t_0(u)` on the grid `2^{j/4} ≤ t_max` past
/// which `F(tu)/(F(t)u^p)` stays in `[1/C, C]`. The grid stops where `F`
/// overflows.
pub fn regvar_orlicz_test(f: &OrliczFunction, p: f64, c: f64, u_grid: &[f64], t_max: f64) -> OrliczRegvarReport {
    let steps = (4.0 * math::ln(t_max) / core::f64::consts::LN_2).max(0.0) as i32;
    let grid: Vec<f64> = (0..=steps)
        .map(|j| math::pow2(j / 4) * math::powf(2.0, (j % 4) as f64 / 4.0))
        .take_while(|t| f.eval(*t).is_finite())
        .collect();
    let mut tail = EquivalenceReport::empty(p);
    let mut t0 = Vec::with_capacity(u_grid.len());
    let mut start_all = 1.0f64;
    for &u in u_grid {
        let up = math::powf(u, p);
        let ratios: Vec<f64> = grid.iter().map(|&t| f.eval(t * u) / (f.eval(t) * up)).collect();
        let mut first = ratios.len();
        while first > 0 && ratios[first - 1] <= c && ratios[first - 1] >= 1.0 / c {
            first -= 1;
        }
        if first == ratios.len() {
            t0.push((u, None));
            continue;
        }
        t0.push((u, Some(grid[first])));
        start_all = start_all.max(grid[first]);
        for (i, r) in ratios.iter().enumerate().skip(first) {
            tail.observe(*r, || Witness::Values(alloc::vec![u, grid[i]]));
        }
    }
    let mut prop3 = EquivalenceReport::empty(p);
    for n in [2.0f64, 4.0, 8.0, 16.0] {
        let shrink = math::powf(n, -1.0 / p);
        for &v in &grid {
            if v * shrink < start_all {
                continue;
            }
            let r = f.eval(v) / (n * f.eval(v * shrink));
            prop3.observe(r, || Witness::Values(alloc::vec![n, v]));
        }
    }
    OrliczRegvarReport { tail: tail.judge(c), t0, prop3 }
}

/// Greedy chain length for Kalton's `Ψ^∞_{F,p}(u, C)` restricted to
/// `a_grid`: points `a_1 < … < a_N` with `a_k/a_{k-1} ≥ 2`, each with
/// `F(a u)/F(a) ≥ C u^p` or `≤ u^p/C`. Taking the smallest admissible point
/// each time is optimal for this chain structure, so the count is exact on
/// the grid and a lower bound for the supremum.
pub fn kalton_psi(f: &OrliczFunction, p: f64, u: f64, c: f64, a_grid: &[f64]) -> usize {
    let up = math::powf(u, p);
    let mut count = 0;
    let mut last: Option<f64> = None;
    for &a in a_grid {
        if let Some(prev) = last {
            if a < 2.0 * prev {
                continue;
            }
        }
        let r = f.eval(a * u) / f.eval(a);
        if r >= c * up || r * c <= up {
            count += 1;
            last = Some(a);
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn inverse_round_trip() {
        let fs = vec![
            OrliczFunction::power(2.0).unwrap(),
            OrliczFunction::power_log1(3.0).unwrap(),
            OrliczFunction::sin_log(6.0, 1.0 / libm::sqrt(5.0)).unwrap(),
            OrliczFunction::from_phi(PhiFunction::TLog).unwrap(),
        ];
        for f in &fs {
            for j in -40..=40 {
                let u = libm::exp2(j as f64 / 2.0);
                assert!(rel(f.inverse(f.eval(u)), u) < 1e-10, "{} u={u}", f.label());
            }
            f.audit_convex(20, 20).unwrap();
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(OrliczFunction::power_log1(2.5).is_err());
        assert!(OrliczFunction::sin_log(5.0, 1.0 / libm::sqrt(5.0)).is_err());
        assert!(OrliczFunction::sin_log(6.0, 0.8).is_err());
        assert!(OrliczFunction::tabulated(&[1.0, 2.0], &[1.0, 1.5]).is_err());
        assert!(OrliczFunction::from_phi(PhiFunction::power(0.5).unwrap().clone()).is_ok());
        let small = PhiFunction::tabulated(&[1.0], &[0.5]).unwrap();
        assert!(OrliczFunction::from_phi(small).is_err());
    }

    #[test]
    fn from_phi_of_power_matches_closed_form() {
        // φ = t^{1/p}: F̃(t) = t^p, F(u) = u^p / p
        let p = 3.0;
        let f = OrliczFunction::from_phi(PhiFunction::power(1.0 / p).unwrap()).unwrap();
        for j in 0..=60 {
            let u = libm::exp2(j as f64 / 3.0);
            let expect = if u <= 1.0 { u } else { 1.0 + (u.powf(p) - 1.0) / p };
            assert!(rel(f.eval(u), expect) < 1e-9, "u={u}");
            let band = f.eval(u) / u.powf(p);
            assert!(band >= 1.0 / (2f64.powf(p) * p) && band <= 1.0 + 1e-12);
        }
        assert_eq!(f.sandwich_violation(), Some(0.0));
    }

    #[test]
    fn from_phi_unit_value() {
        let f = OrliczFunction::from_phi(PhiFunction::TLog).unwrap();
        assert!(f.eval(1.0) <= 1.0 + 1e-15);
        assert!(f.sandwich_violation().unwrap() < 1e-9);
    }

    #[test]
    fn delta2_of_powers() {
        assert!(rel(OrliczFunction::power(3.0).unwrap().delta2_constant(1.0, 1e6), 8.0) < 1e-12);
    }

    #[test]
    fn regvar_orlicz_examples() {
        let us = [0.5, 0.25];
        let r = regvar_orlicz_test(&OrliczFunction::power(2.5).unwrap(), 2.5, 1.01, &us, 1e12);
        assert!(r.all_found() && rel(r.tail.max_ratio, 1.0) < 1e-12);
        assert!(rel(r.prop3.max_ratio, 1.0) < 1e-12);

        let r = regvar_orlicz_test(&OrliczFunction::power_log1(3.0).unwrap(), 3.0, 2.0, &us, 1e15);
        assert!(r.all_found(), "{:?}", r.t0);

        let sl = OrliczFunction::sin_log(6.0, 1.0 / libm::sqrt(5.0)).unwrap();
        let loose = regvar_orlicz_test(&sl, 6.0, 8.0, &us, 1e15);
        assert!(loose.all_found());
        let tight = regvar_orlicz_test(&sl, 6.0, 1.05, &us, 1e15);
        assert!(!tight.all_found());
    }

    #[test]
    fn kalton_examples() {
        let grid: Vec<f64> = (0..=60).map(|j| libm::exp2(j as f64)).collect();
        assert_eq!(kalton_psi(&OrliczFunction::power(3.0).unwrap(), 3.0, 0.5, 1.5, &grid), 0);
        let f = OrliczFunction::power_log1(3.0).unwrap();
        let n = kalton_psi(&f, 3.0, 0.5, 2.0, &grid);
        assert!(n <= 8, "{n}");
    }
}
