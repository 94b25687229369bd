//! Proximal bundle method for convex, nonsmooth objectives given by a value
//! and subgradient oracle.
//!
//! Every cut `f(z) + s·(x − z)` is a global lower bound, and so is any convex
//! combination of cuts. Minimising that aggregate over a box known to hold a
//! minimiser gives a certified bound on the remaining gap.

use alloc::vec::Vec;

use crate::error::Result;
use crate::math;

pub(crate) struct BundleOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// `value − min f`, bounded from above by the aggregate cut.
    pub gap: f64,
}

struct Cut {
    at: Vec<f64>,
    value: f64,
    slope: Vec<f64>,
}

impl Cut {
    fn eval(&self, x: &[f64]) -> f64 {
        self.value + self.slope.iter().zip(x.iter().zip(&self.at)).map(|(s, (a, b))| s * (a - b)).sum::<f64>()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimises `½ λᵀGλ + cᵀλ` over the unit simplex by Frank–Wolfe with away
/// steps and exact line search.
fn simplex_qp(gram: &[f64], c: &[f64], m: usize) -> Vec<f64> {
    let start = (0..m).fold(0, |b, i| if c[i] + 0.5 * gram[i * m + i] < c[b] + 0.5 * gram[b * m + b] { i } else { b });
    let mut lam = alloc::vec![0.0; m];
    lam[start] = 1.0;
    let mut gl: Vec<f64> = (0..m).map(|i| gram[i * m + start]).collect();
    for _ in 0..20 * m + 200 {
        let grad: Vec<f64> = (0..m).map(|i| gl[i] + c[i]).collect();
        let at = dot(&grad, &lam);
        let s = (0..m).fold(0, |b, i| if grad[i] < grad[b] { i } else { b });
        let v = (0..m).filter(|&i| lam[i] > 0.0).fold(start, |b, i| if lam[b] == 0.0 || grad[i] > grad[b] { i } else { b });
        let quad = dot(&gl, &lam);
        let scale = quad.abs() + c.iter().fold(0.0f64, |a, x| a.max(x.abs())) + f64::MIN_POSITIVE;
        let (fw, away) = (at - grad[s], grad[v] - at);
        if fw.max(away) <= 1e-15 * scale {
            break;
        }
        if fw >= away {
            // d = e_s − λ
            let curv = gram[s * m + s] - 2.0 * gl[s] + quad;
            let g = if curv > 0.0 { (fw / curv).min(1.0) } else { 1.0 };
            for i in 0..m {
                lam[i] *= 1.0 - g;
                gl[i] = (1.0 - g) * gl[i] + g * gram[i * m + s];
            }
            lam[s] += g;
        } else {
            // d = λ − e_v
            let gmax = lam[v] / (1.0 - lam[v]);
            let curv = quad - 2.0 * gl[v] + gram[v * m + v];
            let g = if curv > 0.0 { (away / curv).min(gmax) } else { gmax };
            for i in 0..m {
                lam[i] *= 1.0 + g;
                gl[i] = (1.0 + g) * gl[i] - g * gram[i * m + v];
            }
            lam[v] -= g;
            if g == gmax {
                lam[v] = 0.0;
            }
        }
    }
    lam
}

/// Minimises the convex `f` from `x0`. `lower` and `upper` bound a box that
/// contains a minimiser; it is used only for the gap certificate. Stops when
/// the gap falls below `rel_tol·|f|` or after `max_iter` oracle calls.
pub(crate) fn bundle_minimize<F>(
    mut oracle: F,
    x0: Vec<f64>,
    lower: &[f64],
    upper: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<BundleOutcome>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let n = x0.len();
    let (f0, s0) = oracle(&x0)?;
    let diam = math::sqrt(lower.iter().zip(upper).map(|(a, b)| (b - a) * (b - a)).sum::<f64>());
    let mut mu = math::sqrt(dot(&s0, &s0)) / (0.1 * diam).max(f64::MIN_POSITIVE);
    let mut center = x0.clone();
    let mut fc = f0;
    let mut cuts = alloc::vec![Cut { at: x0, value: f0, slope: s0 }];
    let cap = 2 * n + 8;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        let m = cuts.len();
        let alpha: Vec<f64> = cuts.iter().map(|c| (fc - c.eval(&center)).max(0.0)).collect();
        let mut gram = alloc::vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let g = dot(&cuts[i].slope, &cuts[j].slope);
                gram[i * m + j] = g;
                gram[j * m + i] = g;
            }
        }
        let lin: Vec<f64> = alpha.iter().map(|a| mu * a).collect();
        let lam = simplex_qp(&gram, &lin, m);
        let mut agg = alloc::vec![0.0; n];
        let mut eps = 0.0;
        for (j, cut) in cuts.iter().enumerate() {
            if lam[j] > 0.0 {
                eps += lam[j] * alpha[j];
                for i in 0..n {
                    agg[i] += lam[j] * cut.slope[i];
                }
            }
        }
        let drop: f64 = (0..n).map(|i| (agg[i] * (lower[i] - center[i])).min(agg[i] * (upper[i] - center[i]))).sum();
        gap = gap.min((eps - drop).max(0.0));
        let norm2 = dot(&agg, &agg);
        let predicted = eps + norm2 / mu;
        if gap <= rel_tol * fc.abs() || !(predicted > 1e-16 * fc.abs()) {
            break;
        }
        let trial: Vec<f64> = (0..n).map(|i| center[i] - agg[i] / mu).collect();
        let aggregate = Cut { at: center.clone(), value: fc - eps, slope: agg };
        let (ft, st) = oracle(&trial)?;
        iterations += 1;
        let gain = fc - ft;
        if gain >= 0.1 * predicted {
            if gain >= 0.7 * predicted {
                mu *= 0.5;
            }
            center.clone_from(&trial);
            fc = ft;
            gap = f64::INFINITY;
        } else if cuts.len() >= cap / 2 {
            mu *= 1.5;
        }
        if cuts.len() + 1 > cap {
            let mut kept: Vec<Cut> = cuts.into_iter().zip(&lam).filter(|(_, l)| **l > 1e-12).map(|(c, _)| c).collect();
            if kept.len() + 2 > cap {
                kept.clear();
            }
            kept.push(aggregate);
            cuts = kept;
        }
        cuts.push(Cut { at: trial, value: ft, slope: st });
    }
    Ok(BundleOutcome { x: center, value: fc, iterations, gap })
}
