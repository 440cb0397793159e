//! Data-driven ORB-type weights: expected order statistics of `|L|`
//! ("CDF" weights) and a three-segment piecewise-linear approximation.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{WeightFunction, WeightKind};
use crate::error::{Error, Result};

/// Monte Carlo estimate of `E[r-th smallest |L|]` for `n` i.i.d. LLRs with
/// `L = (2/σ²)(1 + σZ)`.
pub fn cdf_weight_function<R: Rng + ?Sized>(
    n: usize,
    sigma: f64,
    mc_samples: usize,
    rng: &mut R,
) -> Result<WeightFunction> {
    if mc_samples < 10_000 {
        return Err(Error::invalid(format!(
            "CDF weights need at least 10^4 samples, got {mc_samples}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma must be positive"));
    }
    let scale = 2.0 / (sigma * sigma);
    let mut acc = vec![0.0f64; n];
    let mut buf = vec![0.0f64; n];
    for _ in 0..mc_samples {
        for b in buf.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *b = (scale * (1.0 + sigma * z)).abs();
        }
        buf.sort_unstable_by(f64::total_cmp);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b;
        }
    }
    let mut gamma: Vec<f64> = acc.iter().map(|a| a / mc_samples as f64).collect();
    // isotonic clean-up against rounding
    for r in 1..n {
        if gamma[r] < gamma[r - 1] {
            gamma[r] = gamma[r - 1];
        }
    }
    WeightFunction::new(WeightKind::Cdf, gamma)
}

/// `gamma(r) = intercept + s1·min(r, b1) + s2·clamp(r - b1, 0, b2 - b1) + s3·max(r - b2, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLineParams {
    pub intercept: f64,
    pub slopes: [f64; 3],
    pub breakpoints: [f64; 2],
}

impl ThreeLineParams {
    pub fn eval(&self, r: f64) -> f64 {
        let [b1, b2] = self.breakpoints;
        let [s1, s2, s3] = self.slopes;
        self.intercept + s1 * r.min(b1) + s2 * (r - b1).clamp(0.0, b2 - b1) + s3 * (r - b2).max(0.0)
    }

    fn basis(r: f64, b1: f64, b2: f64) -> [f64; 4] {
        [1.0, r.min(b1), (r - b1).clamp(0.0, b2 - b1), (r - b2).max(0.0)]
    }
}

pub fn three_line_weight_function(n: usize, params: &ThreeLineParams) -> Result<WeightFunction> {
    let [b1, b2] = params.breakpoints;
    let upper = (n as f64).max(2.0);
    if !(1.0 <= b1 && b1 < b2 && b2 <= upper) {
        return Err(Error::invalid(format!(
            "breakpoints must satisfy 1 <= b1 < b2 <= n, got ({b1}, {b2}) for n={n}"
        )));
    }
    if params.slopes.iter().any(|s| !(*s >= 0.0)) || !(params.intercept >= 0.0) {
        return Err(Error::invalid("slopes and intercept must be nonnegative"));
    }
    let gamma = (1..=n).map(|r| params.eval(r as f64)).collect();
    WeightFunction::new(WeightKind::ThreeLine, gamma)
}

fn sse(params: &ThreeLineParams, target: &[f64]) -> f64 {
    target
        .iter()
        .enumerate()
        .map(|(i, t)| (params.eval((i + 1) as f64) - t).powi(2))
        .sum()
}

fn least_squares(design: &DMatrix<f64>, target: &DVector<f64>) -> Option<DVector<f64>> {
    design.clone().svd(true, true).solve(target, 1e-12).ok()
}

/// Best single-line fit, expressed as three equal segments.
fn one_line_fit(target: &[f64]) -> ThreeLineParams {
    let n = target.len();
    let design = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { (i + 1) as f64 });
    let y = DVector::from_column_slice(target);
    let (mut c, mut s) = match least_squares(&design, &y) {
        Some(sol) => (sol[0], sol[1]),
        None => (target.first().copied().unwrap_or(0.0), 0.0),
    };
    if s < 0.0 || c < 0.0 {
        // fall back to the nearest nonnegative line through the mean
        s = s.max(0.0);
        let mean_r = (n as f64 + 1.0) / 2.0;
        let mean_t = target.iter().sum::<f64>() / n as f64;
        c = (mean_t - s * mean_r).max(0.0);
    }
    let b1 = 1.0;
    let b2 = (n as f64).max(2.0);
    ThreeLineParams {
        intercept: c,
        slopes: [s; 3],
        breakpoints: [b1, b2],
    }
}

/// Least-squares three-segment fit to `target[r - 1]`, searching integer
/// breakpoints; never worse than the best single line.
pub fn fit_three_line(target: &[f64]) -> Result<ThreeLineParams> {
    let n = target.len();
    if n == 0 {
        return Err(Error::invalid("cannot fit an empty curve"));
    }
    let y = DVector::from_column_slice(target);
    let mut best = one_line_fit(target);
    let mut best_sse = sse(&best, target);
    for b1 in 1..n {
        for b2 in b1 + 1..=n {
            let (b1f, b2f) = (b1 as f64, b2 as f64);
            let design = DMatrix::from_fn(n, 4, |i, j| ThreeLineParams::basis((i + 1) as f64, b1f, b2f)[j]);
            let Some(sol) = least_squares(&design, &y) else {
                continue;
            };
            let cand = ThreeLineParams {
                intercept: sol[0],
                slopes: [sol[1], sol[2], sol[3]],
                breakpoints: [b1f, b2f],
            };
            if cand.intercept < 0.0 || cand.slopes.iter().any(|&s| s < 0.0) {
                continue;
            }
            let e = sse(&cand, target);
            if e < best_sse {
                best = cand;
                best_sse = e;
            }
        }
    }
    Ok(best)
}
