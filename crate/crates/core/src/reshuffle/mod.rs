//! Posterior-driven reshuffling of ORB-type schedules.
//!
//! For a channel realization with sorted reliabilities `λ_1 ≤ … ≤ λ_n` and
//! i.i.d. noise bits, the pattern flipping ranks `p` is the true noise with
//! probability
//!
//! ```text
//! s(p) = Π_{r ∈ p} 1/(1 + e^{λ_r}) · Π_{r ∉ p} e^{λ_r}/(1 + e^{λ_r})
//!      = exp(log s(∅) − Σ_{r ∈ p} λ_r)
//! ```
//!
//! Averaging `s` over channel realizations and sorting the base schedule by
//! the averages gives a fixed, data-independent reordering.

mod excess;
mod model;
mod rmatrix;

use rand_distr::{Distribution, StandardNormal};

use crate::channel::softplus;
use crate::error::{Error, Result};
use crate::par::ordered_reduce;
use crate::pattern::{RankPattern, Schedule};
use crate::rng::stream;

pub use excess::{
    excess_pairwise, excess_pairwise_naive, excess_queries_estimate, excess_rank_difference,
    ExcessEstimate,
};
pub use model::{
    compare_heldout, descending_order, load_model, read_model, reshuffle_schedule, save_model, train, write_model,
    HeldoutComparison, ReshuffleModel, TrainingMeta,
};
pub use excess::CompensatedSum;
pub use rmatrix::{export_rmatrix, r_matrix, rmatrix_from_sampler, RFormat, RMatrix};

/// Samples per work chunk in the parallel estimators.
const CHUNK: u64 = 64;

/// `log s(∅)` for sorted reliabilities `λ`.
pub fn log_posterior_empty(lambda: &[f64]) -> f64 {
    -lambda.iter().map(|&l| softplus(-l)).sum::<f64>()
}

pub fn posterior_s(sorted_abs_llr: &[f64], p: &RankPattern) -> f64 {
    let flipped: f64 = p.ranks().iter().map(|&r| sorted_abs_llr[r as usize - 1]).sum();
    (log_posterior_empty(sorted_abs_llr) - flipped).exp()
}

/// One channel realization and the posteriors of a pattern list under it.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSample {
    pub sorted_abs_llr: Vec<f64>,
    pub s: Vec<f64>,
}

/// Draws sorted reliability vectors `λ = sort |2Y/σ²|`, `Y ~ N(1, σ²)`.
/// Sample `m` comes from its own stream, so any subset can be regenerated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorSampler {
    n: usize,
    sigma: f64,
    seed: u64,
}

impl PosteriorSampler {
    pub fn new(n: usize, sigma: f64, seed: u64) -> Result<Self> {
        if n == 0 || n > crate::pattern::MAX_N {
            return Err(Error::invalid(format!("n={n} outside 1..={}", crate::pattern::MAX_N)));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(PosteriorSampler { n, sigma, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lambda(&self, m: u64) -> Vec<f64> {
        let mut rng = stream(self.seed, "posterior", m);
        let scale = 2.0 / (self.sigma * self.sigma);
        let mut lambda: Vec<f64> = (0..self.n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                ((1.0 + self.sigma * z) * scale).abs()
            })
            .collect();
        lambda.sort_by(f64::total_cmp);
        lambda
    }
}

/// A pattern list flattened for repeated posterior evaluation.
#[derive(Debug, Clone)]
pub struct PosteriorEvaluator {
    n: usize,
    offsets: Vec<u32>,
    ranks: Vec<u8>,
}

impl PosteriorEvaluator {
    pub fn new(patterns: &[RankPattern], n: usize) -> Self {
        let mut offsets = Vec::with_capacity(patterns.len() + 1);
        let mut ranks = Vec::new();
        offsets.push(0);
        for p in patterns {
            debug_assert!(p.max_rank().is_none_or(|r| r as usize <= n));
            ranks.extend(p.ranks().iter().map(|r| r - 1));
            offsets.push(ranks.len() as u32);
        }
        PosteriorEvaluator { n, offsets, ranks }
    }

    pub fn for_schedule(s: &Schedule) -> Self {
        Self::new(s.patterns(), s.n())
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval_into(&self, lambda: &[f64], out: &mut [f64]) {
        assert_eq!(lambda.len(), self.n);
        assert_eq!(out.len(), self.len());
        let log0 = log_posterior_empty(lambda);
        for (t, o) in out.iter_mut().enumerate() {
            let span = &self.ranks[self.offsets[t] as usize..self.offsets[t + 1] as usize];
            let flipped: f64 = span.iter().map(|&r| lambda[r as usize]).sum();
            *o = (log0 - flipped).exp();
        }
    }

    pub fn eval(&self, lambda: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(lambda, &mut out);
        out
    }

    pub fn sample(&self, sampler: &PosteriorSampler, m: u64) -> PosteriorSample {
        let sorted_abs_llr = sampler.lambda(m);
        let s = self.eval(&sorted_abs_llr);
        PosteriorSample { sorted_abs_llr, s }
    }
}

/// Monte Carlo estimate of `E[S_t]` for every pattern of `base`.
pub fn estimate_mean_posteriors(
    base: &Schedule,
    sigma: f64,
    mc_samples: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    if mc_samples == 0 {
        return Err(Error::invalid("mc_samples must be at least 1"));
    }
    let sampler = PosteriorSampler::new(base.n(), sigma, seed)?;
    let eval = PosteriorEvaluator::for_schedule(base);
    let t1 = eval.len();
    let sums = ordered_reduce(
        mc_samples,
        CHUNK,
        || (vec![0.0; t1], vec![0.0; t1]),
        |(acc, buf), m| {
            eval.eval_into(&sampler.lambda(m), buf);
            for (a, s) in acc.iter_mut().zip(buf.iter()) {
                *a += s;
            }
        },
        |(total, _), (part, _)| {
            for (a, s) in total.iter_mut().zip(part) {
                *a += s;
            }
        },
    )
    .0;
    Ok(sums.into_iter().map(|s| s / mc_samples as f64).collect())
}
