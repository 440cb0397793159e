//! Excess queries over the posterior-sorted order.
//!
//! For one posterior vector `s` (query order), the pairwise form sums
//! `s_j − s_i` over every inverted pair `i < j, s_i < s_j`; the rank form is
//! `Σ_t t (s_t − ŝ_t)` with `ŝ` sorted descending. The two are equal.

use super::PosteriorSample;
use crate::error::{Error, Result};

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Pairwise form by direct double loop, `O(T²)`.
pub fn excess_pairwise_naive(s: &[f64]) -> f64 {
    let mut total = CompensatedSum::default();
    for j in 1..s.len() {
        let sj = s[j];
        let row: f64 = s[..j].iter().map(|&si| (sj - si).max(0.0)).sum();
        total.add(row);
    }
    total.value()
}

/// Pairwise form in `O(T log T)` with a Fenwick tree over value ranks.
pub fn excess_pairwise(s: &[f64]) -> f64 {
    let t = s.len();
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    // equal values share a rank so that only strict inversions count
    let mut rank = vec![0usize; t];
    let mut r = 0;
    for k in 0..t {
        if k > 0 && s[order[k]] != s[order[k - 1]] {
            r += 1;
        }
        rank[order[k]] = r;
    }
    let size = r + 1;
    let mut count = vec![0u64; size + 1];
    let mut sum = vec![0.0f64; size + 1];
    let mut total = CompensatedSum::default();
    for j in 0..t {
        // prefix over ranks strictly below rank[j]
        let (mut c, mut acc) = (0u64, 0.0f64);
        let mut i = rank[j];
        while i > 0 {
            c += count[i];
            acc += sum[i];
            i &= i - 1;
        }
        if c > 0 {
            total.add(c as f64 * s[j] - acc);
        }
        let mut i = rank[j] + 1;
        while i <= size {
            count[i] += 1;
            sum[i] += s[j];
            i += i & i.wrapping_neg();
        }
    }
    total.value()
}

/// Error-free `a − b = hi + lo`.
fn two_diff(a: f64, b: f64) -> (f64, f64) {
    let hi = a - b;
    let bb = a - hi;
    let lo = (a - (hi + bb)) + (bb - b);
    (hi, lo)
}

/// Rank form `Σ_t t (s_t − ŝ_t)`, evaluated as `Σ_t D_t` with tail sums
/// `D_t = Σ_{u ≥ t} (s_u − ŝ_u) ≥ 0`.
pub fn excess_rank_difference(s: &[f64]) -> f64 {
    let mut sorted = s.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut tail = CompensatedSum::default();
    let mut total = CompensatedSum::default();
    for u in (0..s.len()).rev() {
        let (hi, lo) = two_diff(s[u], sorted[u]);
        tail.add(hi);
        tail.add(lo);
        total.add(tail.value());
    }
    total.value()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessEstimate {
    /// Sample mean of the pairwise form.
    pub pairwise: f64,
    /// Sample mean of the rank form.
    pub rank_difference: f64,
    /// Standard error of the rank-form mean.
    pub std_err: f64,
    pub samples: usize,
}

pub fn excess_queries_estimate(samples: &[PosteriorSample]) -> Result<ExcessEstimate> {
    excess_from_vectors(samples.iter().map(|p| p.s.as_slice()))
}

pub(crate) fn excess_from_vectors<'a>(
    vectors: impl IntoIterator<Item = &'a [f64]>,
) -> Result<ExcessEstimate> {
    let mut pair = CompensatedSum::default();
    let mut rank = CompensatedSum::default();
    let mut rank2 = CompensatedSum::default();
    let mut m = 0usize;
    for s in vectors {
        pair.add(excess_pairwise(s));
        let r = excess_rank_difference(s);
        rank.add(r);
        rank2.add(r * r);
        m += 1;
    }
    if m == 0 {
        return Err(Error::invalid("excess estimate needs at least one sample"));
    }
    let mf = m as f64;
    let mean = rank.value() / mf;
    let var = if m > 1 {
        ((rank2.value() - mf * mean * mean) / (mf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(ExcessEstimate {
        pairwise: pair.value() / mf,
        rank_difference: mean,
        std_err: (var / mf).sqrt(),
        samples: m,
    })
}
