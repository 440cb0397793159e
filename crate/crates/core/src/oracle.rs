//! Brute-force references for small instances.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::bits::BitWord;
use crate::channel::{compute_llr, hard_decision, softplus};
use crate::codebook::BinaryCode;
use crate::error::{Error, Result};
use crate::grand::{rank_map, sgrand_policy};
use crate::par::ordered_reduce;
use crate::pattern::{tie_order, Schedule};
use crate::reshuffle::{CompensatedSum, PosteriorEvaluator, PosteriorSampler};
use crate::rng::stream;

/// Largest dimension [`ml_decode_bruteforce`] will enumerate.
pub const MAX_ML_DIMENSION: usize = 16;
/// Largest length for the exhaustive search-problem oracles.
pub const MAX_SEARCH_N: usize = 14;

/// The codeword nearest to `y` in Euclidean distance after BPSK mapping;
/// ties go to the lexicographically smallest codeword.
pub fn ml_decode_bruteforce(y: &[f64], code: &dyn BinaryCode) -> Result<BitWord> {
    let (n, k) = (code.n(), code.k());
    if y.len() != n {
        return Err(Error::invalid(format!("channel output has length {}, code length is {n}", y.len())));
    }
    if k > MAX_ML_DIMENSION {
        return Err(Error::Capacity(format!(
            "exhaustive ML needs k <= {MAX_ML_DIMENSION}, code has k={k}"
        )));
    }
    let mut best: Option<(f64, BitWord)> = None;
    for u in 0..1u128 << k {
        let c = code.encode(&BitWord::from_u128(u, k)?)?;
        // |y - x|² = |y|² + n - 2<y,x>, so maximize the correlation
        let corr: f64 = y
            .iter()
            .enumerate()
            .map(|(i, &v)| if c.get(i) { -v } else { v })
            .sum();
        let better = match &best {
            None => true,
            Some((b, w)) => corr > *b || (corr == *b && c.lex_cmp(w).is_lt()),
        };
        if better {
            best = Some((corr, c));
        }
    }
    Ok(best.expect("at least the zero codeword").1)
}

/// Query order for the search problem.
#[derive(Debug, Clone, Copy)]
pub enum SearchPolicy<'a> {
    /// An ORB-type schedule listing all `2ⁿ` rank patterns.
    Schedule(&'a Schedule),
    /// Ascending `Σ|ℓ|` per realization.
    Sgrand,
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: u64,
}

#[derive(Default)]
struct Moments {
    sum: CompensatedSum,
    sq: CompensatedSum,
}

impl Moments {
    fn add(&mut self, x: f64) {
        self.sum.add(x);
        self.sq.add(x * x);
    }

    fn merge(&mut self, o: Moments) {
        self.sum.add(o.sum.value());
        self.sq.add(o.sq.value());
    }

    fn estimate(&self, m: u64) -> Estimate {
        let mf = m as f64;
        let mean = self.sum.value() / mf;
        let var = if m > 1 {
            ((self.sq.value() - mf * mean * mean) / (mf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            std_err: (var / mf).sqrt(),
            samples: m,
        }
    }
}

fn check_search(policy: &SearchPolicy, sigma: f64, n: usize, samples: u64) -> Result<()> {
    if n == 0 || n > MAX_SEARCH_N {
        return Err(Error::Capacity(format!("search oracles need 1 <= n <= {MAX_SEARCH_N}, got {n}")));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    if let SearchPolicy::Schedule(s) = policy {
        if s.n() != n || s.len() != 1 << n {
            return Err(Error::invalid(format!(
                "schedule must list all {} patterns for n={n}",
                1u64 << n
            )));
        }
    }
    Ok(())
}

/// Simulates the genie-aided search: `W` uniform over `F₂ⁿ`, the searcher
/// walks the policy until `θ(y) ⊕ e(t) = W`, and the mean stopping index is
/// reported.
pub fn genie_search_trials(
    policy: SearchPolicy,
    sigma: f64,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    check_search(&policy, sigma, n, trials)?;
    let index: HashMap<u128, u64> = match policy {
        SearchPolicy::Schedule(s) => s
            .patterns()
            .iter()
            .enumerate()
            .map(|(t, p)| (p.mask(), t as u64 + 1))
            .collect(),
        SearchPolicy::Sgrand => HashMap::new(),
    };
    let moments = ordered_reduce(
        trials,
        256,
        Moments::default,
        |acc, i| {
            let mut rng = stream(seed, "genie", i);
            let w = crate::codebook::random_word(n, &mut rng);
            let y: Vec<f64> = (0..n)
                .map(|j| {
                    let x = if w.get(j) { -1.0 } else { 1.0 };
                    let z: f64 = rng.sample(StandardNormal);
                    x + sigma * z
                })
                .collect();
            let noise = hard_decision(&y) ^ w;
            let llr = compute_llr(&y, sigma).expect("sigma checked");
            let stop = match policy {
                SearchPolicy::Schedule(_) => {
                    let map = rank_map(&llr);
                    let mask = noise
                        .support()
                        .fold(0u128, |m, p| m | 1 << (map.rank_of[p] - 1));
                    index[&mask]
                }
                SearchPolicy::Sgrand => {
                    sgrand_policy(&llr).position(|e| e == noise).expect("stream is exhaustive") as u64 + 1
                }
            };
            acc.add(stop as f64);
        },
        Moments::merge,
    );
    Ok(moments.estimate(trials))
}

/// Monte Carlo estimate of `Q = Σ_t t E[S_t]` over all `2ⁿ` patterns.
pub fn q_formula_estimate(
    policy: SearchPolicy,
    sigma: f64,
    n: usize,
    mc_samples: u64,
    seed: u64,
) -> Result<Estimate> {
    check_search(&policy, sigma, n, mc_samples)?;
    let sampler = PosteriorSampler::new(n, sigma, seed)?;
    let eval = match policy {
        SearchPolicy::Schedule(s) => PosteriorEvaluator::for_schedule(s),
        SearchPolicy::Sgrand => {
            let all: Vec<_> = (0..1u128 << n).map(crate::pattern::RankPattern::from_mask).collect();
            PosteriorEvaluator::new(&all, n)
        }
    };
    let sgrand = matches!(policy, SearchPolicy::Sgrand);
    let moments = ordered_reduce(
        mc_samples,
        64,
        Moments::default,
        |acc, m| {
            let mut s = eval.eval(&sampler.lambda(m));
            if sgrand {
                s.sort_by(|a, b| b.total_cmp(a));
            }
            let mut q = CompensatedSum::default();
            for (t, v) in s.iter().enumerate() {
                q.add((t + 1) as f64 * v);
            }
            acc.add(q.value());
        },
        Moments::merge,
    );
    Ok(moments.estimate(mc_samples))
}

/// Sorts position-domain patterns by descending posterior probability,
/// evaluated factor by factor; ties go to the smaller support, then the
/// lexicographically smaller position set.
pub fn sort_patterns_by_posterior(llr: &[f64], patterns: &[BitWord]) -> Vec<BitWord> {
    let keyed: Vec<(f64, Vec<u8>, BitWord)> = patterns
        .iter()
        .map(|e| {
            let log_s: f64 = llr
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let a = l.abs();
                    // log 1/(1+e^a) when flipped, log e^a/(1+e^a) otherwise
                    if e.get(i) { -softplus(a) } else { -softplus(-a) }
                })
                .sum();
            let support: Vec<u8> = e.support().map(|i| i as u8).collect();
            (log_s, support, *e)
        })
        .collect();
    let mut keyed = keyed;
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| tie_order(&a.1, &b.1)));
    keyed.into_iter().map(|(_, _, e)| e).collect()
}
