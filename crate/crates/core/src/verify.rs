//! The oracle property suite behind `grandlab oracle verify`.
//!
//! Each check compares a production routine against a brute-force or
//! independent estimate and reports a one-line summary.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitWord;
use crate::channel::{modulate_bpsk, transmit, ChannelParams};
use crate::codebook::{build_toy_code, BinaryCode, ToyCode};
use crate::grand::{sgrand_policy, GrandDecoder, OrderingPolicy};
use crate::oracle::{genie_search_trials, ml_decode_bruteforce, q_formula_estimate, sort_patterns_by_posterior, SearchPolicy};
use crate::pattern::{
    accumulated_weight, cdf_weight_function, enumerate_schedule, fit_three_line, three_line_weight_function, tie_order,
    RankPattern, WeightFunction, WeightKind,
};
use crate::reshuffle::{
    excess_pairwise_naive, excess_rank_difference, CompensatedSum, PosteriorEvaluator, PosteriorSampler,
};
use crate::rng::stream;

/// Outcome of one property check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn report(name: &'static str, passed: bool, detail: String) -> CheckReport {
    CheckReport { name, passed, detail }
}

/// Untruncated SGRAND against exhaustive ML on `trials` noisy words.
pub fn ml_equivalence(code: &dyn BinaryCode, sigma: f64, trials: u64, seed: u64) -> CheckReport {
    let name = "ml_equivalence";
    let n = code.n();
    let dec = GrandDecoder::new(code);
    let policy = OrderingPolicy::sgrand(1usize << n).expect("nonzero");
    let params = ChannelParams::from_sigma(sigma).expect("positive sigma");
    let mut mismatches = 0u64;
    let mut errors = 0u64;
    for i in 0..trials {
        let mut rng = stream(seed, "ml-equivalence", i);
        let w = code.random_codeword(&mut rng);
        let y = transmit(&modulate_bpsk(&w), &params, &mut rng);
        let ml = ml_decode_bruteforce(&y, code).expect("small code");
        let got = dec.decode(&y, sigma, &policy).expect("lengths match").codeword;
        mismatches += (got != Some(ml)) as u64;
        errors += (ml != w) as u64;
    }
    report(
        name,
        mismatches == 0,
        format!("{}: {trials} trials, {mismatches} disagreements, {errors} ML errors", code.name()),
    )
}

/// Genie-search means against the query-count formula over a grid.
pub fn search_cost_grid(ns: &[usize], sigmas: &[f64], samples: u64, seed: u64) -> CheckReport {
    let name = "search_cost_grid";
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut cells = 0;
    for &n in ns {
        let unit = enumerate_schedule(&WeightFunction::unit(n), n, 1 << n).expect("full schedule");
        let rank = enumerate_schedule(&WeightFunction::rank(n), n, 1 << n).expect("full schedule");
        for &sigma in sigmas {
            for (label, policy) in [
                ("unit", SearchPolicy::Schedule(&unit)),
                ("rank", SearchPolicy::Schedule(&rank)),
                ("sgrand", SearchPolicy::Sgrand),
            ] {
                cells += 1;
                let g = genie_search_trials(policy, sigma, n, samples, seed).expect("valid cell");
                let q = q_formula_estimate(policy, sigma, n, samples, seed ^ 1).expect("valid cell");
                let se = (g.std_err.powi(2) + q.std_err.powi(2)).sqrt();
                let z = (g.mean - q.mean).abs() / se.max(f64::MIN_POSITIVE);
                worst = worst.max(z);
                if z > 3.0 {
                    failures.push(format!("n={n} sigma={sigma} {label}: {:.3} vs {:.3}", g.mean, q.mean));
                }
            }
        }
    }
    report(
        name,
        failures.is_empty(),
        format!("{cells} cells, worst deviation {worst:.2} SE {}", failures.join("; ")),
    )
}

/// Descending-posterior order against the SGRAND stream.
pub fn posterior_order(n: usize, draws: u64, seed: u64) -> CheckReport {
    let name = "posterior_order";
    let all: Vec<BitWord> = (0..1u128 << n).map(|m| BitWord::from_u128(m, n).expect("n <= 128")).collect();
    let mut bad = 0;
    for i in 0..draws {
        let mut rng = stream(seed, "posterior-order", i);
        let sigma = rng.random_range(0.3..2.0);
        let llr: Vec<f64> = (0..n)
            .map(|_| {
                let y = 1.0 + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);
                2.0 * y / (sigma * sigma)
            })
            .collect();
        let by_posterior = sort_patterns_by_posterior(&llr, &all);
        let stream_order: Vec<BitWord> = sgrand_policy(&llr).collect();
        bad += (by_posterior != stream_order) as u64;
    }
    report(name, bad == 0, format!("n={n}: {draws} draws, {bad} mismatched orders"))
}

/// The pairwise and rank-difference excess forms on random posterior vectors.
pub fn excess_identity(draws: u64, max_n: usize, seed: u64) -> CheckReport {
    let name = "excess_identity";
    let mut worst = 0.0f64;
    for i in 0..draws {
        let mut rng = stream(seed, "excess-identity", i);
        let n = rng.random_range(2..=max_n);
        let sigma = rng.random_range(0.4..1.5);
        let mut patterns: Vec<RankPattern> = (0..1u128 << n).map(RankPattern::from_mask).collect();
        patterns.shuffle(&mut rng);
        let lambda = PosteriorSampler::new(n, sigma, seed).expect("valid").lambda(i);
        let s = PosteriorEvaluator::new(&patterns, n).eval(&lambda);
        let a = excess_pairwise_naive(&s);
        let b = excess_rank_difference(&s);
        let rel = (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
    }
    report(name, worst <= 1e-12, format!("{draws} vectors, worst relative gap {worst:.2e}"))
}

/// Posteriors of all `2ⁿ` patterns sum to one.
pub fn posterior_normalization(n: usize, draws: u64, seed: u64) -> CheckReport {
    let name = "posterior_normalization";
    let all: Vec<RankPattern> = (0..1u128 << n).map(RankPattern::from_mask).collect();
    let eval = PosteriorEvaluator::new(&all, n);
    let mut worst = 0.0f64;
    for i in 0..draws {
        let mut rng = stream(seed, "normalization", i);
        let mut lambda: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..6.0)).collect();
        lambda.sort_by(f64::total_cmp);
        let mut total = CompensatedSum::default();
        for v in eval.eval(&lambda) {
            total.add(v);
        }
        worst = worst.max((total.value() - 1.0).abs());
    }
    report(name, worst <= 1e-9, format!("n={n}: {draws} draws, worst |sum - 1| = {worst:.2e}"))
}

fn brute_force_order(wf: &WeightFunction, n: usize) -> Vec<RankPattern> {
    let mut all: Vec<(f64, RankPattern)> = (0..1u128 << n)
        .map(RankPattern::from_mask)
        .map(|p| (accumulated_weight(&p, wf), p))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| tie_order(a.1.ranks(), b.1.ranks())));
    all.into_iter().map(|(_, p)| p).collect()
}

/// Full-length enumeration against an exhaustive sort for every weight kind.
pub fn enumeration_exhaustive(max_n: usize, seed: u64) -> CheckReport {
    let name = "enumeration_exhaustive";
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 1..=max_n {
        let mut rng = stream(seed, "enumeration", n as u64);
        let cdf = cdf_weight_function(n, 0.8, 10_000, &mut rng).expect("valid");
        let three = three_line_weight_function(n, &fit_three_line(cdf.gamma()).expect("fit")).expect("valid");
        let mut soft: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
        soft.sort_by(f64::total_cmp);
        let soft = WeightFunction::new(WeightKind::Soft, soft).expect("monotone");
        for wf in [WeightFunction::unit(n), WeightFunction::rank(n), cdf.clone(), three, soft] {
            checked += 1;
            let got = enumerate_schedule(&wf, n, 1 << n).expect("full count");
            if got.patterns() != brute_force_order(&wf, n).as_slice() {
                failures.push(format!("n={n} {}", wf.kind().label()));
            }
        }
    }
    report(
        name,
        failures.is_empty(),
        format!("{checked} (n, kind) pairs {}", failures.join(", ")),
    )
}

/// Runs the suite; `quick` shrinks every check to fit a one-minute budget.
pub fn run_suite(quick: bool, seed: u64) -> Vec<CheckReport> {
    let hamming = build_toy_code(ToyCode::Hamming74).expect("builds");
    let random = build_toy_code(ToyCode::RandomLinear { n: 12, k: 6, seed: 1 }).expect("builds");
    let (ml_trials, grid_ns, grid_sigmas, grid_samples, draws) = if quick {
        (1_000, vec![6, 8], vec![1.0], 4_000, 100)
    } else {
        (10_000, vec![6, 8, 10], vec![0.5, 1.0, 2.0], 20_000, 1_000)
    };
    let codes: [Arc<dyn BinaryCode>; 2] = [Arc::new(hamming), Arc::new(random)];
    let mut out: Vec<CheckReport> = codes
        .iter()
        .map(|c| ml_equivalence(c.as_ref(), 0.8, ml_trials, seed))
        .collect();
    out.push(search_cost_grid(&grid_ns, &grid_sigmas, grid_samples, seed));
    out.push(posterior_order(10, draws, seed));
    out.push(excess_identity(draws, 12, seed));
    out.push(posterior_normalization(16, if quick { 10 } else { 100 }, seed));
    out.push(enumeration_exhaustive(if quick { 8 } else { 10 }, seed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        for r in run_suite(true, 1) {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
