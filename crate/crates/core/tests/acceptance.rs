// Acceptance suite: one line per criterion, nonzero exit on any failure.
//
// `ACCEPTANCE_ONLY=3,5` restricts the run to the listed criteria.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;

use grandlab::bits::BitWord;
use grandlab::channel::{modulate_bpsk, transmit, ChannelParams};
use grandlab::codebook::{build_toy_code, BinaryCode, LinearCode, ToyCode};
use grandlab::grand::{sgrand_policy, GrandDecoder, OrderingPolicy};
use grandlab::oracle::{genie_search_trials, SearchPolicy};
use grandlab::pattern::{
    cdf_weight_function, enumerate_schedule, fit_three_line, three_line_weight_function, RankPattern, Schedule,
    WeightFunction, WeightKind,
};
use grandlab::reshuffle::{
    compare_heldout, excess_pairwise, excess_rank_difference, posterior_s, rmatrix_from_sampler, ReshuffleModel,
};
use grandlab::rng::stream;
use grandlab::sim::{DecoderKind, SimConfig, SimRecord, Simulation};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

// ---------------------------------------------------------------- oracles

/// Neumaier summation, kept separate from the library's.
#[derive(Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// `log P(flip set)` for reliabilities `lam` (indexed by whatever the mask indexes).
fn log_posterior(lam: &[f64], mask: u128) -> f64 {
    lam.iter()
        .enumerate()
        .map(|(i, &l)| {
            // P(flip) = 1 / (1 + e^l), P(keep) = 1 / (1 + e^-l)
            let flip = mask >> i & 1 == 1;
            let x = if flip { l } else { -l };
            -(x.max(0.0) + (-x.abs()).exp().ln_1p())
        })
        .sum()
}

fn ranks_of(mask: u128) -> Vec<u8> {
    (0..128u8).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

fn tie_rule(a: &[u8], b: &[u8]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn ml_bruteforce(y: &[f64], codewords: &[BitWord]) -> BitWord {
    let corr = |c: &BitWord| -> f64 { y.iter().enumerate().map(|(i, &v)| if c.get(i) { -v } else { v }).sum() };
    *codewords
        .iter()
        .max_by(|a, b| corr(a).total_cmp(&corr(b)))
        .expect("nonempty code")
}

fn random_lambda<R: Rng>(n: usize, sigma: f64, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let y = 1.0 + sigma * rng.sample::<f64, _>(StandardNormal);
            (2.0 * y / (sigma * sigma)).abs()
        })
        .collect()
}

// ---------------------------------------------------------------- criteria

const TABLE_4DB: [(DecoderKind, f64); 4] = [
    (DecoderKind::Orbgrand, 790.8),
    (DecoderKind::Cdf, 727.9),
    (DecoderKind::Rs, 715.6),
    (DecoderKind::Sgrand, 666.5),
];
const TABLE_5DB: [(DecoderKind, f64); 4] = [
    (DecoderKind::Orbgrand, 83.89),
    (DecoderKind::Cdf, 67.44),
    (DecoderKind::Rs, 60.63),
    (DecoderKind::Sgrand, 52.99),
];
const TABLE_TRIALS: u64 = 100_000;

fn bch_sim(convention: &str, decoders: &str, snrs: &str, trials: u64, min_errors: u64) -> Simulation {
    let text = format!(
        "code = bch127\ndecoders = {decoders}\nsnr_db = {snrs}\nconvention = {convention}\n\
         truncation = 10000\nt1 = 50000\nmax_trials = {trials}\nmin_block_errors = {min_errors}\n\
         cdf_samples = 100000\nrs_samples = 100000\nseed = 1\ndesign_snr_db = matched\n"
    );
    Simulation::new(SimConfig::parse(&text).expect("config parses")).expect("simulation builds")
}

fn disjoint(a: &SimRecord, b: &SimRecord) -> bool {
    let ha = 1.96 * a.queries_std_err;
    let hb = 1.96 * b.queries_std_err;
    a.avg_queries + ha < b.avg_queries - hb
}

struct Shared {
    rs_model_5db: Option<(ReshuffleModel, f64)>,
    convention: &'static str,
}

fn ac1_table(shared: &mut Shared) -> Outcome {
    let orb = |convention: &str| {
        let mut sim = bch_sim(convention, "orbgrand", "5", 20_000, u64::MAX);
        sim.run_point(DecoderKind::Orbgrand, 5.0).expect("runs").avg_queries
    };
    let (eb, es) = (orb("ebn0"), orb("per_symbol"));
    let target = TABLE_5DB[0].1;
    let convention = if (eb - target).abs() <= (es - target).abs() { "ebn0" } else { "per_symbol" };

    let mut sim = bch_sim(convention, "orbgrand,cdf,3line,rs,sgrand", "4,5", TABLE_TRIALS, u64::MAX);
    let model5 = sim.train_rs(5.0).expect("rs trains");
    shared.convention = convention;
    shared.rs_model_5db = Some((model5, sim.design_sigma_at(5.0).expect("sigma")));
    let table = sim.run_table().expect("table runs");

    let mut lines = vec![format!("convention {convention} (orbgrand@5dB: ebn0 {eb:.1}, per-symbol {es:.1})")];
    let mut all_within = true;
    for (snr, rows) in [(4.0, &TABLE_4DB), (5.0, &TABLE_5DB)] {
        for &(kind, paper) in rows.iter() {
            let r = table.get(kind, snr).expect("cell present");
            let rel = r.avg_queries / paper - 1.0;
            all_within &= rel.abs() <= 0.10;
            lines.push(format!(
                "{}@{snr}: {:.1}±{:.1} vs {paper} ({:+.1}%)",
                kind.label(),
                r.avg_queries,
                1.96 * r.queries_std_err,
                100.0 * rel
            ));
        }
        let tl = table.get(DecoderKind::ThreeLine, snr).expect("cell present");
        lines.push(format!("3line@{snr}: {:.1}", tl.avg_queries));
    }

    // fallback: ordering outside CIs and ratios
    let mut fallback = true;
    for (snr, rows) in [(4.0, &TABLE_4DB), (5.0, &TABLE_5DB)] {
        let get = |k| table.get(k, snr).expect("cell present");
        let (sg, rs, cdf, tl, orb) = (
            get(DecoderKind::Sgrand),
            get(DecoderKind::Rs),
            get(DecoderKind::Cdf),
            get(DecoderKind::ThreeLine),
            get(DecoderKind::Orbgrand),
        );
        fallback &= disjoint(sg, rs) && disjoint(rs, cdf) && disjoint(rs, tl) && disjoint(cdf, orb) && disjoint(tl, orb);
        let paper_orb = rows[0].1;
        for (rec, paper) in [(rs, rows[2].1), (sg, rows[3].1)] {
            let ratio = rec.avg_queries / orb.avg_queries;
            fallback &= (ratio / (paper / paper_orb) - 1.0).abs() <= 0.10;
        }
    }
    let passed = all_within || fallback;
    lines.push(format!("all within 10%: {all_within}; ordering/ratio fallback: {fallback}"));
    outcome(passed, lines.join("; "))
}

fn ac2_bler(shared: &Shared) -> Outcome {
    let (model, _) = shared.rs_model_5db.as_ref().expect("AC1 trains the 5 dB model");
    let mut sim = bch_sim(shared.convention, "orbgrand,rs", "5,5.5,6", 5_000_000, 300);
    sim.set_schedule(DecoderKind::Rs, Arc::new(model.reshuffled().clone())).expect("schedule fits");
    let mut every = true;
    let mut separated = 0;
    let mut in_range = 0;
    let mut lines = Vec::new();
    for snr in [5.0, 5.5, 6.0] {
        let orb = sim.run_point(DecoderKind::Orbgrand, snr).expect("runs");
        let rs = sim.run_point(DecoderKind::Rs, snr).expect("runs");
        let range = |r: &SimRecord| (1e-4..=1e-2).contains(&r.bler) && r.block_errors >= 100;
        if !(range(&orb) && range(&rs)) {
            lines.push(format!("{snr} dB skipped: bler {:.2e}/{:.2e}", orb.bler, rs.bler));
            continue;
        }
        in_range += 1;
        every &= rs.bler <= orb.bler;
        let (lo_orb, _) = orb.bler_interval();
        let (_, hi_rs) = rs.bler_interval();
        separated += (hi_rs < lo_orb) as usize;
        lines.push(format!(
            "{snr} dB: orbgrand {:.3e}±{:.1e} ({} err) rs {:.3e}±{:.1e} ({} err)",
            orb.bler, orb.ci95_bler, orb.block_errors, rs.bler, rs.ci95_bler, rs.block_errors
        ));
    }
    outcome(
        in_range > 0 && every && separated >= 1,
        format!("{}; {in_range} points in range, {separated} with disjoint CIs", lines.join("; ")),
    )
}

fn ml_agreement(code: &LinearCode, trials: u64, seed: u64) -> (u64, u64) {
    let codewords = code.codewords().expect("small code");
    let decoder = GrandDecoder::new(code);
    let policy = OrderingPolicy::sgrand(1 << code.n()).expect("valid");
    let mut agree = 0;
    let mut ml_errors = 0;
    for i in 0..trials {
        let mut rng = stream(seed, "ac3", i);
        let sigma = [0.5, 0.8, 1.2][i as usize % 3];
        let params = ChannelParams::from_sigma(sigma).expect("positive");
        let c = code.random_codeword(&mut rng);
        let y = transmit(&modulate_bpsk(&c), &params, &mut rng);
        let ml = ml_bruteforce(&y, &codewords);
        let got = decoder.decode(&y, sigma, &policy).expect("decodes").codeword;
        agree += (got == Some(ml)) as u64;
        ml_errors += (ml != c) as u64;
    }
    (agree, ml_errors)
}

fn ac3_ml() -> Outcome {
    let hamming = build_toy_code(ToyCode::Hamming74).expect("builds");
    let random = build_toy_code(ToyCode::RandomLinear { n: 12, k: 6, seed: 1 }).expect("builds");
    let mut ok = true;
    let mut lines = Vec::new();
    for code in [&hamming, &random] {
        let (agree, errs) = ml_agreement(code, 10_000, 3);
        ok &= agree == 10_000;
        lines.push(format!("{}: {agree}/10000 agree ({errs} ML errors)", code.name()));
    }
    outcome(ok, lines.join("; "))
}

/// Query-count formula `Σ_t t·s_t`, evaluated directly from per-pattern
/// posteriors for each sampled channel.
fn q_formula_local(order: Option<&[u128]>, n: usize, sigma: f64, samples: u64, seed: u64) -> (f64, f64) {
    let all: Vec<u128> = (0..1u128 << n).collect();
    let mut qs = Vec::with_capacity(samples as usize);
    for m in 0..samples {
        let mut rng = stream(seed, "ac4-formula", m);
        let mut lam = random_lambda(n, sigma, &mut rng);
        lam.sort_by(f64::total_cmp);
        let list: Vec<u128> = match order {
            Some(o) => o.to_vec(),
            None => {
                let mut by_sum = all.clone();
                let w = |mask: u128| -> f64 { (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| lam[i]).sum() };
                by_sum.sort_by(|&a, &b| w(a).total_cmp(&w(b)).then_with(|| tie_rule(&ranks_of(a), &ranks_of(b))));
                by_sum
            }
        };
        let mut q = Kahan::default();
        for (t, &mask) in list.iter().enumerate() {
            q.add((t + 1) as f64 * log_posterior(&lam, mask).exp());
        }
        qs.push(q.value());
    }
    mean_se(&qs)
}

fn ac4_theorem() -> Outcome {
    let mut cells = 0;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for n in [4usize, 6, 8] {
        let unit = enumerate_schedule(&WeightFunction::unit(n), n, 1 << n).expect("full");
        let rank = enumerate_schedule(&WeightFunction::rank(n), n, 1 << n).expect("full");
        let masks = |s: &Schedule| -> Vec<u128> { s.patterns().iter().map(|p| p.mask()).collect() };
        let (unit_m, rank_m) = (masks(&unit), masks(&rank));
        for sigma in [0.5, 1.0, 2.0] {
            for (label, policy, order) in [
                ("unit", SearchPolicy::Schedule(&unit), Some(unit_m.as_slice())),
                ("rank", SearchPolicy::Schedule(&rank), Some(rank_m.as_slice())),
                ("sgrand", SearchPolicy::Sgrand, None),
            ] {
                cells += 1;
                let g = genie_search_trials(policy, sigma, n, 20_000, 4).expect("valid cell");
                let (qm, qse) = q_formula_local(order, n, sigma, 20_000, 5);
                let z = (g.mean - qm).abs() / (g.std_err.powi(2) + qse.powi(2)).sqrt();
                worst = worst.max(z);
                if z > 3.0 {
                    failures.push(format!("n={n} sigma={sigma} {label}: genie {:.3} formula {qm:.3} ({z:.2} SE)", g.mean));
                }
            }
        }
    }
    outcome(
        failures.is_empty() && cells == 27,
        format!("{cells} cells, worst {worst:.2} SE{}{}", if failures.is_empty() { "" } else { "; " }, failures.join("; ")),
    )
}

fn ac5_prop1() -> Outcome {
    let n = 10;
    let mut mismatched = 0;
    for d in 0..1000u64 {
        let mut rng = stream(6, "ac5", d);
        let sigma = rng.random_range(0.3..2.0);
        let llr: Vec<f64> = (0..n)
            .map(|_| {
                let y = 1.0 + sigma * rng.sample::<f64, _>(StandardNormal);
                2.0 * y / (sigma * sigma)
            })
            .collect();
        let lam: Vec<f64> = llr.iter().map(|l| l.abs()).collect();
        let mut by_posterior: Vec<u128> = (0..1u128 << n).collect();
        by_posterior.sort_by(|&a, &b| {
            log_posterior(&lam, b)
                .total_cmp(&log_posterior(&lam, a))
                .then_with(|| tie_rule(&ranks_of(a), &ranks_of(b)))
        });
        let stream_order: Vec<u128> = sgrand_policy(&llr).map(|e| e.as_u128()).collect();
        mismatched += (stream_order != by_posterior) as u32;
    }
    outcome(mismatched == 0, format!("n={n}: 1000 draws, {mismatched} orders differ"))
}

fn ac6_prop2() -> Outcome {
    let mut worst = 0.0f64;
    for d in 0..1000u64 {
        let mut rng = stream(7, "ac6", d);
        let n = rng.random_range(2..=12usize);
        let t = 1usize << n;
        let s: Vec<f64> = if d % 2 == 0 {
            let sigma = rng.random_range(0.4..1.5);
            let mut lam = random_lambda(n, sigma, &mut rng);
            lam.sort_by(f64::total_cmp);
            let mut masks: Vec<u128> = (0..t as u128).collect();
            // a plausible but imperfect order: by popcount, then index
            masks.sort_by_key(|m| (m.count_ones(), *m));
            masks.iter().map(|&m| log_posterior(&lam, m).exp()).collect()
        } else {
            (0..t).map(|_| rng.random::<f64>()).collect()
        };
        let mut naive = Kahan::default();
        for j in 0..t {
            for i in 0..j {
                naive.add((s[j] - s[i]).max(0.0));
            }
        }
        let naive = naive.value();
        for v in [excess_pairwise(&s), excess_rank_difference(&s)] {
            let rel = (v - naive).abs() / naive.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
        }
    }
    outcome(worst <= 1e-12, format!("1000 vectors, worst relative gap {worst:.2e}"))
}

fn ac7_direction(shared: &Shared) -> Outcome {
    let (model, sigma) = shared.rs_model_5db.as_ref().expect("AC1 trains the 5 dB model");
    let meta = model.meta().expect("trained model");
    let cmp = compare_heldout(model, *sigma, 2_000, meta.seed ^ 0x5eed).expect("evaluates");
    outcome(
        cmp.reshuffled.rank_difference <= cmp.base.rank_difference,
        format!(
            "T1={} held-out dQ: base {:.3} reshuffled {:.3} (improvement {:.3} ± {:.3})",
            model.len(),
            cmp.base.rank_difference,
            cmp.reshuffled.rank_difference,
            cmp.improvement,
            cmp.improvement_std_err
        ),
    )
}

fn ac8_rmatrix(shared: &Shared) -> Outcome {
    let (model, _) = shared.rs_model_5db.as_ref().expect("AC1 trains the 5 dB model");
    let sampler = model.training_sampler().expect("trained model");
    let samples = model.meta().expect("trained model").mc_samples;
    let k = 200;
    let after = rmatrix_from_sampler(&model.reshuffled().patterns()[..k], &sampler, samples).expect("builds");
    let before = rmatrix_from_sampler(&model.base().patterns()[..k], &sampler, samples).expect("builds");
    let max = after.max_lower_normalized();
    outcome(
        max <= 0.5 + 1e-9,
        format!("{samples} training samples, max lower entry {max:.12} (base {:.3})", before.max_lower_normalized()),
    )
}

fn brute_force_schedule(gamma: &[f64], n: usize) -> Vec<Vec<u8>> {
    let mut all: Vec<(f64, Vec<u8>)> = (0..1u128 << n)
        .map(|m| {
            let r = ranks_of(m);
            (r.iter().fold(0.0, |s, &x| s + gamma[x as usize - 1]), r)
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| tie_rule(&a.1, &b.1)));
    all.into_iter().map(|(_, r)| r).collect()
}

fn ac9_enumeration() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in 1..=10usize {
        let mut rng = stream(9, "ac9", n as u64);
        let cdf = cdf_weight_function(n, 0.8, 10_000, &mut rng).expect("valid");
        let three = three_line_weight_function(n, &fit_three_line(cdf.gamma()).expect("fit")).expect("valid");
        let mut soft: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
        soft.sort_by(f64::total_cmp);
        let soft = WeightFunction::new(WeightKind::Soft, soft).expect("monotone");
        for wf in [WeightFunction::unit(n), WeightFunction::rank(n), cdf, three, soft] {
            checked += 1;
            let got: Vec<Vec<u8>> = enumerate_schedule(&wf, n, 1 << n)
                .expect("full count")
                .patterns()
                .iter()
                .map(|p| p.ranks().to_vec())
                .collect();
            if got != brute_force_schedule(wf.gamma(), n) {
                failures.push(format!("n={n} {}", wf.kind().label()));
            }
        }
    }
    outcome(failures.is_empty(), format!("{checked} (n, kind) pairs exact {}", failures.join(", ")))
}

fn ac10_normalization() -> Outcome {
    let n = 16;
    let mut worst = 0.0f64;
    let mut worst_pointwise = 0.0f64;
    for d in 0..100u64 {
        let mut rng = stream(10, "ac10", d);
        let sigma = rng.random_range(0.4..1.5);
        let mut lam = random_lambda(n, sigma, &mut rng);
        lam.sort_by(f64::total_cmp);
        let mut total = Kahan::default();
        for m in 0..1u128 << n {
            let s = posterior_s(&lam, &RankPattern::from_mask(m));
            if m % 257 == 0 {
                let direct = log_posterior(&lam, m).exp();
                worst_pointwise = worst_pointwise.max((s - direct).abs() / direct);
            }
            total.add(s);
        }
        worst = worst.max((total.value() - 1.0).abs());
    }
    outcome(
        worst <= 1e-9 && worst_pointwise <= 1e-10,
        format!("n={n}: 100 draws, worst |sum - 1| = {worst:.2e}, worst pointwise gap {worst_pointwise:.2e}"),
    )
}

fn main() {
    let only: Option<BTreeSet<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let wanted = |i: u32| only.as_ref().is_none_or(|s| s.contains(&i));
    let needs_model = [1, 2, 7, 8].iter().any(|&i| wanted(i));

    let mut shared = Shared { rs_model_5db: None, convention: "ebn0" };
    let mut failed = 0;
    let mut report = |id: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        if !wanted(id) {
            return;
        }
        let start = Instant::now();
        let o = f();
        println!(
            "[{}] AC-{id} {name}: {} ({:.1}s)",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += (!o.passed) as u32;
    };

    report(3, "ML equivalence", &mut ac3_ml);
    report(4, "two-estimator agreement", &mut ac4_theorem);
    report(5, "posterior order = subset-sum order", &mut ac5_prop1);
    report(6, "pairwise = rank-difference excess", &mut ac6_prop2);
    report(9, "exhaustive enumeration", &mut ac9_enumeration);
    report(10, "posterior normalization", &mut ac10_normalization);
    if needs_model {
        // AC-1 trains the 5 dB reshuffle reused by AC-2, AC-7 and AC-8
        let start = Instant::now();
        let mut ac1 = Some(ac1_table(&mut shared));
        let took = start.elapsed().as_secs_f64();
        report(1, "average-query table", &mut || {
            let o = ac1.take().expect("runs once");
            outcome(o.passed, format!("{} [{took:.0}s]", o.detail))
        });
        report(2, "BLER: reshuffled vs ORBGRAND", &mut || ac2_bler(&shared));
        report(7, "held-out excess direction", &mut || ac7_direction(&shared));
        report(8, "reshuffled R lower triangle", &mut || ac8_rmatrix(&shared));
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
