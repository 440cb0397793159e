//! Reshuffle models: a base schedule, the permutation sorting it by
//! estimated mean posterior, and how the estimate was made.
//!
//! ```text
//! RSOG v1 n=<n> T1=<c> sigma=<σ> samples=<M> seed=<s>
//! base <schedule file>
//! <pi(1)>
//! <pi(2)>
//! ```
//!
//! `pi(j)` is the 1-based base index queried at step `j`.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::excess::{excess_pairwise, excess_rank_difference, CompensatedSum};
use super::{estimate_mean_posteriors, ExcessEstimate, PosteriorEvaluator, PosteriorSampler, CHUNK};
use crate::error::{Error, Result};
use crate::par::ordered_reduce;
use crate::pattern::{header_value, load_schedule, Schedule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingMeta {
    pub sigma: f64,
    pub mc_samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ReshuffleModel {
    base: Schedule,
    mean_s: Option<Vec<f64>>,
    pi_tilde: Vec<u32>,
    reshuffled: Schedule,
    meta: Option<TrainingMeta>,
}

impl ReshuffleModel {
    /// Builds a model from an explicit 0-based permutation of `base`.
    pub fn from_permutation(base: Schedule, pi_tilde: Vec<u32>, meta: Option<TrainingMeta>) -> Result<Self> {
        let t1 = base.len();
        if pi_tilde.len() != t1 {
            return Err(Error::invalid(format!(
                "permutation has {} entries, base schedule has {t1}",
                pi_tilde.len()
            )));
        }
        let mut seen = vec![false; t1];
        for &p in &pi_tilde {
            let p = p as usize;
            if p >= t1 || seen[p] {
                return Err(Error::invalid(format!("not a permutation of 1..={t1}")));
            }
            seen[p] = true;
        }
        let patterns = pi_tilde.iter().map(|&p| base.patterns()[p as usize].clone()).collect();
        let reshuffled = Schedule::new(base.n(), format!("rs-{}", base.tag()), patterns)?;
        Ok(ReshuffleModel {
            base,
            mean_s: None,
            pi_tilde,
            reshuffled,
            meta,
        })
    }

    pub fn base(&self) -> &Schedule {
        &self.base
    }

    /// The estimates the permutation was sorted by; not kept in model files.
    pub fn mean_s(&self) -> Option<&[f64]> {
        self.mean_s.as_deref()
    }

    /// 0-based: `reshuffled[j] = base[pi_tilde[j]]`.
    pub fn pi_tilde(&self) -> &[u32] {
        &self.pi_tilde
    }

    pub fn reshuffled(&self) -> &Schedule {
        &self.reshuffled
    }

    pub fn meta(&self) -> Option<TrainingMeta> {
        self.meta
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn len(&self) -> usize {
        self.pi_tilde.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi_tilde.is_empty()
    }

    /// The sampler that produced the training set.
    pub fn training_sampler(&self) -> Option<PosteriorSampler> {
        let m = self.meta?;
        PosteriorSampler::new(self.n(), m.sigma, m.seed).ok()
    }
}

/// Stable descending argsort, 0-based.
pub fn descending_order(values: &[f64]) -> Vec<u32> {
    let mut pi: Vec<u32> = (0..values.len() as u32).collect();
    pi.sort_by(|&a, &b| values[b as usize].total_cmp(&values[a as usize]));
    pi
}

/// Stable descending argsort of `mean_s`, applied to `base`. The empty
/// pattern has the largest posterior in every realization, so trained
/// estimates keep it first; estimates that would move it are rejected.
pub fn reshuffle_schedule(base: Schedule, mean_s: Vec<f64>) -> Result<ReshuffleModel> {
    if mean_s.len() != base.len() {
        return Err(Error::invalid(format!(
            "{} estimates for a schedule of {} patterns",
            mean_s.len(),
            base.len()
        )));
    }
    if let Some(bad) = mean_s.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite estimate {bad}")));
    }
    let pi = descending_order(&mean_s);
    let mut model = ReshuffleModel::from_permutation(base, pi, None)?;
    model.mean_s = Some(mean_s);
    Ok(model)
}

/// Estimates mean posteriors for `base` at `sigma` and reshuffles by them.
pub fn train(base: Schedule, sigma: f64, mc_samples: u64, seed: u64) -> Result<ReshuffleModel> {
    let mean_s = estimate_mean_posteriors(&base, sigma, mc_samples, seed)?;
    let mut model = reshuffle_schedule(base, mean_s)?;
    model.meta = Some(TrainingMeta {
        sigma,
        mc_samples,
        seed,
    });
    Ok(model)
}

/// Excess-query estimates of the base and reshuffled orders on the same
/// channel realizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeldoutComparison {
    pub base: ExcessEstimate,
    pub reshuffled: ExcessEstimate,
    /// Mean of the per-sample difference `base − reshuffled` (rank form).
    pub improvement: f64,
    pub improvement_std_err: f64,
}

#[derive(Default)]
struct HeldoutAcc {
    pair_base: CompensatedSum,
    pair_rs: CompensatedSum,
    rank_base: CompensatedSum,
    rank_rs: CompensatedSum,
    sq_base: CompensatedSum,
    sq_rs: CompensatedSum,
    sq_diff: CompensatedSum,
}

impl HeldoutAcc {
    fn merge(&mut self, o: HeldoutAcc) {
        self.pair_base.add(o.pair_base.value());
        self.pair_rs.add(o.pair_rs.value());
        self.rank_base.add(o.rank_base.value());
        self.rank_rs.add(o.rank_rs.value());
        self.sq_base.add(o.sq_base.value());
        self.sq_rs.add(o.sq_rs.value());
        self.sq_diff.add(o.sq_diff.value());
    }
}

fn std_err(sum: f64, sq: f64, m: f64) -> f64 {
    if m < 2.0 {
        return 0.0;
    }
    let mean = sum / m;
    (((sq - m * mean * mean) / (m - 1.0)).max(0.0) / m).sqrt()
}

/// Compares both orders on `samples` fresh realizations drawn with `seed`.
pub fn compare_heldout(model: &ReshuffleModel, sigma: f64, samples: u64, seed: u64) -> Result<HeldoutComparison> {
    if samples == 0 {
        return Err(Error::invalid("held-out evaluation needs at least one sample"));
    }
    let sampler = PosteriorSampler::new(model.n(), sigma, seed)?;
    let eval = PosteriorEvaluator::for_schedule(model.base());
    let acc = ordered_reduce(
        samples,
        CHUNK / 4,
        HeldoutAcc::default,
        |acc, m| {
            let s = eval.eval(&sampler.lambda(m));
            let rs: Vec<f64> = model.pi_tilde.iter().map(|&p| s[p as usize]).collect();
            let (rb, rr) = (excess_rank_difference(&s), excess_rank_difference(&rs));
            acc.pair_base.add(excess_pairwise(&s));
            acc.pair_rs.add(excess_pairwise(&rs));
            acc.rank_base.add(rb);
            acc.rank_rs.add(rr);
            acc.sq_base.add(rb * rb);
            acc.sq_rs.add(rr * rr);
            acc.sq_diff.add((rb - rr) * (rb - rr));
        },
        HeldoutAcc::merge,
    );
    let m = samples as f64;
    let estimate = |pair: &CompensatedSum, rank: &CompensatedSum, sq: &CompensatedSum| ExcessEstimate {
        pairwise: pair.value() / m,
        rank_difference: rank.value() / m,
        std_err: std_err(rank.value(), sq.value(), m),
        samples: samples as usize,
    };
    let base = estimate(&acc.pair_base, &acc.rank_base, &acc.sq_base);
    let reshuffled = estimate(&acc.pair_rs, &acc.rank_rs, &acc.sq_rs);
    let diff_sum = acc.rank_base.value() - acc.rank_rs.value();
    Ok(HeldoutComparison {
        base,
        reshuffled,
        improvement: diff_sum / m,
        improvement_std_err: std_err(diff_sum, acc.sq_diff.value(), m),
    })
}

pub fn write_model<W: Write>(m: &ReshuffleModel, base_ref: &str, out: W) -> std::io::Result<()> {
    if base_ref.is_empty() || base_ref.contains('\n') {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "base reference must be a single nonempty line",
        ));
    }
    let mut out = BufWriter::new(out);
    let (sigma, samples, seed) = match m.meta {
        Some(t) => (t.sigma.to_string(), t.mc_samples.to_string(), t.seed.to_string()),
        None => ("-".into(), "-".into(), "-".into()),
    };
    writeln!(
        out,
        "RSOG v1 n={} T1={} sigma={sigma} samples={samples} seed={seed}",
        m.n(),
        m.len()
    )?;
    writeln!(out, "base {base_ref}")?;
    for &p in &m.pi_tilde {
        writeln!(out, "{}", p + 1)?;
    }
    out.flush()
}

/// Reads a model; `load_base` resolves the `base` line to its schedule.
pub fn read_model<R: BufRead>(
    input: R,
    load_base: impl FnOnce(&str) -> Result<Schedule>,
) -> Result<ReshuffleModel> {
    let mut lines = input.lines();
    let mut next_line = |lineno: usize| -> Result<Option<String>> {
        lines.next().transpose().map_err(|e| Error::parse(lineno, e.to_string()))
    };
    let header = next_line(1)?.ok_or_else(|| Error::MalformedHeader("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 7 || fields[0] != "RSOG" || fields[1] != "v1" {
        return Err(Error::MalformedHeader(header.clone()));
    }
    let bad = |key: &str| Error::MalformedHeader(format!("bad {key} in {header:?}"));
    let n: usize = header_value(&fields, "n")?.parse().map_err(|_| bad("n"))?;
    let t1: usize = header_value(&fields, "T1")?.parse().map_err(|_| bad("T1"))?;
    let (sigma, samples, seed) = (
        header_value(&fields, "sigma")?,
        header_value(&fields, "samples")?,
        header_value(&fields, "seed")?,
    );
    let meta = if [sigma, samples, seed].iter().all(|v| *v == "-") {
        None
    } else {
        Some(TrainingMeta {
            sigma: sigma.parse().map_err(|_| bad("sigma"))?,
            mc_samples: samples.parse().map_err(|_| bad("samples"))?,
            seed: seed.parse().map_err(|_| bad("seed"))?,
        })
    };
    let base_line = next_line(2)?.ok_or_else(|| Error::parse(2, "missing base line"))?;
    let base_ref = base_line
        .strip_prefix("base ")
        .ok_or_else(|| Error::parse(2, "expected `base <schedule>`"))?;
    let mut pi = Vec::with_capacity(t1);
    let mut lineno = 2;
    while let Some(line) = next_line(lineno + 1)? {
        lineno += 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: u64 = line
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad index {line:?}")))?;
        if v == 0 || v as usize > t1 {
            return Err(Error::parse(lineno, format!("index {v} outside 1..={t1}")));
        }
        pi.push((v - 1) as u32);
    }
    if pi.len() != t1 {
        return Err(Error::parse(lineno, format!("expected {t1} indices, found {}", pi.len())));
    }
    let base = load_base(base_ref)?;
    if base.n() != n || base.len() != t1 {
        return Err(Error::invalid(format!(
            "base schedule has n={} and {} patterns, model expects n={n} and {t1}",
            base.n(),
            base.len()
        )));
    }
    ReshuffleModel::from_permutation(base, pi, meta)
}

pub fn save_model(m: &ReshuffleModel, base_ref: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_model(m, base_ref, f).map_err(|e| Error::io(path, e))
}

/// Loads a model. A relative base reference is looked up next to the model
/// file first, then relative to the working directory.
pub fn load_model(path: impl AsRef<Path>) -> Result<ReshuffleModel> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_model(BufReader::new(f), |r| {
        let r = Path::new(r);
        let beside = path.parent().map(|d| d.join(r));
        match beside {
            Some(p) if r.is_relative() && p.exists() => load_schedule(p),
            _ => load_schedule(r),
        }
    })
}
