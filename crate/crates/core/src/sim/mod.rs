//! Monte Carlo block-error and query-count benchmarks.
//!
//! Trial `i` at a given SNR draws its codeword and noise from a stream keyed
//! by the seed, the SNR and `i` alone, so every decoder sees the same channel
//! outputs and results do not depend on the number of workers.

mod config;
mod report;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{modulate_bpsk, sigma_from_snr, transmit, ChannelParams};
use crate::codebook::{AnyCode, BinaryCode};
use crate::error::{Error, Result};
use crate::grand::{GrandDecoder, OrderingPolicy, Outcome};
use crate::pattern::{
    cdf_weight_function, enumerate_schedule, fit_three_line, load_schedule, three_line_weight_function, Schedule,
    WeightFunction,
};
use crate::reshuffle::{load_model, train, ReshuffleModel};
use crate::rng::{derive_seed, stream};

pub use config::{CodeSpec, DecoderKind, DesignSnr, SimConfig, SimMode};
pub use report::{
    blob_hash, read_sweep_csv, write_manifest, write_records_csv, write_sweep_csv, write_table_csv, QueryTable,
};

/// Trials decoded between stopping-rule checks.
const BATCH: u64 = 512;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRecord {
    pub decoder: String,
    pub snr_db: f64,
    pub sigma: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub found_wrong: u64,
    pub abandoned: u64,
    pub bler: f64,
    pub avg_queries: f64,
    pub queries_std_err: f64,
    pub abandon_rate: f64,
    pub wall_seconds: f64,
    /// Half-width of the normal-approximation 95% interval on `bler`.
    pub ci95_bler: f64,
}

impl SimRecord {
    pub fn bler_interval(&self) -> (f64, f64) {
        (self.bler - self.ci95_bler, self.bler + self.ci95_bler)
    }
}

/// Stopping rule and error accounting for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointLimits {
    pub max_trials: u64,
    pub min_block_errors: u64,
    pub mode: SimMode,
}

#[derive(Debug, Clone, Copy)]
struct Trial {
    wrong: bool,
    abandoned: bool,
    queries: u64,
}

/// Seed of the channel streams at one SNR.
pub fn point_seed(seed: u64, snr_db: f64) -> u64 {
    derive_seed(seed, &format!("snr:{:016x}", snr_db.to_bits()))
}

/// Channel output of trial `i`: the transmitted codeword and `y`.
pub fn trial_channel(code: &dyn BinaryCode, params: &ChannelParams, point_seed: u64, i: u64) -> (crate::BitWord, Vec<f64>) {
    let mut rng = stream(point_seed, "trial", i);
    let w = code.random_codeword(&mut rng);
    let y = transmit(&modulate_bpsk(&w), params, &mut rng);
    (w, y)
}

/// Runs trials until `min_block_errors` errors or `max_trials` trials.
pub fn run_point(
    code: &dyn BinaryCode,
    policy: &OrderingPolicy,
    params: &ChannelParams,
    limits: PointLimits,
    seed: u64,
    decoder_label: &str,
) -> Result<SimRecord> {
    let start = Instant::now();
    let decoder = GrandDecoder::new(code);
    let pseed = point_seed(seed, params.snr_db);
    let is_error = |t: &Trial| match limits.mode {
        SimMode::Standard => t.wrong || t.abandoned,
        SimMode::MlLowerBound => t.wrong,
    };
    let (mut trials, mut errors, mut wrong, mut abandoned) = (0u64, 0u64, 0u64, 0u64);
    let (mut q_sum, mut q_sq) = (0f64, 0f64);
    'outer: while trials < limits.max_trials {
        let end = (trials + BATCH).min(limits.max_trials);
        let batch: Vec<Trial> = (trials..end)
            .into_par_iter()
            .map(|i| {
                let (w, y) = trial_channel(code, params, pseed, i);
                let r = decoder.decode(&y, params.sigma, policy)?;
                Ok(Trial {
                    wrong: r.outcome == Outcome::Found && r.codeword != Some(w),
                    abandoned: r.outcome == Outcome::Abandoned,
                    queries: r.queries_used,
                })
            })
            .collect::<Result<_>>()?;
        for t in batch {
            trials += 1;
            wrong += t.wrong as u64;
            abandoned += t.abandoned as u64;
            errors += is_error(&t) as u64;
            let q = t.queries as f64;
            q_sum += q;
            q_sq += q * q;
            if errors >= limits.min_block_errors {
                break 'outer;
            }
        }
    }
    let n = trials as f64;
    let bler = errors as f64 / n;
    let avg = q_sum / n;
    let var = if trials > 1 { ((q_sq - n * avg * avg) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(SimRecord {
        decoder: decoder_label.to_string(),
        snr_db: params.snr_db,
        sigma: params.sigma,
        trials,
        block_errors: errors,
        found_wrong: wrong,
        abandoned,
        bler,
        avg_queries: avg,
        queries_std_err: (var / n).sqrt(),
        abandon_rate: abandoned as f64 / n,
        wall_seconds: start.elapsed().as_secs_f64(),
        ci95_bler: 1.96 * (bler * (1.0 - bler) / n).sqrt(),
    })
}

fn capped(n: usize, len: usize) -> usize {
    if n < 63 { len.min(1usize << n) } else { len }
}

/// A configured experiment: the code plus lazily built decoding policies.
pub struct Simulation {
    config: SimConfig,
    code: AnyCode,
    pool: Option<rayon::ThreadPool>,
    overrides: HashMap<DecoderKind, Arc<Schedule>>,
    cache: HashMap<(DecoderKind, u64), Arc<Schedule>>,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let code = config.code.build(config.polar_design_snr_db)?;
        let pool = if config.workers > 0 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(config.workers)
                    .build()
                    .map_err(|e| Error::invalid(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        let mut sim = Simulation {
            config,
            code,
            pool,
            overrides: HashMap::new(),
            cache: HashMap::new(),
        };
        for (kind, path) in sim.config.schedules.clone() {
            sim.set_schedule(kind, Arc::new(load_schedule(&path)?))?;
        }
        if let Some(path) = sim.config.model.clone() {
            sim.set_schedule(DecoderKind::Rs, Arc::new(load_model(&path)?.reshuffled().clone()))?;
        }
        Ok(sim)
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn code(&self) -> &AnyCode {
        &self.code
    }

    /// Uses `schedule` for `kind` at every SNR instead of building one.
    pub fn set_schedule(&mut self, kind: DecoderKind, schedule: Arc<Schedule>) -> Result<()> {
        if kind == DecoderKind::Sgrand {
            return Err(Error::invalid("SGRAND has no static schedule"));
        }
        if schedule.n() != self.code.n() {
            return Err(Error::invalid(format!(
                "schedule for n={} given to a code of length {}",
                schedule.n(),
                self.code.n()
            )));
        }
        self.overrides.insert(kind, schedule);
        Ok(())
    }

    pub fn params(&self, snr_db: f64) -> Result<ChannelParams> {
        ChannelParams::new(snr_db, self.code.rate(), self.config.convention)
    }

    fn design_sigma(&self, snr_db: f64) -> Result<f64> {
        let design = match self.config.design_snr {
            DesignSnr::Fixed(v) => v,
            DesignSnr::Matched => snr_db,
        };
        sigma_from_snr(design, self.code.rate(), self.config.convention)
    }

    fn cdf_weights(&self, sigma: f64) -> Result<WeightFunction> {
        let mut rng = stream(self.config.seed, "cdf-weights", sigma.to_bits());
        cdf_weight_function(self.code.n(), sigma, self.config.cdf_samples, &mut rng)
    }

    /// The static schedule `kind` uses at `snr_db`, built on first use.
    pub fn schedule(&mut self, kind: DecoderKind, snr_db: f64) -> Result<Arc<Schedule>> {
        if let Some(s) = self.overrides.get(&kind) {
            return Ok(s.clone());
        }
        let sigma = self.design_sigma(snr_db)?;
        let key = (kind, sigma.to_bits());
        if let Some(s) = self.cache.get(&key) {
            return Ok(s.clone());
        }
        let n = self.code.n();
        let len = capped(n, self.config.truncation);
        let s = match kind {
            DecoderKind::Sgrand => return Err(Error::invalid("SGRAND has no static schedule")),
            DecoderKind::Unit => enumerate_schedule(&WeightFunction::unit(n), n, len)?,
            DecoderKind::Orbgrand => enumerate_schedule(&WeightFunction::rank(n), n, len)?,
            DecoderKind::Cdf => enumerate_schedule(&self.cdf_weights(sigma)?, n, len)?,
            DecoderKind::ThreeLine => {
                let cdf = self.cdf_weights(sigma)?;
                let wf = three_line_weight_function(n, &fit_three_line(cdf.gamma())?)?;
                enumerate_schedule(&wf, n, len)?
            }
            DecoderKind::Rs => return Ok(Arc::new(self.train_rs(snr_db)?.reshuffled().clone())),
        };
        let s = Arc::new(s);
        self.cache.insert(key, s.clone());
        Ok(s)
    }

    /// Trains the reshuffle used at `snr_db`: CDF base of length `T1`,
    /// posteriors estimated at the design noise level. The reshuffled
    /// schedule is cached for every SNR sharing that design point.
    pub fn train_rs(&mut self, snr_db: f64) -> Result<ReshuffleModel> {
        let n = self.code.n();
        let sigma = self.design_sigma(snr_db)?;
        let t1 = capped(n, self.config.t1.max(self.config.truncation));
        let base = enumerate_schedule(&self.cdf_weights(sigma)?, n, t1)?;
        let seed = derive_seed(self.config.seed, "rs-train");
        let samples = self.config.rs_samples;
        let model = self.install(|| train(base, sigma, samples, seed))?;
        self.cache
            .insert((DecoderKind::Rs, sigma.to_bits()), Arc::new(model.reshuffled().clone()));
        Ok(model)
    }

    /// Noise level the data-driven schedules for `snr_db` are designed at.
    pub fn design_sigma_at(&self, snr_db: f64) -> Result<f64> {
        self.design_sigma(snr_db)
    }

    pub fn policy(&mut self, kind: DecoderKind, snr_db: f64) -> Result<OrderingPolicy> {
        let t = self.config.truncation;
        if kind == DecoderKind::Sgrand {
            return OrderingPolicy::sgrand(t);
        }
        let s = self.schedule(kind, snr_db)?;
        let len = s.len();
        OrderingPolicy::static_schedule(s, t.min(len))
    }

    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match &self.pool {
            Some(p) => p.install(f),
            None => f(),
        }
    }

    pub fn limits(&self) -> PointLimits {
        PointLimits {
            max_trials: self.config.max_trials,
            min_block_errors: self.config.min_block_errors,
            mode: self.config.mode,
        }
    }

    pub fn run_point(&mut self, kind: DecoderKind, snr_db: f64) -> Result<SimRecord> {
        let policy = self.policy(kind, snr_db)?;
        let params = self.params(snr_db)?;
        let limits = self.limits();
        let seed = self.config.seed;
        let code = &self.code;
        self.install(|| run_point(code, &policy, &params, limits, seed, kind.label()))
    }

    /// Every configured decoder at every configured SNR, decoder-major.
    pub fn run_sweep(&mut self) -> Result<Vec<SimRecord>> {
        let mut out = Vec::new();
        for kind in self.config.decoders.clone() {
            for snr in self.config.snr_db.clone() {
                out.push(self.run_point(kind, snr)?);
            }
        }
        Ok(out)
    }

    /// Average-query grid, rows in table order.
    pub fn run_table(&mut self) -> Result<QueryTable> {
        let mut kinds = self.config.decoders.clone();
        kinds.sort();
        kinds.dedup();
        let snrs = self.config.snr_db.clone();
        let mut rows = Vec::new();
        for kind in kinds {
            let mut recs = Vec::new();
            for &snr in &snrs {
                recs.push(self.run_point(kind, snr)?);
            }
            rows.push((kind, recs));
        }
        Ok(QueryTable { snr_db: snrs, rows })
    }

    /// SGRAND with `T = 10⁵`, counting only wrong codewords as errors.
    pub fn run_ml_lower_bound(&mut self) -> Result<Vec<SimRecord>> {
        if self.config.mode != SimMode::MlLowerBound {
            return Err(Error::invalid("config is not in ml_lower_bound mode"));
        }
        self.run_sweep()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::hard_decision;
    use crate::codebook::{build_toy_code, ToyCode};
    use crate::oracle::ml_decode_bruteforce;

    fn cfg(text: &str) -> SimConfig {
        SimConfig::parse(text).unwrap()
    }

    #[test]
    fn noiseless_point() {
        let mut sim = Simulation::new(cfg("code = bch127\nsnr_db = 40\nmax_trials = 1000\nconvention = per_symbol")).unwrap();
        let r = sim.run_point(DecoderKind::Orbgrand, 40.0).unwrap();
        assert_eq!(r.trials, 1000);
        assert_eq!(r.bler, 0.0);
        assert_eq!(r.avg_queries, 1.0);
    }

    #[test]
    fn truncation_one_is_hard_decision_error_rate() {
        let c = cfg("code = hamming74\nsnr_db = 3\nT = 1\nmax_trials = 4000\nmin_block_errors = 1000000\nconvention = per_symbol");
        let mut sim = Simulation::new(c).unwrap();
        let r = sim.run_point(DecoderKind::Orbgrand, 3.0).unwrap();
        // direct oracle on the same channel draws: error iff θ(y) is not the codeword
        let params = sim.params(3.0).unwrap();
        let pseed = point_seed(1, 3.0);
        let code = sim.code().clone();
        let mut errs = 0;
        for i in 0..4000 {
            let (w, y) = trial_channel(&code, &params, pseed, i);
            let hd = hard_decision(&y);
            if hd != w {
                errs += 1;
            }
        }
        // a non-codeword hard decision is abandoned; a wrong codeword is a wrong decode
        assert_eq!(r.block_errors, errs);
    }

    #[test]
    fn accounting_identity_and_stopping() {
        let c = cfg("code = bch127\nsnr_db = 3\nT = 300\nmin_block_errors = 50\nmax_trials = 100000\nconvention = per_symbol");
        let mut sim = Simulation::new(c).unwrap();
        let r = sim.run_point(DecoderKind::Orbgrand, 3.0).unwrap();
        assert_eq!(r.block_errors, 50);
        assert_eq!(r.block_errors, r.found_wrong + r.abandoned);
        assert!(r.avg_queries >= 1.0 && r.avg_queries <= 300.0);
        assert!((r.bler - 50.0 / r.trials as f64).abs() < 1e-15);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let run = |workers: usize| {
            let c = cfg(&format!(
                "code = bch127\nsnr_db = 4\nT = 500\nmin_block_errors = 30\nworkers = {workers}\nconvention = per_symbol"
            ));
            let mut r = Simulation::new(c).unwrap().run_point(DecoderKind::Orbgrand, 4.0).unwrap();
            r.wall_seconds = 0.0;
            r
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn lower_bound_matches_exact_ml_on_hamming() {
        let c = cfg("code = hamming74\ndecoders = sgrand\nmode = ml_lower_bound\nT = 100000\nsnr_db = 2\nmax_trials = 3000\nmin_block_errors = 100000\nconvention = per_symbol");
        let mut sim = Simulation::new(c).unwrap();
        let rec = sim.run_ml_lower_bound().unwrap().remove(0);
        let params = sim.params(2.0).unwrap();
        let code = sim.code().clone();
        let pseed = point_seed(1, 2.0);
        let ml_errors = (0..3000)
            .filter(|&i| {
                let (w, y) = trial_channel(&code, &params, pseed, i);
                ml_decode_bruteforce(&y, &code).unwrap() != w
            })
            .count() as u64;
        assert_eq!(rec.block_errors, ml_errors);
        assert_eq!(rec.abandoned, 0);

        let mut std_cfg = sim.config().clone();
        std_cfg.mode = SimMode::Standard;
        std_cfg.truncation = 3;
        let capped = Simulation::new(std_cfg).unwrap().run_point(DecoderKind::Sgrand, 2.0).unwrap();
        assert!(rec.block_errors <= capped.block_errors);
    }

    #[test]
    fn random_linear_and_schedules_capped_by_code_size() {
        let code = build_toy_code(ToyCode::RandomLinear { n: 12, k: 6, seed: 3 }).unwrap();
        assert_eq!(code.k(), 6);
        let c = cfg("code = random_linear(12,6,3)\ndecoders = orbgrand,cdf,3line,rs,unit\nsnr_db = 4\nmax_trials = 500\nrs_samples = 200\ncdf_samples = 10000\nconvention = per_symbol");
        let mut sim = Simulation::new(c).unwrap();
        for kind in [DecoderKind::Orbgrand, DecoderKind::Cdf, DecoderKind::ThreeLine, DecoderKind::Rs, DecoderKind::Unit] {
            let p = sim.policy(kind, 4.0).unwrap();
            assert_eq!(p.truncation(), 4096);
            // full schedule on 12 bits: every decode finds a codeword
            let r = sim.run_point(kind, 4.0).unwrap();
            assert_eq!(r.abandoned, 0);
        }
    }
}
