//! The `grandlab` command line.
//!
//! Exit codes: 0 success, 2 usage or invalid parameters, 3 file errors,
//! 4 verification failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::pattern::{
    accumulated_weight, cdf_weight_function, enumerate_schedule, fit_three_line, load_schedule, save_schedule,
    three_line_weight_function, WeightFunction, WeightKind, DEFAULT_SCHEDULE_LEN,
};
use crate::reshuffle::{compare_heldout, export_rmatrix, load_model, rmatrix_from_sampler, save_model, train, RFormat};
use crate::rng::{derive_seed, stream};
use crate::sim::{write_manifest, write_records_csv, write_sweep_csv, write_table_csv, SimConfig, SimMode, Simulation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "grandlab", version, about = "ORB-type GRAND schedules, reshuffling and benchmarks")]
struct Cli {
    /// Caps the worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build pattern schedules.
    #[command(subcommand)]
    Schedule(ScheduleCmd),
    /// Train reshuffle models.
    #[command(subcommand)]
    Reshuffle(ReshuffleCmd),
    /// Inspect trained models.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Monte Carlo benchmarks.
    #[command(subcommand)]
    Sim(SimCmd),
    /// Brute-force reference checks.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Subcommand, Debug)]
enum ScheduleCmd {
    Build {
        #[arg(long)]
        weight: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SCHEDULE_LEN)]
        count: usize,
        /// Noise level for cdf and 3line weights.
        #[arg(long)]
        sigma: Option<f64>,
        /// Monte Carlo samples for cdf and 3line weights.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum ReshuffleCmd {
    Train {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Held-out realizations for the before/after comparison.
        #[arg(long, default_value_t = 1_000)]
        heldout: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum AnalyzeCmd {
    Rmatrix {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 200)]
        k: usize,
        /// Training realizations to average over (default: all).
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides a config entry; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SimCmd {
    Bler(SimArgs),
    Table(SimArgs),
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    Verify {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } | Error::MalformedHeader(_) | Error::Parse { .. } | Error::RankOutOfRange { .. } => {
                EXIT_IO
            }
            Error::InvalidParameter(_) | Error::Capacity(_) | Error::InvalidSchedule(_) => EXIT_USAGE,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.into() }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Output goes to `out`, diagnostics to stderr.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = if cli.workers > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, cli.workers, out)),
            Err(e) => Err(usage(format!("thread pool: {e}"))),
        }
    } else {
        dispatch(cli.command, 0, out)
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn dispatch(cmd: Command, workers: usize, out: &mut (dyn Write + Send)) -> CmdResult {
    match cmd {
        Command::Schedule(ScheduleCmd::Build { weight, n, count, sigma, samples, seed, out: path }) => {
            schedule_build(&weight, n, count, sigma, samples, seed, &path, out)
        }
        Command::Reshuffle(ReshuffleCmd::Train { base, sigma, samples, seed, heldout, out: path }) => {
            reshuffle_train(&base, sigma, samples, seed, heldout, &path, out)
        }
        Command::Analyze(AnalyzeCmd::Rmatrix { model, k, samples, out: prefix }) => {
            analyze_rmatrix(&model, k, samples, &prefix, out)
        }
        Command::Sim(SimCmd::Bler(a)) => sim(a, workers, false, out),
        Command::Sim(SimCmd::Table(a)) => sim(a, workers, true, out),
        Command::Oracle(OracleCmd::Verify { quick, seed }) => oracle_verify(quick, seed, out),
    }
}

fn say(out: &mut (dyn Write + Send), text: std::fmt::Arguments) -> CmdResult {
    out.write_fmt(text)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| Failure { code: EXIT_IO, msg: format!("stdout: {e}") })
}

macro_rules! say {
    ($out:expr, $($t:tt)*) => { say($out, format_args!($($t)*)) };
}

#[allow(clippy::too_many_arguments)]
fn schedule_build(
    weight: &str,
    n: usize,
    count: usize,
    sigma: Option<f64>,
    samples: usize,
    seed: u64,
    path: &Path,
    out: &mut (dyn Write + Send),
) -> CmdResult {
    let kind: WeightKind = weight.parse()?;
    if n == 0 || n > crate::pattern::MAX_N {
        return Err(usage(format!("--n must be in 1..={}", crate::pattern::MAX_N)));
    }
    if n < 64 && count as u128 > 1u128 << n {
        return Err(usage(format!("--count {count} exceeds the 2^{n} patterns of length {n}")));
    }
    let data_driven = |sigma: Option<f64>| -> std::result::Result<WeightFunction, Failure> {
        let sigma = sigma.ok_or_else(|| usage(format!("--sigma is required for {weight} weights")))?;
        let mut rng = stream(seed, "cdf-weights", sigma.to_bits());
        Ok(cdf_weight_function(n, sigma, samples, &mut rng)?)
    };
    let wf = match kind {
        WeightKind::Unit => WeightFunction::unit(n),
        WeightKind::Rank => WeightFunction::rank(n),
        WeightKind::Cdf => data_driven(sigma)?,
        WeightKind::ThreeLine => {
            let cdf = data_driven(sigma)?;
            three_line_weight_function(n, &fit_three_line(cdf.gamma())?)?
        }
        WeightKind::Soft => return Err(usage("soft weights depend on the channel output; use sgrand")),
    };
    let schedule = enumerate_schedule(&wf, n, count)?;
    save_schedule(&schedule, path)?;
    let first = accumulated_weight(&schedule.patterns()[0], &wf);
    let last = accumulated_weight(schedule.patterns().last().expect("nonempty"), &wf);
    say!(out, "weight = {}\nn = {n}\ncount = {count}\nout = {}", kind.label(), path.display())?;
    say!(out, "accumulated weight: first {first} last {last}")
}

fn reshuffle_train(
    base: &Path,
    sigma: f64,
    samples: u64,
    seed: u64,
    heldout: u64,
    path: &Path,
    out: &mut (dyn Write + Send),
) -> CmdResult {
    if samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let schedule = load_schedule(base)?;
    say!(
        out,
        "base = {}\nsigma = {sigma}\nsamples = {samples}\nseed = {seed}\nheldout = {heldout}\nout = {}",
        base.display(),
        path.display()
    )?;
    let model = train(schedule, sigma, samples, seed)?;
    save_model(&model, &base.display().to_string(), path)?;
    if heldout > 0 {
        let c = compare_heldout(&model, sigma, heldout, derive_seed(seed, "heldout"))?;
        say!(
            out,
            "held-out excess queries: before {:.6} after {:.6} (improvement {:.6} +/- {:.6})",
            c.base.rank_difference,
            c.reshuffled.rank_difference,
            c.improvement,
            c.improvement_std_err
        )?;
    }
    Ok(())
}

fn analyze_rmatrix(model: &Path, k: usize, samples: Option<u64>, prefix: &Path, out: &mut (dyn Write + Send)) -> CmdResult {
    let model = load_model(model)?;
    let meta = model
        .meta()
        .ok_or_else(|| usage("model has no training metadata to regenerate its samples from"))?;
    if k == 0 || k > model.len() {
        return Err(usage(format!("--k must be in 1..={}", model.len())));
    }
    let sampler = model.training_sampler().expect("meta present");
    let samples = samples.unwrap_or(meta.mc_samples).min(meta.mc_samples);
    let after = rmatrix_from_sampler(&model.reshuffled().patterns()[..k], &sampler, samples)?;
    let before = rmatrix_from_sampler(&model.base().patterns()[..k], &sampler, samples)?;
    let name = |suffix: &str, ext: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(format!("{suffix}.{ext}"));
        PathBuf::from(s)
    };
    for (m, suffix) in [(&after, ""), (&before, "_base")] {
        export_rmatrix(m, name(suffix, "csv"), RFormat::Csv)?;
        export_rmatrix(m, name(suffix, "pgm"), RFormat::Pgm)?;
    }
    say!(out, "k = {k}\nsamples = {samples}\nprefix = {}", prefix.display())?;
    say!(
        out,
        "max lower-triangular normalized entry: before {:.6} after {:.6}",
        before.max_lower_normalized(),
        after.max_lower_normalized()
    )
}

fn sim(a: SimArgs, workers: usize, table: bool, out: &mut (dyn Write + Send)) -> CmdResult {
    let mut config = SimConfig::load(&a.config)?;
    for kv in &a.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        config.set(k.trim(), v.trim())?;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(o) = a.out {
        config.out = Some(o);
    }
    if workers > 0 {
        config.workers = workers;
    }
    let out_path = config
        .out
        .clone()
        .ok_or_else(|| usage("no output path: set out in the config or pass --out"))?;
    say!(out, "{}", config.render().trim_end())?;
    let mut simulation = Simulation::new(config.clone())?;
    let create = |p: &Path| File::create(p).map_err(|e| Failure::from(Error::io(p, e)));
    let records = if table {
        let t = simulation.run_table()?;
        write_table_csv(&t, create(&out_path)?).map_err(io_err(&out_path))?;
        say!(out, "{t}")?;
        let recs: Vec<_> = t.records().cloned().collect();
        let detail = out_path.with_extension("records.csv");
        write_records_csv(&recs, create(&detail)?).map_err(io_err(&detail))?;
        recs
    } else {
        let recs = if config.mode == SimMode::MlLowerBound {
            simulation.run_ml_lower_bound()?
        } else {
            simulation.run_sweep()?
        };
        if config.decoders.len() == 1 {
            write_sweep_csv(&recs, create(&out_path)?).map_err(io_err(&out_path))?;
        } else {
            for kind in &config.decoders {
                let p = out_path.with_extension(format!("{}.csv", kind.label()));
                let mine: Vec<_> = recs.iter().filter(|r| r.decoder == kind.label()).cloned().collect();
                write_sweep_csv(&mine, create(&p)?).map_err(io_err(&p))?;
            }
        }
        for r in &recs {
            say!(
                out,
                "{} snr={} trials={} errors={} bler={:.3e} avg_queries={:.2}",
                r.decoder, r.snr_db, r.trials, r.block_errors, r.bler, r.avg_queries
            )?;
        }
        recs
    };
    let manifest = out_path.with_extension("manifest.json");
    write_manifest(&manifest, if table { "sim table" } else { "sim bler" }, &config, &records)?;
    Ok(())
}

fn io_err(p: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::from(Error::io(p, e))
}

fn oracle_verify(quick: bool, seed: u64, out: &mut (dyn Write + Send)) -> CmdResult {
    let reports = crate::verify::run_suite(quick, seed);
    let mut failed = Vec::new();
    for r in &reports {
        say!(out, "{} {}: {}", if r.passed { "ok  " } else { "FAIL" }, r.name, r.detail)?;
        if !r.passed {
            failed.push(r.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFY, msg: format!("failed: {}", failed.join(", ")) })
    }
}
