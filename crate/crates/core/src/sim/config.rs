//! Flat `key = value` simulation configs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::channel::SnrConvention;
use crate::codebook::{build_bch_127_113, build_toy_code, load_code, AnyCode, PolarCrcCode, ToyCode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum CodeSpec {
    Bch127,
    Polar128,
    Hamming74,
    Repetition(usize),
    RandomLinear { n: usize, k: usize, seed: u64 },
    File(PathBuf),
}

impl CodeSpec {
    pub fn build(&self, polar_design_snr_db: f64) -> Result<AnyCode> {
        Ok(match self {
            CodeSpec::Bch127 => AnyCode::Linear(build_bch_127_113()),
            CodeSpec::Polar128 => AnyCode::PolarCrc(PolarCrcCode::standard_128_114(polar_design_snr_db)),
            CodeSpec::Hamming74 => AnyCode::Linear(build_toy_code(ToyCode::Hamming74)?),
            CodeSpec::Repetition(n) => AnyCode::Linear(build_toy_code(ToyCode::Repetition(*n))?),
            CodeSpec::RandomLinear { n, k, seed } => AnyCode::Linear(build_toy_code(ToyCode::RandomLinear {
                n: *n,
                k: *k,
                seed: *seed,
            })?),
            CodeSpec::File(p) => load_code(p)?,
        })
    }
}

fn call_args<'a>(s: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let inner = s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(str::trim).collect())
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("unknown code {s:?}"));
        let num = |v: &str| v.parse::<u64>().map_err(|_| bad());
        Ok(match s.trim() {
            "bch127" | "bch(127,113)" => CodeSpec::Bch127,
            "polar128" | "polar(128,114)" => CodeSpec::Polar128,
            "hamming74" | "hamming(7,4)" => CodeSpec::Hamming74,
            t => {
                if let Some(path) = t.strip_prefix("file:") {
                    CodeSpec::File(PathBuf::from(path))
                } else if let Some(a) = call_args(t, "repetition") {
                    match a.as_slice() {
                        [n] => CodeSpec::Repetition(num(n)? as usize),
                        _ => return Err(bad()),
                    }
                } else if let Some(a) = call_args(t, "random_linear") {
                    match a.as_slice() {
                        [n, k] => CodeSpec::RandomLinear { n: num(n)? as usize, k: num(k)? as usize, seed: 1 },
                        [n, k, seed] => CodeSpec::RandomLinear {
                            n: num(n)? as usize,
                            k: num(k)? as usize,
                            seed: num(seed)?,
                        },
                        _ => return Err(bad()),
                    }
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSpec::Bch127 => write!(f, "bch127"),
            CodeSpec::Polar128 => write!(f, "polar128"),
            CodeSpec::Hamming74 => write!(f, "hamming74"),
            CodeSpec::Repetition(n) => write!(f, "repetition({n})"),
            CodeSpec::RandomLinear { n, k, seed } => write!(f, "random_linear({n},{k},{seed})"),
            CodeSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Decoders in the order of the query-count table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DecoderKind {
    Orbgrand,
    Cdf,
    ThreeLine,
    Rs,
    Sgrand,
    Unit,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 6] = [
        DecoderKind::Orbgrand,
        DecoderKind::Cdf,
        DecoderKind::ThreeLine,
        DecoderKind::Rs,
        DecoderKind::Sgrand,
        DecoderKind::Unit,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            DecoderKind::Orbgrand => "orbgrand",
            DecoderKind::Cdf => "cdf",
            DecoderKind::ThreeLine => "3line",
            DecoderKind::Rs => "rs",
            DecoderKind::Sgrand => "sgrand",
            DecoderKind::Unit => "unit",
        }
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            DecoderKind::Orbgrand => "ORBGRAND",
            DecoderKind::Cdf => "CDF-ORBGRAND",
            DecoderKind::ThreeLine => "3-line ORBGRAND",
            DecoderKind::Rs => "RS-ORBGRAND",
            DecoderKind::Sgrand => "SGRAND",
            DecoderKind::Unit => "GRAND (Hamming)",
        }
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DecoderKind::ALL
            .into_iter()
            .find(|k| k.label() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown decoder {s:?}")))
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Noise level at which data-driven schedules are designed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesignSnr {
    Fixed(f64),
    /// Each operating point gets its own schedule.
    Matched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    Standard,
    /// Only wrong codewords count as errors; abandonment counts as correct.
    MlLowerBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub code: CodeSpec,
    pub polar_design_snr_db: f64,
    pub decoders: Vec<DecoderKind>,
    pub snr_db: Vec<f64>,
    pub convention: SnrConvention,
    /// Query cap `T`.
    pub truncation: usize,
    /// Base schedule length for reshuffling.
    pub t1: usize,
    pub max_trials: u64,
    pub min_block_errors: u64,
    pub seed: u64,
    /// 0 uses every available core.
    pub workers: usize,
    pub design_snr: DesignSnr,
    pub cdf_samples: usize,
    pub rs_samples: u64,
    pub schedules: BTreeMap<DecoderKind, PathBuf>,
    pub model: Option<PathBuf>,
    pub mode: SimMode,
    pub out: Option<PathBuf>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            code: CodeSpec::Bch127,
            polar_design_snr_db: 6.0,
            decoders: vec![DecoderKind::Orbgrand],
            snr_db: vec![5.0],
            convention: SnrConvention::EbN0,
            truncation: 10_000,
            t1: 50_000,
            max_trials: 1_000_000,
            min_block_errors: 100,
            seed: 1,
            workers: 0,
            design_snr: DesignSnr::Matched,
            cdf_samples: 100_000,
            rs_samples: 100_000,
            schedules: BTreeMap::new(),
            model: None,
            mode: SimMode::Standard,
            out: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::invalid(format!("bad value {v:?} for {key}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

impl SimConfig {
    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = SimConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected key = value, got {raw:?}")))?;
            c.set(k.trim(), v.trim()).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        }
        Ok(c)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "code" => self.code = v.parse()?,
            "polar_design_snr_db" => self.polar_design_snr_db = parse_num(key, v)?,
            "decoders" | "decoder" => {
                self.decoders = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "snr_db" => self.snr_db = parse_list(key, v)?,
            "convention" => self.convention = v.parse()?,
            "T" | "truncation" => self.truncation = parse_num(key, v)?,
            "T1" | "t1" => self.t1 = parse_num(key, v)?,
            "max_trials" => self.max_trials = parse_num(key, v)?,
            "min_block_errors" => self.min_block_errors = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "workers" => self.workers = parse_num(key, v)?,
            "design_snr_db" => {
                self.design_snr = if v == "matched" {
                    DesignSnr::Matched
                } else {
                    DesignSnr::Fixed(parse_num(key, v)?)
                }
            }
            "cdf_samples" => self.cdf_samples = parse_num(key, v)?,
            "rs_samples" => self.rs_samples = parse_num(key, v)?,
            "model" => self.model = Some(PathBuf::from(v)),
            "mode" => {
                self.mode = match v {
                    "standard" => SimMode::Standard,
                    "ml_lower_bound" => SimMode::MlLowerBound,
                    _ => return Err(Error::invalid(format!("unknown mode {v:?}"))),
                }
            }
            "out" => self.out = Some(PathBuf::from(v)),
            _ => {
                if let Some(kind) = key.strip_prefix("schedule.") {
                    self.schedules.insert(kind.parse()?, PathBuf::from(v));
                } else {
                    return Err(Error::invalid(format!("unknown config key {key:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation == 0 {
            return Err(Error::invalid("T must be at least 1"));
        }
        if self.min_block_errors == 0 || self.max_trials == 0 {
            return Err(Error::invalid("min_block_errors and max_trials must be at least 1"));
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid("snr_db must list at least one finite value"));
        }
        if self.decoders.is_empty() {
            return Err(Error::invalid("no decoders configured"));
        }
        if self.mode == SimMode::MlLowerBound
            && (self.decoders != [DecoderKind::Sgrand] || self.truncation != 100_000)
        {
            return Err(Error::invalid(
                "the ML lower bound runs SGRAND alone with T = 100000",
            ));
        }
        Ok(())
    }

    /// Every setting as `key = value` pairs, in a stable order.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = vec![
            ("code".to_string(), self.code.to_string()),
            ("polar_design_snr_db".into(), self.polar_design_snr_db.to_string()),
            (
                "decoders".into(),
                self.decoders.iter().map(|d| d.label()).collect::<Vec<_>>().join(","),
            ),
            ("snr_db".into(), list(&self.snr_db)),
            ("convention".into(), self.convention.label().into()),
            ("T".into(), self.truncation.to_string()),
            ("T1".into(), self.t1.to_string()),
            ("max_trials".into(), self.max_trials.to_string()),
            ("min_block_errors".into(), self.min_block_errors.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("workers".into(), self.workers.to_string()),
            (
                "design_snr_db".into(),
                match self.design_snr {
                    DesignSnr::Fixed(v) => v.to_string(),
                    DesignSnr::Matched => "matched".into(),
                },
            ),
            ("cdf_samples".into(), self.cdf_samples.to_string()),
            ("rs_samples".into(), self.rs_samples.to_string()),
            (
                "mode".into(),
                match self.mode {
                    SimMode::Standard => "standard",
                    SimMode::MlLowerBound => "ml_lower_bound",
                }
                .into(),
            ),
        ];
        for (k, p) in &self.schedules {
            out.push((format!("schedule.{k}"), p.display().to_string()));
        }
        if let Some(m) = &self.model {
            out.push(("model".into(), m.display().to_string()));
        }
        if let Some(o) = &self.out {
            out.push(("out".into(), o.display().to_string()));
        }
        out
    }

    pub fn render(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}
