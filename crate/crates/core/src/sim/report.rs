//! CSV tables and run manifests.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{DecoderKind, SimConfig, SimRecord};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: &str = "snr_db,trials,block_errors,bler,avg_queries,abandon_rate,ci95";

/// One row per record with the sweep columns.
pub fn write_sweep_csv<W: Write>(records: &[SimRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{:e},{},{:e},{:e}",
            r.snr_db, r.trials, r.block_errors, r.bler, r.avg_queries, r.abandon_rate, r.ci95_bler
        )?;
    }
    out.flush()
}

/// Parsed sweep row: `(snr_db, trials, block_errors, bler, avg_queries, abandon_rate, ci95)`.
pub type SweepRow = (f64, u64, u64, f64, f64, f64, f64);

pub fn read_sweep_csv<R: BufRead>(input: R) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
        if i == 0 {
            if line.trim() != SWEEP_HEADER {
                return Err(Error::MalformedHeader(line));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(Error::parse(i + 1, format!("expected 7 fields, got {}", f.len())));
        }
        let bad = |what: &str| Error::parse(i + 1, format!("bad {what}"));
        let fl = |k: usize, what: &str| f[k].parse::<f64>().map_err(|_| bad(what));
        let int = |k: usize, what: &str| f[k].parse::<u64>().map_err(|_| bad(what));
        rows.push((
            fl(0, "snr_db")?,
            int(1, "trials")?,
            int(2, "block_errors")?,
            fl(3, "bler")?,
            fl(4, "avg_queries")?,
            fl(5, "abandon_rate")?,
            fl(6, "ci95")?,
        ));
    }
    Ok(rows)
}

/// Every field of every record, with the decoder as the first column.
pub fn write_records_csv<W: Write>(records: &[SimRecord], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "decoder,snr_db,sigma,trials,block_errors,found_wrong,abandoned,bler,avg_queries,queries_std_err,abandon_rate,wall_seconds,ci95"
    )?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:e},{},{},{:e},{:.3},{:e}",
            r.decoder,
            r.snr_db,
            r.sigma,
            r.trials,
            r.block_errors,
            r.found_wrong,
            r.abandoned,
            r.bler,
            r.avg_queries,
            r.queries_std_err,
            r.abandon_rate,
            r.wall_seconds,
            r.ci95_bler
        )?;
    }
    out.flush()
}

/// Average queries per decoder (rows) and SNR (columns).
#[derive(Debug, Clone)]
pub struct QueryTable {
    pub snr_db: Vec<f64>,
    pub rows: Vec<(DecoderKind, Vec<SimRecord>)>,
}

impl QueryTable {
    pub fn records(&self) -> impl Iterator<Item = &SimRecord> {
        self.rows.iter().flat_map(|(_, r)| r)
    }

    pub fn get(&self, kind: DecoderKind, snr_db: f64) -> Option<&SimRecord> {
        self.rows
            .iter()
            .find(|(k, _)| *k == kind)?
            .1
            .iter()
            .find(|r| r.snr_db == snr_db)
    }
}

impl std::fmt::Display for QueryTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:<18}", "SNR (dB)")?;
        for s in &self.snr_db {
            write!(f, "{:>12}", s)?;
        }
        writeln!(f)?;
        for (kind, recs) in &self.rows {
            write!(f, "{:<18}", kind.display_name())?;
            for r in recs {
                write!(f, "{:>12.2}", r.avg_queries)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn write_table_csv<W: Write>(t: &QueryTable, mut out: W) -> std::io::Result<()> {
    let head: Vec<String> = t.snr_db.iter().map(|s| s.to_string()).collect();
    writeln!(out, "decoder,{}", head.join(","))?;
    for (kind, recs) in &t.rows {
        let vals: Vec<String> = recs.iter().map(|r| format!("{:.4}", r.avg_queries)).collect();
        writeln!(out, "{},{}", kind.label(), vals.join(","))?;
    }
    out.flush()
}

/// Git-style content hash: SHA-256 over `blob <len>\0` followed by the bytes.
pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct InputFile {
    path: String,
    blob_sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: serde_json::Map<String, serde_json::Value>,
    inputs: Vec<InputFile>,
    records: &'a [SimRecord],
}

/// Writes the resolved config, content hashes of schedule and model inputs,
/// and the records as JSON.
pub fn write_manifest(path: impl AsRef<Path>, command: &str, config: &SimConfig, records: &[SimRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut inputs = Vec::new();
    for p in config.schedules.values().chain(config.model.iter()) {
        let bytes = std::fs::read(p).map_err(|e| Error::io(p, e))?;
        inputs.push(InputFile {
            path: p.display().to_string(),
            blob_sha256: blob_hash(&bytes),
        });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: config
            .to_pairs()
            .into_iter()
            .map(|(k, v)| (k, serde_json::Value::String(v)))
            .collect(),
        inputs,
        records,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(snr: f64, trials: u64, errors: u64) -> SimRecord {
        let bler = errors as f64 / trials as f64;
        SimRecord {
            decoder: "orbgrand".into(),
            snr_db: snr,
            sigma: 0.5,
            trials,
            block_errors: errors,
            found_wrong: errors / 2,
            abandoned: errors - errors / 2,
            bler,
            avg_queries: 12.375,
            queries_std_err: 0.5,
            abandon_rate: (errors - errors / 2) as f64 / trials as f64,
            wall_seconds: 1.0,
            ci95_bler: 1.96 * (bler * (1.0 - bler) / trials as f64).sqrt(),
        }
    }

    #[test]
    fn sweep_csv_round_trip() {
        let recs = vec![rec(4.0, 1000, 100), rec(4.5, 3000, 100), rec(5.0, 12345, 7)];
        let mut buf = Vec::new();
        write_sweep_csv(&recs, &mut buf).unwrap();
        let rows = read_sweep_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 3);
        for (r, row) in recs.iter().zip(&rows) {
            assert_eq!(*row, (r.snr_db, r.trials, r.block_errors, r.bler, r.avg_queries, r.abandon_rate, r.ci95_bler));
        }
        assert!(read_sweep_csv("a,b\n".as_bytes()).is_err());
    }

    #[test]
    fn blob_hash_of_empty_input() {
        // sha256 of "blob 0\0"
        assert_eq!(
            blob_hash(b""),
            "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813"
        );
    }

    #[test]
    fn manifest_is_json() {
        let dir = tempfile::tempdir().unwrap();
        let sched = dir.path().join("s.sched");
        std::fs::write(&sched, "SCHED v1 n=1 count=1 kind=rank\n-\n").unwrap();
        let mut cfg = SimConfig::default();
        cfg.schedules.insert(DecoderKind::Orbgrand, sched.clone());
        let out = dir.path().join("m.json");
        write_manifest(&out, "sim bler", &cfg, &[rec(4.0, 10, 1)]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(v["config"]["T"], "10000");
        assert_eq!(v["inputs"][0]["blob_sha256"], blob_hash(&std::fs::read(&sched).unwrap()));
        assert_eq!(v["records"][0]["trials"], 10);
    }
}
