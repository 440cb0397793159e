//! Schedule files.
//!
//! ```text
//! SCHED v1 n=<n> count=<c> kind=<kind>
//! -
//! 1
//! 2
//! 1 2
//! ```
//!
//! One pattern per line as ascending ranks; the empty pattern is `-`.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{RankPattern, Schedule, MAX_N};
use crate::error::{Error, Result};

pub fn write_schedule<W: Write>(s: &Schedule, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "SCHED v1 n={} count={} kind={}", s.n(), s.len(), s.tag())?;
    let mut line = String::new();
    for p in s.patterns() {
        line.clear();
        if p.is_empty() {
            line.push('-');
        }
        for (i, r) in p.ranks().iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&r.to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()
}

pub(crate) fn header_value<'a>(fields: &[&'a str], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find_map(|f| f.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| Error::MalformedHeader(format!("missing {key}=")))
}

pub fn read_schedule<R: BufRead>(input: R) -> Result<Schedule> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(Error::parse(1, e.to_string())),
        None => return Err(Error::MalformedHeader("empty file".into())),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "SCHED" || fields[1] != "v1" {
        return Err(Error::MalformedHeader(header.clone()));
    }
    let n: usize = header_value(&fields, "n")?
        .parse()
        .map_err(|_| Error::MalformedHeader(format!("bad n in {header:?}")))?;
    let count: usize = header_value(&fields, "count")?
        .parse()
        .map_err(|_| Error::MalformedHeader(format!("bad count in {header:?}")))?;
    let kind = header_value(&fields, "kind")?.to_string();
    if n == 0 || n > MAX_N {
        return Err(Error::MalformedHeader(format!("n={n} outside 1..={MAX_N}")));
    }
    let mut patterns = Vec::with_capacity(count);
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if patterns.len() == count {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(lineno, format!("more than {count} patterns")));
        }
        let line = line.trim();
        if line == "-" {
            patterns.push(RankPattern::empty());
            continue;
        }
        if line.is_empty() {
            return Err(Error::parse(lineno, "blank pattern line"));
        }
        let mut ranks = Vec::new();
        for tok in line.split_whitespace() {
            let r: u64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad rank {tok:?}")))?;
            if r == 0 || r as usize > n {
                return Err(Error::RankOutOfRange { rank: r, n, line: lineno });
            }
            ranks.push(r as u8);
        }
        let p = RankPattern::new(ranks, n).map_err(|e| Error::parse(lineno, e.to_string()))?;
        patterns.push(p);
    }
    if patterns.len() != count {
        return Err(Error::parse(
            patterns.len() + 2,
            format!("file truncated: {} of {count} patterns", patterns.len()),
        ));
    }
    Schedule::new(n, kind, patterns)
}

pub fn save_schedule(s: &Schedule, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_schedule(s, f).map_err(|e| Error::io(path, e))
}

pub fn load_schedule(path: impl AsRef<Path>) -> Result<Schedule> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_schedule(BufReader::new(f))
}
