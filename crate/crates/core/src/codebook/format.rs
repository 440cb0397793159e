//! Text serialization of codes.
//!
//! ```text
//! CODE v1 type=linear n=7 k=4
//! G
//! <k hex rows>
//! H
//! <n-k hex rows>
//! ```
//!
//! or, for CRC-aided polar codes,
//!
//! ```text
//! CODE v1 type=polar_crc n=128 k=104
//! frozen 0 1 2 ...
//! crc width=10 poly=0x233
//! ```
//!
//! Hex rows hold position `i` in bit `i` and are zero-padded to `ceil(n/4)` digits.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{AnyCode, BinaryCode, CrcPoly, LinearCode, PolarCrcCode};
use crate::error::{Error, Result};

pub fn write_code<W: Write>(code: &AnyCode, mut out: W) -> std::io::Result<()> {
    match code {
        AnyCode::Linear(c) => {
            let digits = c.n().div_ceil(4);
            writeln!(out, "CODE v1 type=linear n={} k={}", c.n(), c.k())?;
            writeln!(out, "G")?;
            for row in c.generator() {
                writeln!(out, "{row:0digits$x}")?;
            }
            writeln!(out, "H")?;
            for row in c.parity_check() {
                writeln!(out, "{row:0digits$x}")?;
            }
        }
        AnyCode::PolarCrc(c) => {
            writeln!(out, "CODE v1 type=polar_crc n={} k={}", c.n(), c.k())?;
            let frozen: Vec<String> = c.frozen_positions().iter().map(|f| f.to_string()).collect();
            writeln!(out, "frozen {}", frozen.join(" "))?;
            writeln!(out, "crc width={} poly={:#x}", c.crc().width, c.crc().poly)?;
        }
    }
    Ok(())
}

fn header_field<'a>(fields: &'a [&str], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find_map(|f| f.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| Error::MalformedHeader(format!("missing {key}=")))
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("expected an integer, got {s:?}")))
}

pub fn read_code<R: BufRead>(input: R) -> Result<AnyCode> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i, l.trim_end().to_string())),
            Some((i, Err(e))) => Err(Error::parse(i, e.to_string())),
            None => Err(Error::parse(0, format!("unexpected end of input, expected {what}"))),
        }
    };
    let (_, header) = next("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 2 || fields[0] != "CODE" || fields[1] != "v1" {
        return Err(Error::MalformedHeader(header.clone()));
    }
    let kind = header_field(&fields, "type")?;
    let n = parse_usize(header_field(&fields, "n")?, 1)?;
    let k = parse_usize(header_field(&fields, "k")?, 1)?;
    if n == 0 || n > 128 || k > n {
        return Err(Error::MalformedHeader(format!("bad dimensions n={n} k={k}")));
    }
    match kind {
        "linear" => {
            let mut read_rows = |label: &str, count: usize| -> Result<Vec<u128>> {
                let (i, l) = next(label)?;
                if l != label {
                    return Err(Error::parse(i, format!("expected section {label}")));
                }
                (0..count)
                    .map(|_| {
                        let (i, l) = next("matrix row")?;
                        let v = u128::from_str_radix(&l, 16)
                            .map_err(|_| Error::parse(i, format!("bad hex row {l:?}")))?;
                        if n < 128 && v >> n != 0 {
                            return Err(Error::parse(i, "row wider than n"));
                        }
                        Ok(v)
                    })
                    .collect()
            };
            let g = read_rows("G", k)?;
            let h = read_rows("H", n - k)?;
            Ok(AnyCode::Linear(LinearCode::from_parts(n, g, h, format!("linear({n},{k})"))?))
        }
        "polar_crc" => {
            let (i, l) = next("frozen set")?;
            let rest = l
                .strip_prefix("frozen")
                .ok_or_else(|| Error::parse(i, "expected frozen line"))?;
            let frozen = rest
                .split_whitespace()
                .map(|t| parse_usize(t, i))
                .collect::<Result<Vec<_>>>()?;
            let (i, l) = next("crc line")?;
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.first() != Some(&"crc") {
                return Err(Error::parse(i, "expected crc line"));
            }
            let width = parse_usize(header_field(&fields, "width")?, i)?;
            let poly_s = header_field(&fields, "poly")?;
            let poly = u64::from_str_radix(poly_s.trim_start_matches("0x"), 16)
                .map_err(|_| Error::parse(i, format!("bad polynomial {poly_s:?}")))?;
            let code = PolarCrcCode::from_frozen(n, frozen, CrcPoly::new(width, poly)?)?;
            if code.k() != k {
                return Err(Error::MalformedHeader(format!(
                    "header k={k} but frozen set gives k={}",
                    code.k()
                )));
            }
            Ok(AnyCode::PolarCrc(code))
        }
        other => Err(Error::MalformedHeader(format!("unknown code type {other:?}"))),
    }
}

pub fn save_code(code: &AnyCode, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_code(code, &mut buf).expect("writing to memory");
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_code(path: impl AsRef<Path>) -> Result<AnyCode> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_code(BufReader::new(f))
}
