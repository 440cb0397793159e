//! Pairwise inversion matrices.
//!
//! `raw[j][i]` is the sample mean of `(s_j − s_i)⁺`: how much posterior mass
//! is lost, on average, by querying pattern `i` before pattern `j`. The
//! normalized entry `raw[j][i] / (raw[j][i] + raw[i][j])` is at most ½ below
//! the diagonal exactly when the estimated means are sorted descending.

use std::io::{BufWriter, Write};
use std::path::Path;

use super::{PosteriorEvaluator, PosteriorSampler, CHUNK};
use crate::error::{Error, Result};
use crate::par::ordered_reduce;
use crate::pattern::RankPattern;

#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    k: usize,
    raw: Vec<f64>,
    normalized: Vec<f64>,
}

impl RMatrix {
    /// From a row-major `k × k` raw matrix.
    pub fn from_raw(k: usize, raw: Vec<f64>) -> Result<Self> {
        if raw.len() != k * k {
            return Err(Error::invalid(format!("{} entries for a {k}x{k} matrix", raw.len())));
        }
        let mut normalized = vec![0.5; k * k];
        for j in 0..k {
            for i in 0..k {
                let (a, b) = (raw[j * k + i], raw[i * k + j]);
                if a + b > 0.0 {
                    normalized[j * k + i] = a / (a + b);
                }
            }
        }
        Ok(RMatrix { k, raw, normalized })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// 0-based `raw[j][i]`.
    pub fn raw(&self, j: usize, i: usize) -> f64 {
        self.raw[j * self.k + i]
    }

    pub fn normalized(&self, j: usize, i: usize) -> f64 {
        self.normalized[j * self.k + i]
    }

    /// Largest normalized entry strictly below the diagonal.
    pub fn max_lower_normalized(&self) -> f64 {
        (1..self.k)
            .flat_map(|j| (0..j).map(move |i| (j, i)))
            .map(|(j, i)| self.normalized(j, i))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone)]
struct RawSums {
    k: usize,
    sums: Vec<f64>,
    count: u64,
}

impl RawSums {
    fn new(k: usize) -> Self {
        RawSums {
            k,
            sums: vec![0.0; k * k],
            count: 0,
        }
    }

    fn add(&mut self, s: &[f64]) {
        let k = self.k;
        for j in 1..k {
            let sj = s[j];
            for i in 0..j {
                let d = sj - s[i];
                self.sums[j * k + i] += d.max(0.0);
                self.sums[i * k + j] += (-d).max(0.0);
            }
        }
        self.count += 1;
    }

    fn merge(&mut self, o: RawSums) {
        for (a, b) in self.sums.iter_mut().zip(o.sums) {
            *a += b;
        }
        self.count += o.count;
    }

    fn finish(self) -> Result<RMatrix> {
        if self.count == 0 {
            return Err(Error::invalid("R matrix needs at least one sample"));
        }
        let m = self.count as f64;
        RMatrix::from_raw(self.k, self.sums.into_iter().map(|v| v / m).collect())
    }
}

/// R over the first `k` coordinates of each posterior vector.
pub fn r_matrix<'a>(samples: impl IntoIterator<Item = &'a [f64]>, k: usize) -> Result<RMatrix> {
    let mut acc = RawSums::new(k);
    for s in samples {
        if s.len() < k {
            return Err(Error::invalid(format!("sample of length {} is shorter than k={k}", s.len())));
        }
        acc.add(s);
    }
    acc.finish()
}

/// R for `patterns` (in query order) over samples `0..samples` of `sampler`.
pub fn rmatrix_from_sampler(
    patterns: &[RankPattern],
    sampler: &PosteriorSampler,
    samples: u64,
) -> Result<RMatrix> {
    let k = patterns.len();
    let eval = PosteriorEvaluator::new(patterns, sampler.n());
    ordered_reduce(
        samples,
        CHUNK * 4,
        || (RawSums::new(k), vec![0.0; k]),
        |(acc, buf), m| {
            eval.eval_into(&sampler.lambda(m), buf);
            acc.add(buf);
        },
        |(total, _), (part, _)| total.merge(part),
    )
    .0
    .finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RFormat {
    Csv,
    Pgm,
}

/// Gray level of a normalized entry, half rounded up.
fn gray(x: f64) -> u8 {
    (255.0 * x + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn write_rmatrix<W: Write>(m: &RMatrix, format: RFormat, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    let k = m.k;
    match format {
        RFormat::Csv => {
            for j in 0..k {
                let row: Vec<String> = (0..k).map(|i| format!("{:.6}", m.normalized(j, i))).collect();
                writeln!(out, "{}", row.join(","))?;
            }
        }
        RFormat::Pgm => {
            write!(out, "P5\n{k} {k}\n255\n")?;
            let pixels: Vec<u8> = m.normalized.iter().map(|&x| gray(x)).collect();
            out.write_all(&pixels)?;
        }
    }
    out.flush()
}

pub fn export_rmatrix(m: &RMatrix, path: impl AsRef<Path>, format: RFormat) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_rmatrix(m, format, f).map_err(|e| Error::io(path, e))
}
