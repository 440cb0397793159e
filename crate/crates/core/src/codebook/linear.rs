use rand::Rng;

use super::gf2::{null_space, parity, rank};
use super::{check_len, BinaryCode};
use crate::bits::{low_mask, BitWord, MAX_LEN};
use crate::error::{Error, Result};
use crate::rng::stream;

/// A binary linear code given by generator and parity-check rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    n: usize,
    generator: Vec<u128>,
    parity_check: Vec<u128>,
    name: String,
}

impl LinearCode {
    /// Builds the code spanned by `generator` (full row rank required) and
    /// derives a parity-check matrix from its null space.
    pub fn from_generator(n: usize, generator: Vec<u128>, name: impl Into<String>) -> Result<Self> {
        if n == 0 || n > MAX_LEN {
            return Err(Error::invalid(format!("block length {n} outside 1..=128")));
        }
        if generator.iter().any(|&r| r & !low_mask(n) != 0) {
            return Err(Error::invalid("generator row wider than n"));
        }
        if rank(&generator, n) != generator.len() {
            return Err(Error::invalid("generator rows are linearly dependent"));
        }
        let parity_check = null_space(&generator, n);
        Ok(LinearCode {
            n,
            generator,
            parity_check,
            name: name.into(),
        })
    }

    /// Builds from both matrices, validating `G·Hᵀ = 0` and the ranks.
    pub fn from_parts(
        n: usize,
        generator: Vec<u128>,
        parity_check: Vec<u128>,
        name: impl Into<String>,
    ) -> Result<Self> {
        if n == 0 || n > MAX_LEN {
            return Err(Error::invalid(format!("block length {n} outside 1..=128")));
        }
        let k = generator.len();
        if rank(&generator, n) != k {
            return Err(Error::invalid("generator rows are linearly dependent"));
        }
        if parity_check.len() != n - k || rank(&parity_check, n) != n - k {
            return Err(Error::invalid("parity-check matrix must have full rank n - k"));
        }
        for &g in &generator {
            for &h in &parity_check {
                if parity(g & h) {
                    return Err(Error::invalid("G·Hᵀ != 0"));
                }
            }
        }
        Ok(LinearCode {
            n,
            generator,
            parity_check,
            name: name.into(),
        })
    }

    pub fn generator(&self) -> &[u128] {
        &self.generator
    }

    pub fn parity_check(&self) -> &[u128] {
        &self.parity_check
    }

    /// All `2^k` codewords, `u` in ascending order; only for small codes.
    pub fn codewords(&self) -> Result<Vec<BitWord>> {
        let k = self.generator.len();
        if k > 20 {
            return Err(Error::Capacity(format!("refusing to list 2^{k} codewords")));
        }
        (0..1u128 << k)
            .map(|u| self.encode(&BitWord::from_u128(u, k)?))
            .collect()
    }
}

impl BinaryCode for LinearCode {
    fn n(&self) -> usize {
        self.n
    }

    fn k(&self) -> usize {
        self.generator.len()
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn syndrome(&self, word: &BitWord) -> Result<u128> {
        check_len(word, self.n, "word")?;
        let w = word.as_u128();
        Ok(self
            .parity_check
            .iter()
            .enumerate()
            .fold(0u128, |s, (j, &h)| s | ((parity(h & w) as u128) << j)))
    }

    fn encode(&self, u: &BitWord) -> Result<BitWord> {
        check_len(u, self.generator.len(), "information word")?;
        let bits = u
            .support()
            .fold(0u128, |acc, i| acc ^ self.generator[i]);
        BitWord::from_u128(bits, self.n)
    }
}

/// Small codes for exhaustive checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyCode {
    Hamming74,
    Repetition(usize),
    /// Systematic `[I_k | P]` with `P` drawn from the given seed.
    RandomLinear { n: usize, k: usize, seed: u64 },
}

pub fn build_toy_code(spec: ToyCode) -> Result<LinearCode> {
    match spec {
        ToyCode::Hamming74 => {
            // systematic [I_4 | P]: p1 = d1+d2+d4, p2 = d1+d3+d4, p3 = d2+d3+d4
            let rows = [0b1000_110u128, 0b0100_101, 0b0010_011, 0b0001_111]
                .iter()
                .map(|&r| reverse_bits(r, 7))
                .collect();
            LinearCode::from_generator(7, rows, "hamming(7,4)")
        }
        ToyCode::Repetition(n) => {
            if n == 0 || n > MAX_LEN {
                return Err(Error::invalid(format!("repetition length {n} outside 1..=128")));
            }
            LinearCode::from_generator(n, vec![low_mask(n)], format!("repetition({n})"))
        }
        ToyCode::RandomLinear { n, k, seed } => {
            if n > 16 || k == 0 || k > n {
                return Err(Error::invalid(format!(
                    "random_linear needs 1 <= k <= n <= 16, got n={n} k={k}"
                )));
            }
            let mut rng = stream(seed, "random_linear", (n * 64 + k) as u64);
            let rows = (0..k)
                .map(|i| {
                    let mut row = 1u128 << i;
                    for j in k..n {
                        if rng.random::<bool>() {
                            row |= 1 << j;
                        }
                    }
                    row
                })
                .collect();
            LinearCode::from_generator(n, rows, format!("random_linear({n},{k},{seed})"))
        }
    }
}

/// Reads a row written most-significant-first (`0b1101_000` = positions 0,1,3).
fn reverse_bits(row: u128, n: usize) -> u128 {
    (0..n).fold(0, |acc, i| acc | (((row >> (n - 1 - i)) & 1) << i))
}
