//! Binary codes and their membership tests.
//!
//! Every code here is linear over GF(2), so membership reduces to a linear
//! syndrome map `F_2^n -> F_2^(n-k)` that vanishes exactly on the code. The
//! GRAND query loop only ever needs that map evaluated on unit vectors (the
//! column syndromes) plus the syndrome of the hard decision.

mod bch;
mod crc;
mod format;
pub mod gf2;
mod gf2m;
mod linear;
mod polar;

pub use bch::{bch_code, build_bch_127_113};
pub use crc::{crc_remainder, CrcPoly};
pub use format::{read_code, save_code, load_code, write_code};
pub use gf2m::{poly_degree, poly_divmod, poly_gcd, poly_mul, GF2mField};
pub use linear::{build_toy_code, LinearCode, ToyCode};
pub use polar::{build_polar_crc, polar_reliability_order, polar_transform, PolarCrcCode};

use rand::{Rng, RngCore};

use crate::bits::BitWord;
use crate::error::{Error, Result};

/// A binary code as seen by the decoders: length, dimension, a linear
/// syndrome map, and an encoder.
pub trait BinaryCode: Send + Sync {
    fn n(&self) -> usize;

    /// Number of free information bits accepted by [`BinaryCode::encode`].
    fn k(&self) -> usize;

    fn name(&self) -> String;

    /// Number of bits in the syndrome (`n - k`).
    fn syndrome_len(&self) -> usize {
        self.n() - self.k()
    }

    /// Linear map that is zero exactly on codewords.
    fn syndrome(&self, word: &BitWord) -> Result<u128>;

    fn contains(&self, word: &BitWord) -> Result<bool> {
        Ok(self.syndrome(word)? == 0)
    }

    fn encode(&self, u: &BitWord) -> Result<BitWord>;

    /// Encodes uniformly random information bits.
    fn random_codeword(&self, rng: &mut dyn RngCore) -> BitWord {
        let k = self.k();
        let mut u = 0u128;
        for i in 0..k {
            if rng.random::<bool>() {
                u |= 1 << i;
            }
        }
        let u = BitWord::from_u128(u, k).expect("k <= 128");
        self.encode(&u).expect("information word has length k")
    }

    /// Syndromes of the unit vectors, indexed by position.
    fn column_syndromes(&self) -> Vec<u128> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut e = BitWord::zeros(n);
                e.set(i, true);
                self.syndrome(&e).expect("unit vector has length n")
            })
            .collect()
    }

    /// Rate `k/n`.
    fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }
}

pub(crate) fn check_len(word: &BitWord, expected: usize, what: &str) -> Result<()> {
    if word.len() != expected {
        return Err(Error::invalid(format!(
            "{what} has length {}, expected {expected}",
            word.len()
        )));
    }
    Ok(())
}

/// Either kind of code that the text format can describe.
#[derive(Debug, Clone)]
pub enum AnyCode {
    Linear(LinearCode),
    PolarCrc(PolarCrcCode),
}

impl AnyCode {
    pub fn as_code(&self) -> &dyn BinaryCode {
        match self {
            AnyCode::Linear(c) => c,
            AnyCode::PolarCrc(c) => c,
        }
    }
}

impl BinaryCode for AnyCode {
    fn n(&self) -> usize {
        self.as_code().n()
    }
    fn k(&self) -> usize {
        self.as_code().k()
    }
    fn name(&self) -> String {
        self.as_code().name()
    }
    fn syndrome(&self, word: &BitWord) -> Result<u128> {
        self.as_code().syndrome(word)
    }
    fn contains(&self, word: &BitWord) -> Result<bool> {
        self.as_code().contains(word)
    }
    fn encode(&self, u: &BitWord) -> Result<BitWord> {
        self.as_code().encode(u)
    }
}

/// Draws a uniformly random word of length `len`.
pub fn random_word<R: Rng + ?Sized>(len: usize, rng: &mut R) -> BitWord {
    let mut w = BitWord::zeros(len);
    for i in 0..len {
        if rng.random::<bool>() {
            w.set(i, true);
        }
    }
    w
}
