//! Packed binary words of length at most 128.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use crate::error::{Error, Result};

pub const MAX_LEN: usize = 128;

/// A fixed-length binary vector. Position `i` is bit `i` of the packed word.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitWord {
    bits: u128,
    len: usize,
}

#[inline]
pub(crate) fn low_mask(len: usize) -> u128 {
    if len >= 128 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

impl BitWord {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_LEN, "BitWord length {len} exceeds {MAX_LEN}");
        BitWord { bits: 0, len }
    }

    pub fn ones(len: usize) -> Self {
        let mut w = Self::zeros(len);
        w.bits = low_mask(len);
        w
    }

    /// Builds a word from packed bits; bits above `len` must be clear.
    pub fn from_u128(bits: u128, len: usize) -> Result<Self> {
        if len > MAX_LEN {
            return Err(Error::invalid(format!("length {len} exceeds {MAX_LEN}")));
        }
        if bits & !low_mask(len) != 0 {
            return Err(Error::invalid("bits set beyond word length"));
        }
        Ok(BitWord { bits, len })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() > MAX_LEN {
            return Err(Error::invalid(format!(
                "length {} exceeds {MAX_LEN}",
                bits.len()
            )));
        }
        let mut w = 0u128;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => w |= 1 << i,
                _ => return Err(Error::invalid(format!("non-binary value {b} at {i}"))),
            }
        }
        Ok(BitWord {
            bits: w,
            len: bits.len(),
        })
    }

    /// Parses a string of `0`/`1` characters, position 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::invalid(format!("bad bit character {c:?}"))),
            })
            .collect::<Result<_>>()?;
        Self::from_bits(&bits)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn as_u128(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.bits >> i) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "position {i} out of range {}", self.len);
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "position {i} out of range {}", self.len);
        self.bits ^= 1 << i;
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Positions holding a one, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    /// Concatenation `self ∥ other`.
    pub fn concat(&self, other: &BitWord) -> Result<BitWord> {
        let len = self.len + other.len;
        if len > MAX_LEN {
            return Err(Error::invalid(format!("concatenated length {len} exceeds {MAX_LEN}")));
        }
        let hi = if self.len == 128 { 0 } else { other.bits << self.len };
        Ok(BitWord {
            bits: self.bits | hi,
            len,
        })
    }

    /// Sub-word of positions `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitWord {
        assert!(start + len <= self.len);
        let shifted = if start >= 128 { 0 } else { self.bits >> start };
        BitWord {
            bits: shifted & low_mask(len),
            len,
        }
    }

    /// Compares as bit strings, position 0 most significant.
    pub fn lex_cmp(&self, other: &BitWord) -> std::cmp::Ordering {
        let diff = self.bits ^ other.bits;
        if diff == 0 {
            return self.len.cmp(&other.len);
        }
        let first = diff.trailing_zeros() as usize;
        self.get(first).cmp(&other.get(first))
    }
}

impl BitXor for BitWord {
    type Output = BitWord;

    fn bitxor(self, rhs: BitWord) -> BitWord {
        assert_eq!(self.len, rhs.len, "xor of words with different lengths");
        BitWord {
            bits: self.bits ^ rhs.bits,
            len: self.len,
        }
    }
}

impl BitXorAssign for BitWord {
    fn bitxor_assign(&mut self, rhs: BitWord) {
        *self = *self ^ rhs;
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}
