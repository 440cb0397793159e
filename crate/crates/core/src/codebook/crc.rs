use crate::bits::BitWord;
use crate::error::{Error, Result};

/// CRC generator in normal form: `poly` holds the coefficients of
/// `x^(width-1) … x^0`; the leading `x^width` term is implicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrcPoly {
    pub width: usize,
    pub poly: u64,
}

impl CrcPoly {
    /// CRC-10/ATM, `x^10 + x^9 + x^5 + x^4 + x + 1`.
    pub const CRC10_ATM: CrcPoly = CrcPoly {
        width: 10,
        poly: 0x233,
    };

    pub fn new(width: usize, poly: u64) -> Result<Self> {
        if width == 0 || width > 32 {
            return Err(Error::invalid(format!("CRC width {width} outside 1..=32")));
        }
        if poly >> width != 0 {
            return Err(Error::invalid(format!(
                "CRC polynomial {poly:#x} wider than {width} bits"
            )));
        }
        Ok(CrcPoly { width, poly })
    }
}

/// Remainder of `bits(x)·x^width` modulo the generator. Bit 0 of the message
/// is the highest-degree coefficient; bit 0 of the result is the coefficient
/// of `x^(width-1)`.
pub fn crc_remainder(bits: &BitWord, poly: CrcPoly) -> BitWord {
    let w = poly.width;
    let top = 1u64 << (w - 1);
    let mask = (1u64 << w) - 1;
    let mut reg = 0u64;
    for i in 0..bits.len() {
        let feedback = ((reg & top) != 0) ^ bits.get(i);
        reg = (reg << 1) & mask;
        if feedback {
            reg ^= poly.poly;
        }
    }
    let mut out = BitWord::zeros(w);
    for j in 0..w {
        if (reg >> (w - 1 - j)) & 1 == 1 {
            out.set(j, true);
        }
    }
    out
}
