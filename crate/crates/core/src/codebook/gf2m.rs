//! Arithmetic in GF(2^m) via exp/log tables, plus GF(2)[x] helpers.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GF2mField {
    m: u32,
    primitive_poly: u32,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl GF2mField {
    /// Builds the field; fails unless `primitive_poly` has degree `m` and is primitive.
    pub fn new(m: u32, primitive_poly: u32) -> Result<Self> {
        if !(2..=15).contains(&m) {
            return Err(Error::invalid(format!("extension degree {m} unsupported")));
        }
        if primitive_poly >> m != 1 {
            return Err(Error::invalid(format!(
                "polynomial {primitive_poly:#x} does not have degree {m}"
            )));
        }
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; order + 1];
        let mut seen = vec![false; order + 1];
        let mut x = 1u32;
        for i in 0..order {
            if seen[x as usize] {
                return Err(Error::invalid(format!(
                    "{primitive_poly:#x} is not primitive: alpha has order {i}"
                )));
            }
            seen[x as usize] = true;
            exp[i] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x >> m & 1 == 1 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            return Err(Error::invalid(format!("{primitive_poly:#x} is not primitive")));
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(GF2mField {
            m,
            primitive_poly,
            exp,
            log,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    pub fn order(&self) -> usize {
        (1usize << self.m) - 1
    }

    /// `α^e` for any integer exponent.
    pub fn alpha_pow(&self, e: i64) -> u16 {
        let ord = self.order() as i64;
        self.exp[e.rem_euclid(ord) as usize]
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    /// Cyclotomic coset of `e` modulo `2^m - 1`.
    pub fn cyclotomic_coset(&self, e: usize) -> Vec<usize> {
        let ord = self.order();
        let mut coset = vec![e % ord];
        let mut x = (2 * e) % ord;
        while x != coset[0] {
            coset.push(x);
            x = (2 * x) % ord;
        }
        coset
    }

    /// Minimal polynomial of `α^e` over GF(2), coefficient `i` in bit `i`.
    pub fn minimal_polynomial(&self, e: usize) -> u128 {
        // product of (x + α^c) over the coset, with GF(2^m) coefficients
        let mut coeffs: Vec<u16> = vec![1];
        for c in self.cyclotomic_coset(e) {
            let root = self.alpha_pow(c as i64);
            let mut next = vec![0u16; coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i + 1] ^= a;
                next[i] ^= self.mul(a, root);
            }
            coeffs = next;
        }
        let mut poly = 0u128;
        for (i, &c) in coeffs.iter().enumerate() {
            assert!(c <= 1, "minimal polynomial coefficient outside GF(2)");
            if c == 1 {
                poly |= 1 << i;
            }
        }
        poly
    }
}

pub fn poly_degree(p: u128) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(127 - p.leading_zeros())
    }
}

/// Carry-less product; panics if the result would exceed degree 127.
pub fn poly_mul(a: u128, b: u128) -> u128 {
    if let (Some(da), Some(db)) = (poly_degree(a), poly_degree(b)) {
        assert!(da + db < 128, "product degree exceeds 127");
    }
    let mut out = 0u128;
    let mut rest = b;
    while rest != 0 {
        let i = rest.trailing_zeros();
        out ^= a << i;
        rest &= rest - 1;
    }
    out
}

/// `(quotient, remainder)` of GF(2)[x] division.
pub fn poly_divmod(mut a: u128, b: u128) -> (u128, u128) {
    let db = poly_degree(b).expect("division by zero polynomial");
    let mut q = 0u128;
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        q |= 1 << (da - db);
        a ^= b << (da - db);
    }
    (q, a)
}

pub fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let (_, r) = poly_divmod(a, b);
        a = b;
        b = r;
    }
    a
}
