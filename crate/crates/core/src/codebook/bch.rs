use super::gf2m::{poly_degree, poly_gcd, poly_mul, GF2mField};
use super::LinearCode;
use crate::error::{Error, Result};

/// `x^7 + x^3 + 1`.
pub const GF128_PRIMITIVE_POLY: u32 = 0x89;

/// Generator polynomial of the narrow-sense binary BCH code of designed
/// distance `2t + 1`: the lcm of the minimal polynomials of `α, …, α^(2t)`.
pub fn bch_generator_poly(field: &GF2mField, t: usize) -> Result<u128> {
    if t == 0 || 2 * t >= field.order() {
        return Err(Error::invalid(format!("designed error correction t={t} out of range")));
    }
    let mut g = 1u128;
    for e in 1..=2 * t {
        let m = field.minimal_polynomial(e);
        // lcm(g, m) = g·m / gcd(g, m); minimal polynomials are irreducible
        if poly_gcd(g, m) == 1 {
            g = poly_mul(g, m);
        }
    }
    Ok(g)
}

/// Narrow-sense BCH code of length `2^m - 1` correcting `t` errors.
/// Row `i` of the generator is `x^i·g(x)`, so the code is cyclic.
pub fn bch_code(field: &GF2mField, t: usize) -> Result<LinearCode> {
    let n = field.order();
    if n > 127 {
        return Err(Error::invalid(format!("BCH length {n} exceeds 127")));
    }
    let g = bch_generator_poly(field, t)?;
    let r = poly_degree(g).expect("nonzero generator") as usize;
    let k = n - r;
    let rows = (0..k).map(|i| g << i).collect();
    LinearCode::from_generator(n, rows, format!("bch({n},{k})"))
}

pub fn build_bch_127_113() -> LinearCode {
    let field = GF2mField::new(7, GF128_PRIMITIVE_POLY).expect("x^7+x^3+1 is primitive");
    bch_code(&field, 2).expect("BCH(127,113) construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitWord;
    use crate::codebook::gf2m::poly_divmod;
    use crate::codebook::BinaryCode;
    use crate::rng::stream;
    use rand::Rng;

    fn field() -> GF2mField {
        GF2mField::new(7, GF128_PRIMITIVE_POLY).unwrap()
    }

    #[test]
    fn generator_degree_and_divisibility() {
        let g = bch_generator_poly(&field(), 2).unwrap();
        assert_eq!(poly_degree(g), Some(14));
        let x127_plus_1 = (1u128 << 127) | 1;
        assert_eq!(poly_divmod(x127_plus_1, g).1, 0);
        let code = build_bch_127_113();
        assert_eq!((code.n(), code.k()), (127, 113));
    }

    #[test]
    fn generator_roots_include_alpha_and_alpha3() {
        let f = field();
        let g = bch_generator_poly(&f, 2).unwrap();
        for e in 1..=4i64 {
            let root = f.alpha_pow(e);
            let mut acc = 0u16;
            let mut pow = 1u16;
            for i in 0..=14 {
                if (g >> i) & 1 == 1 {
                    acc ^= pow;
                }
                pow = f.mul(pow, root);
            }
            assert_eq!(acc, 0, "alpha^{e} is not a root");
        }
    }

    #[test]
    fn cyclic_shifts_stay_in_code() {
        let code = build_bch_127_113();
        let mut rng = stream(11, "bch-shift", 0);
        for _ in 0..1000 {
            let w = code.random_codeword(&mut rng);
            let s = rng.random_range(1..127);
            let b = w.as_u128();
            let mask = (1u128 << 127) - 1;
            let shifted = ((b << s) | (b >> (127 - s))) & mask;
            assert!(code.contains(&BitWord::from_u128(shifted, 127).unwrap()).unwrap());
        }
    }

    #[test]
    fn single_and_double_flips_are_detected() {
        let code = build_bch_127_113();
        let cols = code.column_syndromes();
        // d_min >= 5: no nonzero pattern of weight <= 4 has zero syndrome; check <= 2
        // exhaustively and that all weight-1 and weight-2 syndromes are distinct
        let mut seen = std::collections::HashSet::new();
        for i in 0..127 {
            assert_ne!(cols[i], 0);
            assert!(seen.insert(cols[i]));
            for j in i + 1..127 {
                assert_ne!(cols[i] ^ cols[j], 0);
                assert!(seen.insert(cols[i] ^ cols[j]));
            }
        }
        let mut rng = stream(4, "bch-flip", 0);
        for _ in 0..200 {
            let mut w = code.random_codeword(&mut rng);
            w.flip(rng.random_range(0..127));
            assert!(!code.contains(&w).unwrap());
        }
    }

    #[test]
    fn syndrome_matches_polynomial_remainder() {
        let code = build_bch_127_113();
        let g = bch_generator_poly(&field(), 2).unwrap();
        let mut rng = stream(8, "bch-rem", 0);
        for _ in 0..300 {
            let w = crate::codebook::random_word(127, &mut rng);
            let member = poly_divmod(w.as_u128(), g).1 == 0;
            assert_eq!(code.contains(&w).unwrap(), member);
        }
    }
}
