//! CRC-aided polar codes.
//!
//! Encoding places `payload ∥ crc(payload)` on the information positions,
//! zeros on the frozen positions, and applies `x = u·F^{⊗m}` with
//! `F = [[1,0],[1,1]]` in natural order. Since the transform is an involution
//! over GF(2), membership checks transform the word back and look at the
//! frozen bits and the CRC.

use super::crc::{crc_remainder, CrcPoly};
use super::{check_len, BinaryCode};
use crate::bits::BitWord;
use crate::error::{Error, Result};

/// `v·F^{⊗m}` for a word whose length is a power of two.
pub fn polar_transform(v: &BitWord) -> Result<BitWord> {
    let n = v.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid(format!("polar transform length {n} is not a power of two")));
    }
    let mut x = v.as_u128();
    let mut h = 1;
    while h < n {
        // positions j with bit h clear absorb position j + h
        let mut lower = 0u128;
        let mut j = 0;
        while j < n {
            lower |= crate::bits::low_mask(h) << j;
            j += 2 * h;
        }
        x ^= (x >> h) & lower;
        h *= 2;
    }
    BitWord::from_u128(x, n)
}

/// `ln φ(x)` for the Gaussian-approximation function φ (Chung et al. fit).
fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 10.0 {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

/// Solves `ln φ(x) = target` for `x > 0`.
fn ln_phi_inverse(target: f64) -> f64 {
    if target >= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while ln_phi(hi) > target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Mean LLR of each synthetic channel under density evolution with the
/// Gaussian approximation; larger is more reliable.
pub fn ga_channel_means(n: usize, sigma: f64) -> Vec<f64> {
    assert!(n.is_power_of_two());
    let mut means = vec![2.0 / (sigma * sigma)];
    while means.len() < n {
        let check: Vec<f64> = means
            .iter()
            .map(|&m| {
                // φ^{-1}(1 - (1 - φ(m))^2) = φ^{-1}(φ(m)·(2 - φ(m)))
                let lp = ln_phi(m);
                ln_phi_inverse(lp + (2.0 - lp.exp()).ln())
            })
            .collect();
        let var: Vec<f64> = means.iter().map(|&m| 2.0 * m).collect();
        means = check.into_iter().chain(var).collect();
    }
    means
}

/// Positions sorted from least to most reliable.
pub fn polar_reliability_order(n: usize, design_snr_db: f64) -> Vec<usize> {
    let sigma = 10f64.powf(-design_snr_db / 20.0);
    let means = ga_channel_means(n, sigma);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then(a.cmp(&b)));
    order
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarCrcCode {
    n: usize,
    info_positions: Vec<usize>,
    frozen: Vec<usize>,
    crc: CrcPoly,
    payload_len: usize,
    design_snr_db: Option<f64>,
}

impl PolarCrcCode {
    /// Builds from an explicit frozen set.
    pub fn from_frozen(n: usize, mut frozen: Vec<usize>, crc: CrcPoly) -> Result<Self> {
        if !n.is_power_of_two() || n > 128 {
            return Err(Error::invalid(format!("polar length {n} must be a power of two <= 128")));
        }
        frozen.sort_unstable();
        frozen.dedup();
        if frozen.iter().any(|&f| f >= n) {
            return Err(Error::invalid("frozen index out of range"));
        }
        let info_positions: Vec<usize> = (0..n).filter(|i| frozen.binary_search(i).is_err()).collect();
        if info_positions.len() <= crc.width {
            return Err(Error::invalid("not enough information positions for the CRC"));
        }
        let payload_len = info_positions.len() - crc.width;
        Ok(PolarCrcCode {
            n,
            info_positions,
            frozen,
            crc,
            payload_len,
            design_snr_db: None,
        })
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn frozen_positions(&self) -> &[usize] {
        &self.frozen
    }

    pub fn crc(&self) -> CrcPoly {
        self.crc
    }

    pub fn payload_len(&self) -> usize {
        self.payload_len
    }

    pub fn design_snr_db(&self) -> Option<f64> {
        self.design_snr_db
    }

    /// Recovers the payload of a codeword.
    pub fn payload(&self, word: &BitWord) -> Result<BitWord> {
        check_len(word, self.n, "word")?;
        let u = polar_transform(word)?;
        let mut p = BitWord::zeros(self.payload_len);
        for (j, &pos) in self.info_positions[..self.payload_len].iter().enumerate() {
            p.set(j, u.get(pos));
        }
        Ok(p)
    }

    /// Membership as written: frozen bits zero and CRC consistent.
    pub fn contains_direct(&self, word: &BitWord) -> Result<bool> {
        check_len(word, self.n, "word")?;
        let u = polar_transform(word)?;
        if self.frozen.iter().any(|&f| u.get(f)) {
            return Ok(false);
        }
        let (payload, crc) = self.split_info(&u);
        Ok(crc_remainder(&payload, self.crc) == crc)
    }

    fn split_info(&self, u: &BitWord) -> (BitWord, BitWord) {
        let mut payload = BitWord::zeros(self.payload_len);
        let mut crc = BitWord::zeros(self.crc.width);
        for (j, &pos) in self.info_positions.iter().enumerate() {
            if j < self.payload_len {
                payload.set(j, u.get(pos));
            } else {
                crc.set(j - self.payload_len, u.get(pos));
            }
        }
        (payload, crc)
    }
}

/// CRC-aided polar code whose frozen set holds the `n - payload_len - crc.width`
/// least reliable channels at `design_snr_db` (per-symbol SNR).
pub fn build_polar_crc(
    n: usize,
    payload_len: usize,
    crc: CrcPoly,
    design_snr_db: f64,
) -> Result<PolarCrcCode> {
    if !n.is_power_of_two() || n > 128 {
        return Err(Error::invalid(format!("polar length {n} must be a power of two <= 128")));
    }
    let info = payload_len + crc.width;
    if info > n {
        return Err(Error::invalid("payload plus CRC exceeds block length"));
    }
    let order = polar_reliability_order(n, design_snr_db);
    let frozen = order[..n - info].to_vec();
    let mut code = PolarCrcCode::from_frozen(n, frozen, crc)?;
    code.design_snr_db = Some(design_snr_db);
    Ok(code)
}

impl PolarCrcCode {
    /// The (128, 114) configuration: 104 payload bits plus CRC-10.
    pub fn standard_128_114(design_snr_db: f64) -> PolarCrcCode {
        build_polar_crc(128, 104, CrcPoly::CRC10_ATM, design_snr_db).expect("valid parameters")
    }
}

impl BinaryCode for PolarCrcCode {
    fn n(&self) -> usize {
        self.n
    }

    fn k(&self) -> usize {
        self.payload_len
    }

    fn name(&self) -> String {
        format!("polar_crc({},{})", self.n, self.info_positions.len())
    }

    /// Frozen bits of the inverse transform, then the CRC mismatch.
    fn syndrome(&self, word: &BitWord) -> Result<u128> {
        check_len(word, self.n, "word")?;
        let u = polar_transform(word)?;
        let mut s = 0u128;
        for (j, &f) in self.frozen.iter().enumerate() {
            s |= (u.get(f) as u128) << j;
        }
        let (payload, crc) = self.split_info(&u);
        let mismatch = crc_remainder(&payload, self.crc) ^ crc;
        Ok(s | (mismatch.as_u128() << self.frozen.len()))
    }

    fn encode(&self, payload: &BitWord) -> Result<BitWord> {
        check_len(payload, self.payload_len, "payload")?;
        let info = payload.concat(&crc_remainder(payload, self.crc))?;
        let mut u = BitWord::zeros(self.n);
        for (j, &pos) in self.info_positions.iter().enumerate() {
            u.set(pos, info.get(j));
        }
        polar_transform(&u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    /// Dense `v·F^{⊗m}` via explicit Kronecker powers.
    fn transform_oracle(v: &[u8]) -> Vec<u8> {
        let n = v.len();
        let mut f = vec![vec![1u8]];
        while f.len() < n {
            let s = f.len();
            let mut g = vec![vec![0u8; 2 * s]; 2 * s];
            for i in 0..s {
                for j in 0..s {
                    g[i][j] = f[i][j];
                    g[i + s][j] = f[i][j];
                    g[i + s][j + s] = f[i][j];
                }
            }
            f = g;
        }
        (0..n)
            .map(|j| (0..n).fold(0, |acc, i| acc ^ (v[i] & f[i][j])))
            .collect()
    }

    #[test]
    fn two_point_transform() {
        let t = |s: &str| polar_transform(&BitWord::parse(s).unwrap()).unwrap().to_string();
        assert_eq!(t("10"), "10");
        assert_eq!(t("01"), "11");
        assert_eq!(t("0000"), "0000");
        assert!(polar_transform(&BitWord::zeros(6)).is_err());
    }

    #[test]
    fn transform_matches_kronecker_oracle() {
        let mut rng = stream(1, "polar-oracle", 0);
        for n in [2usize, 4, 8, 16, 32, 128] {
            for _ in 0..5 {
                let v = crate::codebook::random_word(n, &mut rng);
                let got = polar_transform(&v).unwrap();
                assert_eq!(got.to_bits(), transform_oracle(&v.to_bits()));
            }
        }
    }

    proptest! {
        #[test]
        fn transform_is_involution(bits in any::<u128>()) {
            let v = BitWord::from_u128(bits, 128).unwrap();
            prop_assert_eq!(polar_transform(&polar_transform(&v).unwrap()).unwrap(), v);
        }
    }

    #[test]
    fn standard_code_shape() {
        let c = PolarCrcCode::standard_128_114(6.0);
        assert_eq!(c.info_positions().len(), 114);
        assert_eq!(c.frozen_positions().len(), 14);
        assert_eq!(c.payload_len(), 104);
        assert_eq!(c.syndrome_len(), 24);
        // u_0 sees the worst synthetic channel and u_{n-1} the best
        assert!(c.frozen_positions().contains(&0));
        assert!(c.info_positions().contains(&127));
        assert_eq!(c.encode(&BitWord::zeros(104)).unwrap(), BitWord::zeros(128));
    }

    #[test]
    fn reliability_respects_partial_order() {
        // flipping a 0 bit of the index to 1 never makes a channel less reliable
        let means = ga_channel_means(128, 10f64.powf(-6.0 / 20.0));
        for i in 0..128usize {
            for b in 0..7 {
                if i & (1 << b) == 0 {
                    assert!(means[i | (1 << b)] >= means[i] * (1.0 - 1e-9));
                }
            }
        }
    }

    #[test]
    fn encodes_pass_membership_and_payload_round_trips() {
        let c = PolarCrcCode::standard_128_114(6.0);
        let mut rng = stream(2, "polar-enc", 0);
        for _ in 0..1000 {
            let p = crate::codebook::random_word(104, &mut rng);
            let w = c.encode(&p).unwrap();
            assert!(c.contains(&w).unwrap());
            assert!(c.contains_direct(&w).unwrap());
            assert_eq!(c.payload(&w).unwrap(), p);
        }
    }

    #[test]
    fn every_single_flip_is_detected() {
        let c = PolarCrcCode::standard_128_114(6.0);
        let mut rng = stream(3, "polar-flip", 0);
        for _ in 0..100 {
            let w = c.random_codeword(&mut rng);
            for i in 0..128 {
                let mut bad = w;
                bad.flip(i);
                assert!(!c.contains_direct(&bad).unwrap());
                assert!(!c.contains(&bad).unwrap());
            }
        }
    }

    #[test]
    fn syndrome_membership_agrees_with_direct_check() {
        let c = PolarCrcCode::standard_128_114(6.0);
        let mut rng = stream(4, "polar-syn", 0);
        for _ in 0..500 {
            let mut w = c.random_codeword(&mut rng);
            for _ in 0..rand::Rng::random_range(&mut rng, 0..3) {
                w.flip(rand::Rng::random_range(&mut rng, 0..128));
            }
            assert_eq!(c.contains(&w).unwrap(), c.contains_direct(&w).unwrap());
        }
    }
}
