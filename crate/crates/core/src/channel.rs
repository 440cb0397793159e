//! BPSK over AWGN: modulation, noise, LLRs, hard decisions and per-bit flip
//! probabilities.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::error::{Error, Result};
use crate::grand::{rank_map, RankMap};

/// How an SNR in dB maps to the noise standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrConvention {
    /// `1/σ²` in dB (unit-energy BPSK symbols).
    PerSymbol,
    /// Eb/N0 in dB with the code rate folded in: `σ² = 1/(2·R·10^(snr/10))`.
    EbN0,
}

impl SnrConvention {
    pub fn label(&self) -> &'static str {
        match self {
            SnrConvention::PerSymbol => "per_symbol",
            SnrConvention::EbN0 => "ebn0",
        }
    }
}

impl std::str::FromStr for SnrConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_symbol" | "per-symbol" | "snr" | "esn0" => Ok(SnrConvention::PerSymbol),
            "ebn0" | "eb_n0" | "eb-n0" => Ok(SnrConvention::EbN0),
            _ => Err(Error::invalid(format!("unknown SNR convention {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub sigma: f64,
    pub snr_db: f64,
    pub convention: SnrConvention,
}

impl ChannelParams {
    pub fn new(snr_db: f64, rate: f64, convention: SnrConvention) -> Result<Self> {
        let sigma = sigma_from_snr(snr_db, rate, convention)?;
        Ok(ChannelParams {
            sigma,
            snr_db,
            convention,
        })
    }

    /// Parameters for a raw noise level; the reported SNR is per-symbol.
    pub fn from_sigma(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(ChannelParams {
            sigma,
            snr_db: -20.0 * sigma.log10(),
            convention: SnrConvention::PerSymbol,
        })
    }
}

pub fn sigma_from_snr(snr_db: f64, rate: f64, convention: SnrConvention) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::invalid(format!("code rate must lie in (0, 1], got {rate}")));
    }
    if !snr_db.is_finite() {
        return Err(Error::invalid("SNR must be finite"));
    }
    let linear = 10f64.powf(snr_db / 10.0);
    Ok(match convention {
        SnrConvention::PerSymbol => (1.0 / linear).sqrt(),
        SnrConvention::EbN0 => (1.0 / (2.0 * rate * linear)).sqrt(),
    })
}

/// Inverse of [`sigma_from_snr`].
pub fn snr_from_sigma(sigma: f64, rate: f64, convention: SnrConvention) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma must be positive"));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::invalid(format!("code rate must lie in (0, 1], got {rate}")));
    }
    let inv_var = 1.0 / (sigma * sigma);
    Ok(match convention {
        SnrConvention::PerSymbol => 10.0 * inv_var.log10(),
        SnrConvention::EbN0 => 10.0 * (inv_var / (2.0 * rate)).log10(),
    })
}

/// Bit 0 maps to +1, bit 1 to -1.
pub fn modulate_bpsk(w: &BitWord) -> Vec<f64> {
    (0..w.len())
        .map(|i| if w.get(i) { -1.0 } else { 1.0 })
        .collect()
}

pub fn transmit<R: Rng + ?Sized>(x: &[f64], params: &ChannelParams, rng: &mut R) -> Vec<f64> {
    x.iter()
        .map(|&xi| {
            let z: f64 = rng.sample(StandardNormal);
            xi + params.sigma * z
        })
        .collect()
}

pub fn compute_llr(y: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    let scale = 2.0 / (sigma * sigma);
    Ok(y.iter().map(|&v| scale * v).collect())
}

/// `θ(y) = 0` iff `y >= 0`.
pub fn hard_decision(y: &[f64]) -> BitWord {
    let mut w = BitWord::zeros(y.len());
    for (i, &v) in y.iter().enumerate() {
        if !(v >= 0.0) {
            w.set(i, true);
        }
    }
    w
}

/// Probability that the hard decision flipped a bit with reliability `|ℓ|`.
pub fn flip_probability(abs_llr: f64) -> Result<f64> {
    if !(abs_llr >= 0.0) {
        return Err(Error::invalid(format!(
            "flip probability needs |llr| >= 0, got {abs_llr}"
        )));
    }
    let e = (-abs_llr).exp();
    Ok(e / (1.0 + e))
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub(crate) fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// A channel output together with everything derived from it.
#[derive(Debug, Clone)]
pub struct SoftObservation {
    pub y: Vec<f64>,
    pub llr: Vec<f64>,
    pub abs_llr_sorted: Vec<f64>,
    pub ranks: RankMap,
}

impl SoftObservation {
    pub fn new(y: Vec<f64>, sigma: f64) -> Result<Self> {
        let llr = compute_llr(&y, sigma)?;
        let ranks = rank_map(&llr);
        let abs_llr_sorted = ranks
            .position_of
            .iter()
            .map(|&p| llr[p as usize].abs())
            .collect();
        Ok(SoftObservation {
            y,
            llr,
            abs_llr_sorted,
            ranks,
        })
    }

    pub fn hard_decision(&self) -> BitWord {
        hard_decision(&self.y)
    }

    /// Rank (1-based) of position `i`.
    pub fn rank_of(&self, i: usize) -> usize {
        self.ranks.rank_of[i] as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn bpsk_mapping() {
        let w = BitWord::parse("010").unwrap();
        assert_eq!(modulate_bpsk(&w), vec![1.0, -1.0, 1.0]);
        assert!(modulate_bpsk(&BitWord::zeros(5)).iter().all(|&v| v == 1.0));
        assert!(modulate_bpsk(&BitWord::ones(5)).iter().all(|&v| v == -1.0));
    }

    #[test]
    fn transmit_without_noise_is_identity() {
        let params = ChannelParams::from_sigma(1e-300).unwrap();
        let x = vec![1.0, -1.0, 1.0];
        let y = transmit(&x, &params, &mut stream(1, "t", 0));
        for (a, b) in x.iter().zip(&y) {
            assert_relative_eq!(a, b, epsilon = 1e-250);
        }
    }

    #[test]
    fn transmit_noise_moments() {
        let sigma = 0.7;
        let params = ChannelParams::from_sigma(sigma).unwrap();
        let n = 100_000;
        let x = vec![1.0; n];
        let y = transmit(&x, &params, &mut stream(3, "moments", 0));
        let d: Vec<f64> = y.iter().map(|v| v - 1.0).collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!(mean.abs() < 4.0 * sigma / (n as f64).sqrt());
        assert!((var / (sigma * sigma) - 1.0).abs() < 0.05);
    }

    #[test]
    fn transmit_is_deterministic() {
        let params = ChannelParams::from_sigma(0.5).unwrap();
        let x = vec![1.0; 16];
        let a = transmit(&x, &params, &mut stream(9, "t", 1));
        let b = transmit(&x, &params, &mut stream(9, "t", 1));
        assert_eq!(a, b);
    }

    #[test]
    fn llr_values() {
        assert_eq!(compute_llr(&[0.0], 1.0).unwrap(), vec![0.0]);
        assert_relative_eq!(compute_llr(&[1.0], 2f64.sqrt()).unwrap()[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(compute_llr(&[-0.5], 0.5).unwrap()[0], -4.0, epsilon = 1e-12);
        assert!(compute_llr(&[1.0], 0.0).is_err());
        assert!(compute_llr(&[1.0], -1.0).is_err());
    }

    #[test]
    fn hard_decisions() {
        assert_eq!(hard_decision(&[0.3, -0.3]).to_string(), "01");
        assert_eq!(hard_decision(&[0.0]).to_string(), "0");
        assert_eq!(hard_decision(&[-1.0, -2.0, -0.1]), BitWord::ones(3));
    }

    #[test]
    fn flip_probability_values() {
        assert_eq!(flip_probability(0.0).unwrap(), 0.5);
        assert_relative_eq!(flip_probability(3f64.ln()).unwrap(), 0.25, epsilon = 1e-15);
        // 1/(1+e^50) ≈ 1.9287e-22, evaluated independently as e^-50/(1+e^-50)
        let p = flip_probability(50.0).unwrap();
        assert!(p <= 2e-22 && p > 0.0);
        assert_relative_eq!(p, 1.928749847963918e-22, max_relative = 1e-12);
        let huge = flip_probability(1e6).unwrap();
        assert!(huge.is_finite() && huge >= 0.0);
        assert!(flip_probability(-0.1).is_err());
    }

    #[test]
    fn snr_conventions() {
        assert_relative_eq!(
            sigma_from_snr(0.0, 0.5, SnrConvention::PerSymbol).unwrap(),
            1.0
        );
        assert_relative_eq!(
            sigma_from_snr(10.0 * 2f64.log10(), 1.0, SnrConvention::PerSymbol).unwrap(),
            1.0 / 2f64.sqrt(),
            epsilon = 1e-12
        );
        let rate = 113.0 / 127.0;
        let s = sigma_from_snr(5.0, rate, SnrConvention::EbN0).unwrap();
        assert_relative_eq!(
            snr_from_sigma(s, rate, SnrConvention::EbN0).unwrap(),
            5.0,
            epsilon = 1e-12
        );
        assert!(sigma_from_snr(5.0, 0.0, SnrConvention::EbN0).is_err());
        assert!(sigma_from_snr(5.0, 1.5, SnrConvention::EbN0).is_err());
    }

    #[test]
    fn soft_observation_consistency() {
        let obs = SoftObservation::new(vec![0.3, -1.2, 0.05, 0.3, -0.7], 0.8).unwrap();
        for i in 0..obs.y.len() {
            assert_eq!(obs.abs_llr_sorted[obs.rank_of(i) - 1], obs.llr[i].abs());
        }
        assert!(obs.abs_llr_sorted.windows(2).all(|w| w[0] <= w[1]));
        // tie at positions 0 and 3 resolved by position
        assert!(obs.rank_of(0) < obs.rank_of(3));
    }

    proptest! {
        #[test]
        fn llr_is_linear(y in prop::collection::vec(-5.0f64..5.0, 1..20), c in 0.01f64..10.0, sigma in 0.1f64..3.0) {
            let scaled: Vec<f64> = y.iter().map(|v| c * v).collect();
            let a = compute_llr(&scaled, sigma).unwrap();
            let b = compute_llr(&y, sigma).unwrap();
            for (u, v) in a.iter().zip(&b) {
                prop_assert!((u - c * v).abs() <= 1e-9 * (1.0 + u.abs()));
            }
        }

        #[test]
        fn hard_decision_matches_llr_signs(y in prop::collection::vec(-5.0f64..5.0, 1..40), sigma in 0.1f64..3.0) {
            let llr = compute_llr(&y, sigma).unwrap();
            prop_assert_eq!(hard_decision(&y), hard_decision(&llr));
        }

        #[test]
        fn flip_probability_decreasing(a in 0.0f64..40.0, d in 1e-6f64..5.0) {
            let p = flip_probability(a).unwrap();
            let q = flip_probability(a + d).unwrap();
            prop_assert!(q < p);
            prop_assert!(p > 0.0 && p <= 0.5);
        }
    }
}
