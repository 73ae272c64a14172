//! Deterministic, seedable noise and generator sampling.
//!
//! All randomness flows through [`SeededRng`], a ChaCha20 stream keyed by a
//! 256-bit seed with a 64-bit stream index. Identical (seed, stream) always
//! replays the identical byte sequence; distinct stream indices select
//! non-overlapping keystreams, which is what lets concurrent trials stay
//! reproducible. The generator algorithm is fixed per major version; nothing
//! downstream depends on specific stream values, only on replay and on the
//! distributional properties tested here.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::params::ParamSet;
use crate::ring::{CenteredPoly, RingElement};
use std::sync::Arc;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("requested weight {weight} exceeds dimension {n}")]
    WeightTooLarge { weight: usize, n: usize },
    #[error("sigma must be positive, got {0}")]
    BadSigma(f64),
    #[error("seed must be 64 hex characters, got {0:?}")]
    BadSeedHex(String),
}

/// Counter-based seeded stream generator; value semantics, explicit state.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: [u8; 32],
    stream: u64,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: [u8; 32], stream: u64) -> Self {
        let mut inner = ChaCha20Rng::from_seed(seed);
        inner.set_stream(stream);
        SeededRng {
            seed,
            stream,
            inner,
        }
    }

    /// Parses a 64-hex-character seed.
    pub fn seed_from_hex(s: &str) -> Result<[u8; 32], SampleError> {
        let raw = hex::decode(s.trim()).map_err(|_| SampleError::BadSeedHex(s.to_string()))?;
        let arr: [u8; 32] = raw
            .try_into()
            .map_err(|_| SampleError::BadSeedHex(s.to_string()))?;
        Ok(arr)
    }

    pub fn seed(&self) -> [u8; 32] {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A sibling generator on a different stream of the same seed.
    pub fn fork(&self, stream: u64) -> Self {
        SeededRng::new(self.seed, stream)
    }

    pub fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    /// Unbiased draw from [0, bound) by rejection on 32-bit words.
    pub fn below(&mut self, bound: u32) -> u32 {
        debug_assert!(bound > 0);
        let zone = u32::MAX - u32::MAX % bound;
        loop {
            let v = self.next_u32();
            if v < zone {
                return v % bound;
            }
        }
    }

    pub fn bit(&mut self) -> bool {
        self.next_u32() & 1 == 1
    }
}

/// A small polynomial drawn from the centered binomial; every coefficient
/// lies in [-k, k].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoisePoly {
    poly: CenteredPoly,
    k: u32,
}

impl NoisePoly {
    pub fn coeffs(&self) -> &[i64] {
        self.poly.coeffs()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn centered(&self) -> &CenteredPoly {
        &self.poly
    }

    pub fn to_ring(&self, param: &Arc<ParamSet>) -> RingElement {
        self.poly.to_ring(param)
    }

    /// All-zero noise; handy for algebra checks.
    pub fn zero(param: &Arc<ParamSet>) -> Self {
        NoisePoly {
            poly: CenteredPoly::zero(param.n()),
            k: param.k_noise(),
        }
    }
}

/// Each coefficient independently uniform on [0, q), by rejection from
/// fixed-width 16-bit draws.
pub fn sample_uniform_ring(rng: &mut SeededRng, param: &Arc<ParamSet>) -> RingElement {
    let q = param.q() as u32;
    let zone = (1u32 << 16) - (1u32 << 16) % q;
    let coeffs: Vec<u64> = (0..param.n())
        .map(|_| loop {
            let v = rng.next_u32() & 0xFFFF;
            if v < zone {
                break (v % q) as u64;
            }
        })
        .collect();
    RingElement::from_coeffs(param, coeffs).expect("sampled coefficients are in range")
}

/// Centered binomial psi_k: each coefficient is a sum of k fair-bit
/// differences, so the range is [-k, k] inclusive and the variance is k/2.
pub fn sample_psi_k(rng: &mut SeededRng, param: &Arc<ParamSet>) -> NoisePoly {
    let k = param.k_noise();
    debug_assert!(k <= 32);
    let mask: u64 = if k == 32 { u64::MAX >> 32 } else { (1u64 << k) - 1 };
    let coeffs: Vec<i64> = (0..param.n())
        .map(|_| {
            let word = rng.next_u64();
            let a = (word & mask).count_ones() as i64;
            let b = ((word >> 32) & mask).count_ones() as i64;
            a - b
        })
        .collect();
    NoisePoly {
        poly: CenteredPoly::new(coeffs),
        k,
    }
}

/// Exactly `weight` nonzero coefficients, each +-1 with equal probability,
/// positions uniform without replacement (partial Fisher-Yates).
pub fn sample_sparse_ternary(
    rng: &mut SeededRng,
    n: usize,
    weight: usize,
) -> Result<CenteredPoly, SampleError> {
    if weight > n {
        return Err(SampleError::WeightTooLarge { weight, n });
    }
    let mut positions: Vec<usize> = (0..n).collect();
    let mut coeffs = vec![0i64; n];
    for i in 0..weight {
        let j = i + rng.below((n - i) as u32) as usize;
        positions.swap(i, j);
        coeffs[positions[i]] = if rng.bit() { 1 } else { -1 };
    }
    Ok(CenteredPoly::new(coeffs))
}

/// Reference Gaussian weight exp(-x^2 / 2 sigma^2); not used by the protocol
/// sampler, which draws from psi_k.
pub fn gaussian_weight(x: i64, sigma: f64) -> Result<f64, SampleError> {
    if !(sigma > 0.0) {
        return Err(SampleError::BadSigma(sigma));
    }
    let x = x as f64;
    Ok((-x * x / (2.0 * sigma * sigma)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params;

    fn test_seed() -> [u8; 32] {
        *b"sampling-module-unit-test-seed!!"
    }

    #[test]
    fn identical_seed_and_stream_replay() {
        let p = params::by_id(params::ids::TOY_256).unwrap();
        let a = sample_uniform_ring(&mut SeededRng::new(test_seed(), 7), &p);
        let b = sample_uniform_ring(&mut SeededRng::new(test_seed(), 7), &p);
        assert_eq!(a, b);
        let c = sample_uniform_ring(&mut SeededRng::new(test_seed(), 8), &p);
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_outputs_in_range() {
        let p = params::by_id(params::ids::TOY_8).unwrap();
        let mut rng = SeededRng::new(test_seed(), 0);
        for _ in 0..200 {
            let x = sample_uniform_ring(&mut rng, &p);
            assert!(x.coeffs().iter().all(|&c| (c as u64) < p.q()));
        }
    }

    #[test]
    fn uniform_chi_square_at_q17() {
        // 10^5 draws over 17 cells; chi-square must sit inside the 99.9%
        // acceptance band (upper quantile of chi2 with 16 dof = 39.252).
        let p = params::by_id(params::ids::TOY_8).unwrap();
        let mut rng = SeededRng::new(test_seed(), 1);
        let draws = 100_000usize;
        let mut counts = [0u64; 17];
        let mut produced = 0;
        'outer: loop {
            let x = sample_uniform_ring(&mut rng, &p);
            for &c in x.coeffs() {
                counts[c as usize] += 1;
                produced += 1;
                if produced == draws {
                    break 'outer;
                }
            }
        }
        let expected = draws as f64 / 17.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 39.252, "chi2 = {chi2}");
    }

    #[test]
    fn psi_k_range_and_sum_window() {
        let p = params::by_id(params::ids::NEWHOPE_1024).unwrap();
        let mut rng = SeededRng::new(test_seed(), 2);
        for _ in 0..20 {
            let s = sample_psi_k(&mut rng, &p);
            let e = sample_psi_k(&mut rng, &p);
            assert!(s.coeffs().iter().all(|&c| c.abs() <= 16));
            let sum = s.centered().add(e.centered());
            assert!(sum.coeffs().iter().all(|&c| (-32..=32).contains(&c)));
        }
    }

    #[test]
    fn psi_k_moments() {
        let p = params::by_id(params::ids::NEWHOPE_1024).unwrap();
        let mut rng = SeededRng::new(test_seed(), 3);
        let mut values = Vec::with_capacity(100_000);
        while values.len() < 100_000 {
            values.extend_from_slice(sample_psi_k(&mut rng, &p).coeffs());
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<i64>() as f64 / n;
        let var = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.05, "mean = {mean}");
        assert!((var - 8.0).abs() < 0.4, "variance = {var}"); // k/2 = 8, +-5%
    }

    #[test]
    fn sparse_ternary_contract() {
        let mut rng = SeededRng::new(test_seed(), 4);
        let zero = sample_sparse_ternary(&mut rng, 16, 0).unwrap();
        assert!(zero.coeffs().iter().all(|&c| c == 0));
        for weight in [1usize, 2, 5, 16] {
            let s = sample_sparse_ternary(&mut rng, 16, weight).unwrap();
            assert_eq!(s.nonzero_count(), weight);
            assert_eq!(s.l1_norm(), weight as i64);
        }
        assert_eq!(
            sample_sparse_ternary(&mut rng, 4, 5).unwrap_err(),
            SampleError::WeightTooLarge { weight: 5, n: 4 }
        );
    }

    #[test]
    fn gaussian_weight_reference_values() {
        let sigma = 2.0f64;
        assert_eq!(gaussian_weight(0, sigma).unwrap(), 1.0);
        let w = gaussian_weight(2, 2.0).unwrap();
        assert!((w - (-0.5f64).exp()).abs() < 1e-9);
        assert_eq!(
            gaussian_weight(3, sigma).unwrap(),
            gaussian_weight(-3, sigma).unwrap()
        );
        assert!(matches!(
            gaussian_weight(1, 0.0),
            Err(SampleError::BadSigma(_))
        ));
    }

    #[test]
    fn seed_hex_parsing() {
        let hex64 = "00112233445566778899aabbccddeeff00112233445566778899aabbccddeeff";
        let seed = SeededRng::seed_from_hex(hex64).unwrap();
        assert_eq!(seed[0], 0x00);
        assert_eq!(seed[31], 0xff);
        assert!(SeededRng::seed_from_hex("abcd").is_err());
        assert!(SeededRng::seed_from_hex("zz").is_err());
    }
}
