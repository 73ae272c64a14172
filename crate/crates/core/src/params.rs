//! Parameter sets for the exchange laboratory.
//!
//! A [`ParamSet`] fixes the negacyclic ring R_q = Z_q[X]/(X^n + 1), the noise
//! level, and the default trapdoor prime. Well-known sets are registered with
//! stable one-byte identifiers used by the wire format; toy sets are
//! first-class so brute-force oracles can cross-check the full-size paths.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ntt::{is_prime, NttTables};

/// Largest supported modulus; the wire format stores coefficients as u16.
pub const MAX_Q: u64 = 1 << 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("ring dimension {0} is not a power of two")]
    DimensionNotPowerOfTwo(usize),
    #[error("modulus {0} must be an odd prime >= 3 and < 2^16")]
    BadModulus(u64),
    #[error("noise parameter {0} must be in 1..=32")]
    BadNoise(u32),
    #[error("trapdoor prime {p} must be an odd prime >= 4k+1 = {min}")]
    BadTrapdoorPrime { p: u64, min: u64 },
    #[error("unknown parameter set id {0}")]
    UnknownId(u8),
    #[error("unknown parameter set name {0:?}")]
    UnknownName(String),
}

/// Immutable description of one ring + noise configuration.
#[derive(Debug, Clone)]
pub struct ParamSet {
    name: String,
    id: u8,
    n: usize,
    q: u64,
    k_noise: u32,
    sigma: f64,
    p_trapdoor: u64,
    ntt: Option<NttTables>,
}

impl ParamSet {
    /// Validates the invariants and precomputes NTT tables when q ≡ 1 (mod 2n).
    pub fn new(
        name: impl Into<String>,
        id: u8,
        n: usize,
        q: u64,
        k_noise: u32,
        p_trapdoor: u64,
    ) -> Result<Self, ParamError> {
        if n == 0 || !n.is_power_of_two() {
            return Err(ParamError::DimensionNotPowerOfTwo(n));
        }
        if q < 3 || q >= MAX_Q || !is_prime(q) {
            return Err(ParamError::BadModulus(q));
        }
        if k_noise == 0 || k_noise > 32 {
            return Err(ParamError::BadNoise(k_noise));
        }
        let min_p = 4 * k_noise as u64 + 1;
        if p_trapdoor < min_p || p_trapdoor % 2 == 0 || !is_prime(p_trapdoor) {
            return Err(ParamError::BadTrapdoorPrime {
                p: p_trapdoor,
                min: min_p,
            });
        }
        let ntt = if (q - 1) % (2 * n as u64) == 0 {
            Some(NttTables::new(n, q))
        } else {
            None
        };
        Ok(ParamSet {
            name: name.into(),
            id,
            n,
            q,
            k_noise,
            // Reference Gaussian parameter matching the binomial variance k/2.
            sigma: (k_noise as f64 / 2.0).sqrt(),
            p_trapdoor,
            ntt,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn id(&self) -> u8 {
        self.id
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn k_noise(&self) -> u32 {
        self.k_noise
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn p_trapdoor(&self) -> u64 {
        self.p_trapdoor
    }

    /// NTT tables, present iff q ≡ 1 (mod 2n).
    pub fn ntt(&self) -> Option<&NttTables> {
        self.ntt.as_ref()
    }

    pub fn has_ntt(&self) -> bool {
        self.ntt.is_some()
    }

    /// Two sets are compatible when their ring agrees; noise settings ride along.
    pub fn same_ring(&self, other: &ParamSet) -> bool {
        self.n == other.n && self.q == other.q
    }
}

impl PartialEq for ParamSet {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.n == other.n
            && self.q == other.q
            && self.k_noise == other.k_noise
            && self.p_trapdoor == other.p_trapdoor
    }
}
impl Eq for ParamSet {}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={},q={})", self.name, self.n, self.q)
    }
}

/// Stable identifiers for the registered sets.
pub mod ids {
    pub const NEWHOPE_1024: u8 = 0;
    pub const TOY_8: u8 = 1;
    pub const TOY_16: u8 = 2;
    pub const TOY_256: u8 = 3;
    /// Same ring size as TOY_16 but with a modulus lacking a 2n-th root of
    /// unity, so only the schoolbook/Euclidean paths apply.
    pub const PLAIN_16: u8 = 4;
}

fn build(id: u8) -> Option<ParamSet> {
    let ps = match id {
        ids::NEWHOPE_1024 => ParamSet::new("newhope1024", id, 1024, 12289, 16, 67),
        ids::TOY_8 => ParamSet::new("toy8", id, 8, 17, 2, 11),
        ids::TOY_16 => ParamSet::new("toy16", id, 16, 97, 2, 11),
        ids::TOY_256 => ParamSet::new("toy256", id, 256, 12289, 16, 67),
        ids::PLAIN_16 => ParamSet::new("plain16", id, 16, 17, 2, 11),
        _ => return None,
    };
    Some(ps.expect("registered parameter sets are valid"))
}

/// Looks up a registered parameter set by wire id.
pub fn by_id(id: u8) -> Result<Arc<ParamSet>, ParamError> {
    build(id).map(Arc::new).ok_or(ParamError::UnknownId(id))
}

/// Looks up a registered parameter set by name (or decimal id).
pub fn by_name(name: &str) -> Result<Arc<ParamSet>, ParamError> {
    if let Ok(id) = name.parse::<u8>() {
        return by_id(id);
    }
    for id in [
        ids::NEWHOPE_1024,
        ids::TOY_8,
        ids::TOY_16,
        ids::TOY_256,
        ids::PLAIN_16,
    ] {
        let ps = build(id).unwrap();
        if ps.name() == name {
            return Ok(Arc::new(ps));
        }
    }
    Err(ParamError::UnknownName(name.to_string()))
}

/// Names of every registered set, in id order.
pub fn registered_names() -> Vec<&'static str> {
    vec!["newhope1024", "toy8", "toy16", "toy256", "plain16"]
}

/// Config echo of a parameter set for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEcho {
    pub name: String,
    pub id: u8,
    pub n: usize,
    pub q: u64,
    pub k_noise: u32,
    pub p_trapdoor: u64,
}

impl From<&ParamSet> for ParamEcho {
    fn from(p: &ParamSet) -> Self {
        ParamEcho {
            name: p.name().to_string(),
            id: p.id(),
            n: p.n(),
            q: p.q(),
            k_noise: p.k_noise(),
            p_trapdoor: p.p_trapdoor(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set_matches_published_constants() {
        let p = by_id(ids::NEWHOPE_1024).unwrap();
        assert_eq!((p.n(), p.q(), p.k_noise(), p.p_trapdoor()), (1024, 12289, 16, 67));
        assert!(p.has_ntt());
    }

    #[test]
    fn trapdoor_prime_is_smallest_admissible() {
        // 4*16 + 1 = 65 = 5*13 is composite; 67 is the next prime.
        assert!(!is_prime(65));
        assert!(!is_prime(66));
        assert!(is_prime(67));
    }

    #[test]
    fn rejects_bad_dimension_and_modulus() {
        assert_eq!(
            ParamSet::new("x", 200, 3, 17, 2, 11).unwrap_err(),
            ParamError::DimensionNotPowerOfTwo(3)
        );
        assert_eq!(
            ParamSet::new("x", 200, 4, 15, 2, 11).unwrap_err(),
            ParamError::BadModulus(15)
        );
        assert!(matches!(
            ParamSet::new("x", 200, 4, 17, 16, 63),
            Err(ParamError::BadTrapdoorPrime { .. })
        ));
    }

    #[test]
    fn plain16_has_no_ntt() {
        // 17 - 1 = 16 is not divisible by 2n = 32.
        let p = by_id(ids::PLAIN_16).unwrap();
        assert!(!p.has_ntt());
    }

    #[test]
    fn lookup_by_name_and_id_agree() {
        for name in registered_names() {
            let a = by_name(name).unwrap();
            let b = by_id(a.id()).unwrap();
            assert_eq!(a, b);
        }
        assert!(by_name("nope").is_err());
        assert!(by_id(99).is_err());
    }

    #[test]
    fn stable_ntt_root_for_newhope1024() {
        // Smallest primitive root of 12289 is 11; psi = 11^((q-1)/2048) = 11^6.
        let p = by_id(ids::NEWHOPE_1024).unwrap();
        assert_eq!(p.ntt().unwrap().psi, 1945);
    }
}
