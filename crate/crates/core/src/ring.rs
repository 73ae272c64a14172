//! Exact arithmetic in R_q = Z_q[X]/(X^n + 1) and the toy cyclic ring
//! Z_q[X]/(X^N - 1).
//!
//! Canonical elements keep coefficients in [0, q). Centered representatives
//! over Z are a distinct type ([`CenteredPoly`]) so the two views cannot be
//! mixed by accident; the recovery math depends on which one is in hand.
//!
//! Division is always multiplication by a computed inverse. A missing inverse
//! is a value ([`None`]), never an approximation.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::params::ParamSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("operands use different parameter sets ({0} vs {1})")]
    ParamMismatch(String, String),
    #[error("parameter set {0} has no NTT support (q != 1 mod 2n)")]
    NttUnsupported(String),
    #[error("{value} is not invertible modulo {q}")]
    NotCoprime { value: u64, q: u64 },
    #[error("coefficient {value} at index {index} out of range for q = {q}")]
    CoeffRange { index: usize, value: u64, q: u64 },
    #[error("expected {expected} coefficients, got {got}")]
    Length { expected: usize, got: usize },
    #[error("cyclic ring mismatch: (N={0}, q={1}) vs (N={2}, q={3})")]
    CyclicMismatch(usize, u64, usize, u64),
}

/// Inverse of `c` modulo `q` via the extended Euclidean algorithm.
pub fn scalar_inverse(c: u64, q: u64) -> Result<u64, RingError> {
    let (mut r0, mut r1) = (q as i128, (c % q) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let quot = r0 / r1;
        (r0, r1) = (r1, r0 - quot * r1);
        (t0, t1) = (t1, t0 - quot * t1);
    }
    if r0 != 1 {
        return Err(RingError::NotCoprime { value: c % q, q });
    }
    Ok(t0.rem_euclid(q as i128) as u64)
}

/// An element of R_q with coefficients in canonical [0, q) form.
#[derive(Debug, Clone)]
pub struct RingElement {
    param: Arc<ParamSet>,
    coeffs: Vec<u16>,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.param.same_ring(&other.param) && self.coeffs == other.coeffs
    }
}
impl Eq for RingElement {}

impl RingElement {
    pub fn zero(param: &Arc<ParamSet>) -> Self {
        RingElement {
            param: param.clone(),
            coeffs: vec![0; param.n()],
        }
    }

    pub fn one(param: &Arc<ParamSet>) -> Self {
        Self::monomial(param, 0)
    }

    /// X^k (k < n).
    pub fn monomial(param: &Arc<ParamSet>, k: usize) -> Self {
        let mut coeffs = vec![0u16; param.n()];
        coeffs[k] = 1;
        RingElement {
            param: param.clone(),
            coeffs,
        }
    }

    /// Validates length and range.
    pub fn from_coeffs(param: &Arc<ParamSet>, coeffs: Vec<u64>) -> Result<Self, RingError> {
        if coeffs.len() != param.n() {
            return Err(RingError::Length {
                expected: param.n(),
                got: coeffs.len(),
            });
        }
        let q = param.q();
        for (index, &value) in coeffs.iter().enumerate() {
            if value >= q {
                return Err(RingError::CoeffRange { index, value, q });
            }
        }
        Ok(RingElement {
            param: param.clone(),
            coeffs: coeffs.into_iter().map(|c| c as u16).collect(),
        })
    }

    /// Constant polynomial c mod q.
    pub fn constant(param: &Arc<ParamSet>, c: i64) -> Self {
        let q = param.q() as i64;
        let mut coeffs = vec![0u16; param.n()];
        coeffs[0] = c.rem_euclid(q) as u16;
        RingElement {
            param: param.clone(),
            coeffs,
        }
    }

    pub fn param(&self) -> &Arc<ParamSet> {
        &self.param
    }

    pub fn coeffs(&self) -> &[u16] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs[i] as u64
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_same(&self, other: &Self) -> Result<(), RingError> {
        if self.param.same_ring(&other.param) {
            Ok(())
        } else {
            Err(RingError::ParamMismatch(
                self.param.to_string(),
                other.param.to_string(),
            ))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, RingError> {
        self.check_same(other)?;
        let q = self.param.q();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u64 + b as u64) % q) as u16)
            .collect();
        Ok(RingElement {
            param: self.param.clone(),
            coeffs,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, RingError> {
        self.check_same(other)?;
        let q = self.param.q();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u64 + q - b as u64) % q) as u16)
            .collect();
        Ok(RingElement {
            param: self.param.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        let q = self.param.q();
        RingElement {
            param: self.param.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|&a| ((q - a as u64) % q) as u16)
                .collect(),
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        let q = self.param.q();
        let c = c % q;
        RingElement {
            param: self.param.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|&a| (a as u64 * c % q) as u16)
                .collect(),
        }
    }

    /// Product via the O(n^2) schoolbook path with negacyclic reduction.
    /// Always available; the reference against which the NTT path is checked.
    pub fn mul_schoolbook(&self, other: &Self) -> Result<Self, RingError> {
        self.check_same(other)?;
        let n = self.param.n();
        let q = self.param.q() as i64;
        // n * q^2 < 2^63 for every supported parameter set, so raw products
        // accumulate without intermediate reduction.
        let mut acc = vec![0i64; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let a = a as i64;
            for (j, &b) in other.coeffs.iter().enumerate() {
                let prod = a * b as i64;
                let k = i + j;
                if k < n {
                    acc[k] += prod;
                } else {
                    acc[k - n] -= prod; // X^n = -1
                }
            }
        }
        let coeffs = acc.iter().map(|&c| c.rem_euclid(q) as u16).collect();
        Ok(RingElement {
            param: self.param.clone(),
            coeffs,
        })
    }

    /// Product via the number-theoretic transform. Identical output to
    /// [`Self::mul_schoolbook`]; errors when the parameters lack a 2n-th
    /// root of unity.
    pub fn mul_ntt(&self, other: &Self) -> Result<Self, RingError> {
        self.check_same(other)?;
        let tables = self
            .param
            .ntt()
            .ok_or_else(|| RingError::NttUnsupported(self.param.to_string()))?;
        let a = tables.forward(&self.coeffs_u64());
        let b = tables.forward(&other.coeffs_u64());
        let c = tables.inverse(&tables.pointwise(&a, &b));
        Ok(RingElement {
            param: self.param.clone(),
            coeffs: c.into_iter().map(|x| x as u16).collect(),
        })
    }

    /// Product; dispatches to the NTT when supported, schoolbook otherwise.
    pub fn try_mul(&self, other: &Self) -> Result<Self, RingError> {
        if self.param.has_ntt() {
            self.mul_ntt(other)
        } else {
            self.mul_schoolbook(other)
        }
    }

    /// Multiplicative inverse, or `None` when the element is a zero divisor.
    /// Dispatches to the NTT path when available, else the Euclidean path.
    pub fn inverse(&self) -> Option<Self> {
        if self.param.has_ntt() {
            self.inverse_ntt().expect("NTT support just checked")
        } else {
            self.inverse_euclid()
        }
    }

    /// Inverse via pointwise inversion in the evaluation domain: invertible
    /// iff no NTT component is zero.
    pub fn inverse_ntt(&self) -> Result<Option<Self>, RingError> {
        let tables = self
            .param
            .ntt()
            .ok_or_else(|| RingError::NttUnsupported(self.param.to_string()))?;
        let q = self.param.q();
        let evals = tables.forward(&self.coeffs_u64());
        if evals.iter().any(|&e| e == 0) {
            return Ok(None);
        }
        let inv: Vec<u64> = evals
            .iter()
            .map(|&e| scalar_inverse(e, q).expect("nonzero residue mod prime"))
            .collect();
        let coeffs = tables.inverse(&inv);
        Ok(Some(RingElement {
            param: self.param.clone(),
            coeffs: coeffs.into_iter().map(|x| x as u16).collect(),
        }))
    }

    /// Inverse via the extended Euclidean algorithm over Z_q[X] against
    /// X^n + 1. Works for every prime q.
    pub fn inverse_euclid(&self) -> Option<Self> {
        let n = self.param.n();
        let q = self.param.q();
        // modulus polynomial X^n + 1
        let mut modulus = vec![0u64; n + 1];
        modulus[0] = 1;
        modulus[n] = 1;
        let elem = self.coeffs_u64();
        let (g, t) = poly_ext_gcd(&modulus, &elem, q);
        if poly_degree(&g) != Some(0) {
            return None;
        }
        let scale = scalar_inverse(g[0], q).expect("nonzero leading coefficient");
        let mut coeffs = vec![0u16; n];
        for (i, &c) in t.iter().enumerate() {
            if c != 0 {
                debug_assert!(i < n, "ext-gcd cofactor degree bound violated");
                coeffs[i] = (c * scale % q) as u16;
            }
        }
        Some(RingElement {
            param: self.param.clone(),
            coeffs,
        })
    }

    /// Sum of coefficients mod q, i.e. the polynomial evaluated at 1.
    pub fn eval_at_one(&self) -> u64 {
        let q = self.param.q();
        self.coeffs.iter().fold(0u64, |acc, &c| (acc + c as u64) % q)
    }

    /// Centered lift: each coefficient mapped to [-(q-1)/2, (q-1)/2].
    pub fn centered(&self) -> CenteredPoly {
        let q = self.param.q() as i64;
        let half = (q - 1) / 2;
        CenteredPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| {
                    let c = c as i64;
                    if c > half {
                        c - q
                    } else {
                        c
                    }
                })
                .collect(),
        }
    }

    /// Coefficients as 16-bit little-endian words, the protocol encoding.
    pub fn to_wire_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 * self.coeffs.len());
        for &c in &self.coeffs {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    /// Decodes the 16-bit little-endian encoding, rejecting out-of-range
    /// coefficients.
    pub fn from_wire_bytes(param: &Arc<ParamSet>, bytes: &[u8]) -> Result<Self, RingError> {
        if bytes.len() != 2 * param.n() {
            return Err(RingError::Length {
                expected: 2 * param.n(),
                got: bytes.len(),
            });
        }
        let q = param.q();
        let mut coeffs = Vec::with_capacity(param.n());
        for (index, w) in bytes.chunks_exact(2).enumerate() {
            let value = u16::from_le_bytes([w[0], w[1]]);
            if value as u64 >= q {
                return Err(RingError::CoeffRange {
                    index,
                    value: value as u64,
                    q,
                });
            }
            coeffs.push(value);
        }
        Ok(RingElement {
            param: param.clone(),
            coeffs,
        })
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_wire_bytes())
    }

    fn coeffs_u64(&self) -> Vec<u64> {
        self.coeffs.iter().map(|&c| c as u64).collect()
    }
}

// Operator sugar for contexts where the parameter sets are known to agree;
// panics on mismatch.
impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        self.try_add(rhs).expect("ring add: parameter mismatch")
    }
}
impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self.try_sub(rhs).expect("ring sub: parameter mismatch")
    }
}
impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        self.try_mul(rhs).expect("ring mul: parameter mismatch")
    }
}

fn poly_degree(p: &[u64]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

/// Extended Euclid over Z_q[X]: returns (gcd, t) with t * b ≡ gcd (mod a).
fn poly_ext_gcd(a: &[u64], b: &[u64], q: u64) -> (Vec<u64>, Vec<u64>) {
    let trim = |v: &[u64]| -> Vec<u64> {
        match poly_degree(v) {
            Some(d) => v[..=d].to_vec(),
            None => vec![],
        }
    };
    let mut r0 = trim(a);
    let mut r1 = trim(b);
    let mut t0: Vec<u64> = vec![];
    let mut t1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (quot, rem) = poly_divmod(&r0, &r1, q);
        let t2 = poly_sub(&t0, &poly_mul(&quot, &t1, q), q);
        r0 = r1;
        r1 = rem;
        t0 = t1;
        t1 = t2;
    }
    if r0.is_empty() {
        (vec![0], t0)
    } else {
        (r0, t0)
    }
}

fn poly_divmod(num: &[u64], den: &[u64], q: u64) -> (Vec<u64>, Vec<u64>) {
    let dd = poly_degree(den).expect("division by zero polynomial");
    let lead_inv = scalar_inverse(den[dd], q).expect("prime modulus");
    let mut rem = num.to_vec();
    let mut quot = vec![0u64; num.len().saturating_sub(dd).max(1)];
    while let Some(dr) = poly_degree(&rem) {
        if dr < dd {
            break;
        }
        let shift = dr - dd;
        let factor = rem[dr] * lead_inv % q;
        quot[shift] = factor;
        for i in 0..=dd {
            let sub = den[i] * factor % q;
            rem[shift + i] = (rem[shift + i] + q - sub) % q;
        }
    }
    let rem = match poly_degree(&rem) {
        Some(d) => rem[..=d].to_vec(),
        None => vec![],
    };
    (quot, rem)
}

fn poly_mul(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % q;
        }
    }
    out
}

fn poly_sub(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + q - y) % q
        })
        .collect()
}

/// A polynomial with centered integer coefficients (unbounded, over Z).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CenteredPoly {
    coeffs: Vec<i64>,
}

impl CenteredPoly {
    pub fn new(coeffs: Vec<i64>) -> Self {
        CenteredPoly { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        CenteredPoly {
            coeffs: vec![0; n],
        }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn l1_norm(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    /// Each coefficient reduced mod p and re-centered into [-(p-1)/2, (p-1)/2].
    /// p must be odd.
    pub fn reduce_mod_p_centered(&self, p: u64) -> CenteredPoly {
        debug_assert!(p % 2 == 1 && p >= 3);
        let p = p as i64;
        let half = (p - 1) / 2;
        CenteredPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| {
                    let r = c.rem_euclid(p);
                    if r > half {
                        r - p
                    } else {
                        r
                    }
                })
                .collect(),
        }
    }

    /// Recompose into canonical mod-q form.
    pub fn to_ring(&self, param: &Arc<ParamSet>) -> RingElement {
        assert_eq!(self.coeffs.len(), param.n(), "length mismatch");
        let q = param.q() as i64;
        RingElement {
            param: param.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| c.rem_euclid(q) as u16)
                .collect(),
        }
    }

    pub fn add(&self, other: &CenteredPoly) -> CenteredPoly {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        CenteredPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    /// 1 + p * self, the trapdoor lift.
    pub fn one_plus_scaled(&self, p: u64) -> CenteredPoly {
        let p = p as i64;
        let mut coeffs: Vec<i64> = self.coeffs.iter().map(|&c| p * c).collect();
        coeffs[0] += 1;
        CenteredPoly { coeffs }
    }

    /// Negacyclic product over Z (no modular reduction).
    pub fn mul_negacyclic(&self, other: &CenteredPoly) -> CenteredPoly {
        let n = self.coeffs.len();
        assert_eq!(n, other.coeffs.len());
        let mut acc = vec![0i64; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k < n {
                    acc[k] += a * b;
                } else {
                    acc[k - n] -= a * b;
                }
            }
        }
        CenteredPoly { coeffs: acc }
    }
}

/// An element of the cyclic toy ring Z_q[X]/(X^N - 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicRingElement {
    n: usize,
    q: u64,
    coeffs: Vec<u64>,
}

impl CyclicRingElement {
    pub fn from_coeffs(n: usize, q: u64, coeffs: Vec<i64>) -> Self {
        assert_eq!(coeffs.len(), n);
        CyclicRingElement {
            n,
            q,
            coeffs: coeffs
                .into_iter()
                .map(|c| c.rem_euclid(q as i64) as u64)
                .collect(),
        }
    }

    pub fn zero(n: usize, q: u64) -> Self {
        CyclicRingElement {
            n,
            q,
            coeffs: vec![0; n],
        }
    }

    pub fn one(n: usize, q: u64) -> Self {
        let mut coeffs = vec![0; n];
        coeffs[0] = 1;
        CyclicRingElement { n, q, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_binary(&self) -> bool {
        self.coeffs.iter().all(|&c| c <= 1)
    }

    pub fn eval_at_one(&self) -> u64 {
        self.coeffs.iter().fold(0, |acc, &c| (acc + c) % self.q)
    }

    fn check_same(&self, other: &Self) -> Result<(), RingError> {
        if self.n == other.n && self.q == other.q {
            Ok(())
        } else {
            Err(RingError::CyclicMismatch(self.n, self.q, other.n, other.q))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, RingError> {
        self.check_same(other)?;
        Ok(CyclicRingElement {
            n: self.n,
            q: self.q,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| (a + b) % self.q)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, RingError> {
        self.check_same(other)?;
        Ok(CyclicRingElement {
            n: self.n,
            q: self.q,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| (a + self.q - b) % self.q)
                .collect(),
        })
    }

    /// Convolution product reduced by X^N = 1.
    pub fn try_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check_same(other)?;
        let mut acc = vec![0u64; self.n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let k = (i + j) % self.n;
                acc[k] = (acc[k] + a * b) % self.q;
            }
        }
        Ok(CyclicRingElement {
            n: self.n,
            q: self.q,
            coeffs: acc,
        })
    }
}
