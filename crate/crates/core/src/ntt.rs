//! Number-theoretic transform over Z_q for the negacyclic ring Z_q[X]/(X^n + 1).
//!
//! The transform exists whenever q ≡ 1 (mod 2n): the multiplicative group of
//! Z_q then contains an element psi of order exactly 2n, and X^n + 1 splits
//! into linear factors X - psi^(2i+1). Multiplication becomes pointwise in the
//! transformed domain.
//!
//! psi is derived deterministically: take the smallest primitive root g of
//! Z_q* and set psi = g^((q-1)/2n). The value is recorded in the parameter
//! set and is part of the stable behavior of this crate.

/// Modular exponentiation, `base^exp mod q`. Assumes q < 2^32 so products fit u64.
pub fn mod_pow(mut base: u64, mut exp: u64, q: u64) -> u64 {
    base %= q;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test by trial division; adequate for q < 2^16.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m % 2 == 0 {
        return m == 2;
    }
    let mut d = 3u64;
    while d * d <= m {
        if m % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Smallest generator of the multiplicative group of Z_q (q prime).
pub fn smallest_primitive_root(q: u64) -> u64 {
    debug_assert!(is_prime(q));
    let factors = prime_factors(q - 1);
    (2..q)
        .find(|&g| factors.iter().all(|&f| mod_pow(g, (q - 1) / f, q) != 1))
        .expect("prime modulus has a primitive root")
}

/// Precomputed tables for the negacyclic NTT of a fixed (n, q).
#[derive(Debug, Clone)]
pub struct NttTables {
    pub n: usize,
    pub q: u64,
    /// Primitive 2n-th root of unity.
    pub psi: u64,
    psi_pows: Vec<u64>,
    psi_inv_pows: Vec<u64>,
    omega: u64,
    omega_inv: u64,
    n_inv: u64,
}

impl NttTables {
    /// Builds tables for (n, q); caller guarantees n is a power of two,
    /// q is prime, and q ≡ 1 (mod 2n).
    pub fn new(n: usize, q: u64) -> Self {
        assert!(n.is_power_of_two());
        assert_eq!((q - 1) % (2 * n as u64), 0, "q must be 1 mod 2n");
        let g = smallest_primitive_root(q);
        let psi = mod_pow(g, (q - 1) / (2 * n as u64), q);
        let psi_inv = mod_pow(psi, 2 * n as u64 - 1, q);
        let mut psi_pows = Vec::with_capacity(n);
        let mut psi_inv_pows = Vec::with_capacity(n);
        let (mut a, mut b) = (1u64, 1u64);
        for _ in 0..n {
            psi_pows.push(a);
            psi_inv_pows.push(b);
            a = a * psi % q;
            b = b * psi_inv % q;
        }
        let omega = psi * psi % q;
        let omega_inv = mod_pow(omega, 2 * n as u64 / 2 - 1, q);
        let n_inv = mod_pow(n as u64, q - 2, q);
        NttTables {
            n,
            q,
            psi,
            psi_pows,
            psi_inv_pows,
            omega,
            omega_inv,
            n_inv,
        }
    }

    /// Forward transform: coefficient domain -> evaluation domain.
    pub fn forward(&self, coeffs: &[u64]) -> Vec<u64> {
        debug_assert_eq!(coeffs.len(), self.n);
        let mut v: Vec<u64> = coeffs
            .iter()
            .zip(&self.psi_pows)
            .map(|(&c, &p)| c * p % self.q)
            .collect();
        self.cyclic(&mut v, self.omega);
        v
    }

    /// Inverse transform: evaluation domain -> coefficient domain.
    pub fn inverse(&self, evals: &[u64]) -> Vec<u64> {
        debug_assert_eq!(evals.len(), self.n);
        let mut v = evals.to_vec();
        self.cyclic(&mut v, self.omega_inv);
        for (c, &p) in v.iter_mut().zip(&self.psi_inv_pows) {
            *c = *c * self.n_inv % self.q * p % self.q;
        }
        v
    }

    /// Pointwise product of two transformed vectors.
    pub fn pointwise(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| x * y % self.q).collect()
    }

    /// In-place iterative Cooley-Tukey cyclic NTT with the given root.
    fn cyclic(&self, v: &mut [u64], root: u64) {
        let n = v.len();
        let q = self.q;
        // bit-reversal permutation
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                v.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let wlen = mod_pow(root, (n / len) as u64, q);
            let mut i = 0;
            while i < n {
                let mut w = 1u64;
                for k in i..i + len / 2 {
                    let x = v[k];
                    let y = v[k + len / 2] * w % q;
                    v[k] = (x + y) % q;
                    v[k + len / 2] = (x + q - y) % q;
                    w = w * wlen % q;
                }
                i += len;
            }
            len <<= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_root_of_12289_is_11() {
        assert_eq!(smallest_primitive_root(12289), 11);
    }

    #[test]
    fn newhope_modulus_supports_n_1024() {
        // 12289 = 6 * 2048 + 1
        assert_eq!(12289 % 2048, 1);
        let t = NttTables::new(1024, 12289);
        assert_eq!(mod_pow(t.psi, 2048, 12289), 1);
        assert_eq!(mod_pow(t.psi, 1024, 12289), 12288); // psi^n = -1
    }

    #[test]
    fn forward_inverse_roundtrip() {
        let t = NttTables::new(8, 17);
        let a = vec![1u64, 2, 3, 4, 5, 6, 7, 8];
        assert_eq!(t.inverse(&t.forward(&a)), a);
    }

    #[test]
    fn negacyclic_wraparound() {
        // X^(n-1) * X = X^n = -1 in the negacyclic ring.
        let t = NttTables::new(4, 17);
        let mut x3 = vec![0u64; 4];
        x3[3] = 1;
        let mut x1 = vec![0u64; 4];
        x1[1] = 1;
        let prod = t.inverse(&t.pointwise(&t.forward(&x3), &t.forward(&x1)));
        assert_eq!(prod, vec![16, 0, 0, 0]);
    }

    #[test]
    fn small_primes() {
        assert!(is_prime(2));
        assert!(is_prime(17));
        assert!(is_prime(67));
        assert!(is_prime(12289));
        assert!(!is_prime(1));
        assert!(!is_prime(65)); // 5 * 13
    }
}
