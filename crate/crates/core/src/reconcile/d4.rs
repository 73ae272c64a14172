//! Reconciliation against the checkerboard lattice D4 and its Voronoi cell,
//! the 24-cell.
//!
//! D4 = {x in Z^4 : sum x_i even}. Its 24 Voronoi-relevant vectors are the
//! permutations of (+-1, +-1, 0, 0). The union D4~ = Z^4 u (Z^4 + 1/2) is the
//! decode target for key bits: a group of four coefficients scales to a
//! rational point of [0,1)^4, the nearest D4~ point's coset is the key bit,
//! and the quantized offset is the help information.
//!
//! Everything is exact rational arithmetic on integer numerators; ties are
//! fixed (nearest-integer rounding sends halves up, the parity repair flips
//! the lowest qualifying index, coset ties prefer Z^4) so transcripts are
//! byte-identical across implementations.

use super::{Backend, BitString, HelpBits, KeyBits, ReconcileError};
use crate::ring::RingElement;

/// A point of Z^4 or of Z^4 + (1/2,1/2,1/2,1/2), stored as doubled
/// coordinates so both cosets are integral. The four parities always agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticePoint4 {
    pub half: [i64; 4],
}

impl LatticePoint4 {
    pub fn from_ints(v: [i64; 4]) -> Self {
        LatticePoint4 {
            half: [2 * v[0], 2 * v[1], 2 * v[2], 2 * v[3]],
        }
    }

    /// True when the point lies in the integer coset Z^4.
    pub fn is_integral(&self) -> bool {
        self.half.iter().all(|&h| h % 2 == 0)
    }

    /// Squared Euclidean norm times 4 (exact, since coordinates are halves).
    pub fn norm_sq_x4(&self) -> i64 {
        self.half.iter().map(|&h| h * h).sum()
    }

    pub fn negate(&self) -> Self {
        LatticePoint4 {
            half: [-self.half[0], -self.half[1], -self.half[2], -self.half[3]],
        }
    }
}

/// Exact rational point of R^4: numerators over one positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalPoint4 {
    pub num: [i64; 4],
    pub den: i64,
}

impl RationalPoint4 {
    pub fn new(num: [i64; 4], den: i64) -> Self {
        assert!(den > 0, "denominator must be positive");
        RationalPoint4 { num, den }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoronoiClass {
    Inside,
    Boundary,
    Outside,
}

impl std::fmt::Display for VoronoiClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VoronoiClass::Inside => write!(f, "inside"),
            VoronoiClass::Boundary => write!(f, "boundary"),
            VoronoiClass::Outside => write!(f, "outside"),
        }
    }
}

/// Nearest integer to num/den with halves rounding up.
fn round_half_up(num: i64, den: i64) -> i64 {
    debug_assert!(den > 0);
    (2 * num + den).div_euclid(2 * den)
}

/// The 24 minimal vectors of D4: all permutations of (+-1, +-1, 0, 0).
pub fn voronoi_relevant_vectors() -> Vec<LatticePoint4> {
    let mut out = Vec::with_capacity(24);
    for i in 0..4 {
        for j in (i + 1)..4 {
            for (si, sj) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                let mut v = [0i64; 4];
                v[i] = si;
                v[j] = sj;
                out.push(LatticePoint4::from_ints(v));
            }
        }
    }
    out
}

/// Nearest point of D4 to y.
///
/// Round each coordinate to the nearest integer; if the parity sum is odd,
/// flip the coordinate whose fractional part is closest to 1/2 (ties go to
/// the lowest index) to its second-nearest integer. A coordinate that is
/// exactly integral flips upward.
pub fn d4_decode(y: &RationalPoint4) -> LatticePoint4 {
    let mut r = [0i64; 4];
    let mut frac_num = [0i64; 4]; // y_i - r_i, times den; in [-den/2, den/2)
    for i in 0..4 {
        r[i] = round_half_up(y.num[i], y.den);
        frac_num[i] = y.num[i] - r[i] * y.den;
    }
    if r.iter().sum::<i64>().rem_euclid(2) == 1 {
        let mut worst = 0usize;
        for i in 1..4 {
            if frac_num[i].abs() > frac_num[worst].abs() {
                worst = i;
            }
        }
        r[worst] += if frac_num[worst] >= 0 { 1 } else { -1 };
    }
    LatticePoint4::from_ints(r)
}

/// Classifies y against the Voronoi cell of the origin: inside iff
/// <y, v> < 1 for every relevant vector v, boundary iff the maximum inner
/// product is exactly 1.
pub fn voronoi_contains(y: &RationalPoint4) -> VoronoiClass {
    let mut any_eq = false;
    for v in voronoi_relevant_vectors() {
        // <y, v> compared to 1 exactly: sum(num_i * v_i) vs den, where the
        // relevant vectors have integer coordinates half/2.
        let dot2: i64 = (0..4).map(|i| y.num[i] * v.half[i]).sum();
        let dot = dot2 / 2 + (dot2 % 2); // v coords are integers so dot2 is even
        debug_assert_eq!(dot2 % 2, 0);
        match dot.cmp(&y.den) {
            std::cmp::Ordering::Greater => return VoronoiClass::Outside,
            std::cmp::Ordering::Equal => any_eq = true,
            std::cmp::Ordering::Less => {}
        }
    }
    if any_eq {
        VoronoiClass::Boundary
    } else {
        VoronoiClass::Inside
    }
}

/// Nearest point of D4~ = Z^4 u (Z^4 + 1/2) to num/den, by comparing the
/// best candidate of each coset with exact squared distances; ties prefer
/// the integer coset. Returns the point and its coset bit (0 = Z^4).
fn nearest_half_integer_lattice(num: &[i64; 4], den: i64) -> (LatticePoint4, u8) {
    let mut int_half = [0i64; 4];
    let mut half_half = [0i64; 4];
    let mut d_int: i128 = 0;
    let mut d_half: i128 = 0;
    for i in 0..4 {
        // integer coset: round(y_i); distances scaled by (2 den)^2
        let r = round_half_up(num[i], den);
        int_half[i] = 2 * r;
        let e_int = (2 * num[i] - 2 * r * den) as i128;
        d_int += e_int * e_int;
        // half coset: nearest m + 1/2, i.e. round(y_i - 1/2) + 1/2
        let m = round_half_up(2 * num[i] - den, 2 * den);
        half_half[i] = 2 * m + 1;
        let e_half = (2 * num[i] - (2 * m + 1) * den) as i128;
        d_half += e_half * e_half;
    }
    if d_int <= d_half {
        (LatticePoint4 { half: int_half }, 0)
    } else {
        (LatticePoint4 { half: half_half }, 1)
    }
}

/// Two's-complement encoding of a signed 2-bit help value in {-2..1}.
fn encode_help(m: i64) -> u8 {
    debug_assert!((-2..=1).contains(&m));
    (m & 3) as u8
}

fn decode_help(bits: u8) -> i64 {
    // sign-extend 2 bits
    if bits & 0b10 != 0 {
        bits as i64 - 4
    } else {
        bits as i64
    }
}

/// Responder side for one group of four coefficients: scales to [0,1)^4,
/// decodes to D4~, emits the coset bit as key material and the offset
/// quantized to quarter units (saturating to the signed 2-bit range) as help.
pub fn bob_group(group: [u64; 4], q: u64) -> ([i64; 4], u8) {
    let num = [
        group[0] as i64,
        group[1] as i64,
        group[2] as i64,
        group[3] as i64,
    ];
    let den = q as i64;
    let (c, key_bit) = nearest_half_integer_lattice(&num, den);
    let mut help = [0i64; 4];
    for i in 0..4 {
        // offset o = y_i - c_i = (2 num_i - c_half_i den) / (2 den);
        // quantize to round(4 o) and clamp into {-2..1}.
        let o_num = 2 * num[i] - c.half[i] * den;
        let m = round_half_up(2 * o_num, 2 * den);
        help[i] = m.clamp(-2, 1);
    }
    (help, key_bit)
}

/// Initiator side: subtracts the quantized offset (quarter units) and
/// decodes to the same lattice; returns the coset bit.
pub fn alice_group(group: [u64; 4], help: [i64; 4], q: u64) -> u8 {
    let den = 4 * q as i64;
    let mut num = [0i64; 4];
    for i in 0..4 {
        num[i] = 4 * group[i] as i64 - help[i] * q as i64;
    }
    nearest_half_integer_lattice(&num, den).1
}

/// Full-vector responder: one key bit and four 2-bit help values per group
/// of four consecutive coefficients.
pub fn helprec(v: &RingElement) -> Result<(HelpBits, KeyBits), ReconcileError> {
    let n = v.param().n();
    if n % 4 != 0 {
        return Err(ReconcileError::DimensionNotGroupable(n));
    }
    let q = v.param().q();
    let mut help = BitString::with_capacity(2 * n);
    let mut key = BitString::with_capacity(n / 4);
    for g in 0..n / 4 {
        let group = [
            v.coeff(4 * g),
            v.coeff(4 * g + 1),
            v.coeff(4 * g + 2),
            v.coeff(4 * g + 3),
        ];
        let (h, k) = bob_group(group, q);
        for &m in &h {
            help.push_bits(encode_help(m), 2);
        }
        key.push(k == 1);
    }
    Ok((HelpBits::new(Backend::D4, help), KeyBits::new(key)))
}

/// Full-vector initiator.
pub fn rec(w: &RingElement, help: &HelpBits) -> Result<KeyBits, ReconcileError> {
    if help.backend() != Backend::D4 {
        return Err(ReconcileError::BackendMismatch {
            built: help.backend(),
            used: Backend::D4,
        });
    }
    let n = w.param().n();
    if n % 4 != 0 {
        return Err(ReconcileError::DimensionNotGroupable(n));
    }
    if help.len() != 2 * n {
        return Err(ReconcileError::HelpLength {
            expected: 2 * n,
            got: help.len(),
        });
    }
    let q = w.param().q();
    let mut key = BitString::with_capacity(n / 4);
    for g in 0..n / 4 {
        let group = [
            w.coeff(4 * g),
            w.coeff(4 * g + 1),
            w.coeff(4 * g + 2),
            w.coeff(4 * g + 3),
        ];
        let mut h = [0i64; 4];
        for (i, hv) in h.iter_mut().enumerate() {
            *hv = decode_help(help.bits().get_bits(8 * g + 2 * i, 2));
        }
        key.push(alice_group(group, h, q) == 1);
    }
    Ok(KeyBits::new(key))
}

/// Brute-force nearest-D4-point search: all candidates with coordinates
/// within +-2 of the rounded cube. Returns every minimizer (exact ties
/// included). Test oracle for [`d4_decode`].
pub fn d4_decode_brute_force(y: &RationalPoint4) -> Vec<LatticePoint4> {
    let mut best: i128 = i128::MAX;
    let mut winners = Vec::new();
    let base: Vec<i64> = (0..4).map(|i| round_half_up(y.num[i], y.den)).collect();
    for a in -2..=2i64 {
        for b in -2..=2i64 {
            for c in -2..=2i64 {
                for d in -2..=2i64 {
                    let cand = [base[0] + a, base[1] + b, base[2] + c, base[3] + d];
                    if cand.iter().sum::<i64>().rem_euclid(2) != 0 {
                        continue;
                    }
                    let dist: i128 = (0..4)
                        .map(|i| {
                            let e = (y.num[i] - cand[i] * y.den) as i128;
                            e * e
                        })
                        .sum();
                    match dist.cmp(&best) {
                        std::cmp::Ordering::Less => {
                            best = dist;
                            winners.clear();
                            winners.push(LatticePoint4::from_ints(cand));
                        }
                        std::cmp::Ordering::Equal => {
                            winners.push(LatticePoint4::from_ints(cand));
                        }
                        std::cmp::Ordering::Greater => {}
                    }
                }
            }
        }
    }
    winners
}
