//! Per-coefficient reconciliation over Z_2q.
//!
//! Working modulo 2q removes the rounding bias an odd q would otherwise
//! introduce: the responder doubles each coefficient with a random offset
//! ("dbl"), publishes the cross-rounding bit, and keeps the rounding bit as
//! key material. The initiator recovers the key bit from its own
//! approximation through an interval membership test ("rec").
//!
//! The decision sets, as residue classes mod 2q:
//!   I_0 = {0, ..., ceil(q/2) - 1}
//!   I_1 = {-floor(q/2), ..., -1}
//!   E   = [-floor(q/4), floor(q/4))
//! rec(w, b) = 0 iff w lies in I_b + E.

use super::{Backend, BitString, HelpBits, KeyBits, ReconcileError};
use crate::ring::RingElement;
use crate::sampling::SeededRng;

/// Doubling mode: the deterministic variant pins the offset to zero so tests
/// can replay exact values; the protocol uses the randomized variant.
#[derive(Debug)]
pub enum Dbl<'a> {
    Deterministic,
    Randomized(&'a mut SeededRng),
}

/// Doubles `w` into Z_2q: returns 2w - e mod 2q with e in {-1, 0, 1} drawn
/// with probabilities (1/4, 1/2, 1/4); the deterministic mode forces e = 0.
pub fn dbl(w: u64, q: u64, mode: &mut Dbl<'_>) -> u64 {
    debug_assert!(w < q);
    let e: i64 = match mode {
        Dbl::Deterministic => 0,
        Dbl::Randomized(rng) => match rng.next_u32() & 3 {
            0b00 => -1,
            0b11 => 1,
            _ => 0,
        },
    };
    (2 * w as i64 - e).rem_euclid(2 * q as i64) as u64
}

/// Rounding bit of v in Z_2q: nearest integer of v/q, mod 2.
pub fn round_bit(v: u64, q: u64) -> u8 {
    debug_assert!(v < 2 * q);
    ((2 * v + q) / (2 * q) % 2) as u8
}

/// Cross-rounding bit of v in Z_2q: floor(2v/q) mod 2.
pub fn cross_bit(v: u64, q: u64) -> u8 {
    debug_assert!(v < 2 * q);
    (2 * v / q % 2) as u8
}

/// Interval [lo, lo + width - 1] of I_b + E as residues mod 2q.
fn rec_zero_interval(b: u8, q: u64) -> (i64, i64) {
    let (q, qq) = (q as i64, 2 * q as i64);
    let e_lo = -(q / 4);
    let e_hi = q / 4 - 1; // E is half-open on the right
    let (i_lo, i_hi) = if b == 0 {
        (0, (q + 1) / 2 - 1)
    } else {
        (-(q / 2), -1)
    };
    let lo = (i_lo + e_lo).rem_euclid(qq);
    let width = (i_hi + e_hi) - (i_lo + e_lo) + 1;
    (lo, width)
}

/// rec(w, b): 0 iff w is within I_b + E modulo 2q, else 1.
pub fn rec_bit(w: u64, b: u8, q: u64) -> u8 {
    debug_assert!(w < 2 * q);
    let qq = 2 * q as i64;
    let (lo, width) = rec_zero_interval(b, q);
    let offset = (w as i64 - lo).rem_euclid(qq);
    u8::from(offset >= width)
}

/// Smallest |d| such that rec(v + d, cross(v)) != round(v); the per-point
/// reconciliation margin. Exact interval arithmetic, no scanning.
pub fn failure_distance(v: u64, q: u64) -> u64 {
    let qq = 2 * q as i64;
    let b = cross_bit(v, q);
    let k = round_bit(v, q);
    let (lo, width) = rec_zero_interval(b, q);
    let offset = (v as i64 - lo).rem_euclid(qq);
    if k == 0 {
        // v sits inside the zero-interval; distance to either end.
        debug_assert!(offset < width);
        (offset + 1).min(width - offset) as u64
    } else {
        // v sits in the complement; distance to re-entering the interval.
        debug_assert!(offset >= width);
        (offset - width + 1).min(qq - offset) as u64
    }
}

/// Responder side: doubles each coefficient, emits one cross-rounding help
/// bit and one rounding key bit per coefficient.
pub fn helprec(v: &RingElement, mode: &mut Dbl<'_>) -> (HelpBits, KeyBits) {
    let q = v.param().q();
    let n = v.param().n();
    let mut help = BitString::with_capacity(n);
    let mut key = BitString::with_capacity(n);
    for i in 0..n {
        let doubled = dbl(v.coeff(i), q, mode);
        help.push(cross_bit(doubled, q) == 1);
        key.push(round_bit(doubled, q) == 1);
    }
    (HelpBits::new(Backend::Peikert, help), KeyBits::new(key))
}

/// Initiator side: doubles deterministically and applies rec per coefficient.
pub fn rec(w: &RingElement, help: &HelpBits) -> Result<KeyBits, ReconcileError> {
    if help.backend() != Backend::Peikert {
        return Err(ReconcileError::BackendMismatch {
            built: help.backend(),
            used: Backend::Peikert,
        });
    }
    let n = w.param().n();
    if help.len() != n {
        return Err(ReconcileError::HelpLength {
            expected: n,
            got: help.len(),
        });
    }
    let q = w.param().q();
    let mut key = BitString::with_capacity(n);
    for i in 0..n {
        let doubled = 2 * w.coeff(i) % (2 * q);
        let b = u8::from(help.bits().get(i));
        key.push(rec_bit(doubled, b, q) == 1);
    }
    Ok(KeyBits::new(key))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params;
    use crate::ring::RingElement;

    const Q: u64 = 12289;

    #[test]
    fn dbl_deterministic_endpoints() {
        let mut mode = Dbl::Deterministic;
        assert_eq!(dbl(0, Q, &mut mode), 0);
        assert_eq!(dbl(Q - 1, Q, &mut mode), 2 * Q - 2);
    }

    #[test]
    fn dbl_offset_frequencies() {
        // e = 2w - dbl(w) mod 2q should hit (-1, 0, 1) near (1/4, 1/2, 1/4).
        let mut rng = SeededRng::new(*b"peikert-dbl-frequency-test-seed!", 0);
        let mut counts = [0u64; 3];
        let total = 100_000;
        for i in 0..total {
            let w = i as u64 % Q;
            let mut mode = Dbl::Randomized(&mut rng);
            let d = dbl(w, Q, &mut mode);
            let e = (2 * w as i64 - d as i64).rem_euclid(2 * Q as i64);
            match e {
                0 => counts[1] += 1,
                1 => counts[2] += 1,
                x if x == 2 * Q as i64 - 1 => counts[0] += 1,
                other => panic!("unexpected offset {other}"),
            }
        }
        let f = |c: u64| c as f64 / total as f64;
        assert!((f(counts[0]) - 0.25).abs() < 0.02);
        assert!((f(counts[1]) - 0.50).abs() < 0.02);
        assert!((f(counts[2]) - 0.25).abs() < 0.02);
    }

    #[test]
    fn round_bit_examples() {
        assert_eq!(round_bit(0, Q), 0);
        assert_eq!(round_bit(Q, Q), 1);
        assert_eq!(round_bit(2 * Q - 1, Q), 0);
        // interval check: first and last value rounded to 1
        assert_eq!(round_bit((Q + 1) / 2, Q), 1);
        assert_eq!(round_bit((Q + 1) / 2 - 1, Q), 0);
    }

    #[test]
    fn cross_bit_examples() {
        assert_eq!(cross_bit(0, Q), 0);
        assert_eq!(cross_bit((Q + 1) / 2, Q), 1);
        assert_eq!(cross_bit(Q + (Q + 1) / 2, Q), 1);
        assert_eq!(cross_bit(Q, Q), 0);
    }

    #[test]
    fn rec_bit_zero_at_origin() {
        assert_eq!(rec_bit(0, 0, Q), 0);
    }

    #[test]
    fn failure_distance_matches_black_box_scan() {
        // The closed-form margin must agree with literally probing rec_bit.
        for &q in &[13u64, 17, 97, 12289] {
            let qq = 2 * q;
            let step = (qq / 97).max(1);
            for v in (0..qq).step_by(step as usize) {
                let b = cross_bit(v, q);
                let k = round_bit(v, q);
                let predicted = failure_distance(v, q);
                let mut scanned = None;
                for d in 0..=qq as i64 {
                    let fails_pos = rec_bit((v as i64 + d).rem_euclid(qq as i64) as u64, b, q) != k;
                    let fails_neg = rec_bit((v as i64 - d).rem_euclid(qq as i64) as u64, b, q) != k;
                    if fails_pos || fails_neg {
                        scanned = Some(d as u64);
                        break;
                    }
                }
                assert_eq!(scanned, Some(predicted), "q={q} v={v}");
            }
        }
    }

    #[test]
    fn tolerance_is_floor_q4_minus_1() {
        let t = (0..2 * Q).map(|v| failure_distance(v, Q) - 1).min().unwrap();
        assert_eq!(t, Q / 4 - 1); // 3071
    }

    #[test]
    fn antipodal_inputs_flip_rec_away_from_boundaries() {
        let mut rng = SeededRng::new(*b"peikert-antipodal-check-seed!!!!", 0);
        let mut checked = 0;
        while checked < 2000 {
            let v = rng.next_u64() % (2 * Q);
            if failure_distance(v, Q) < 4 || failure_distance((v + Q) % (2 * Q), Q) < 4 {
                continue; // boundary-adjacent pair, exempt
            }
            let b = cross_bit(v, Q);
            assert_eq!(
                rec_bit((v + Q) % (2 * Q), b, Q),
                1 - rec_bit(v, b, Q),
                "v = {v}"
            );
            checked += 1;
        }
    }

    #[test]
    fn helprec_rec_roundtrip_zero_and_identical() {
        let p = params::by_id(params::ids::NEWHOPE_1024).unwrap();
        let zero = RingElement::zero(&p);
        let (help, key) = helprec(&zero, &mut Dbl::Deterministic);
        assert_eq!(help.len(), 1024);
        assert_eq!(key.len(), 1024);
        assert_eq!(key.bits().count_ones(), 0);
        assert_eq!(help.bits().count_ones(), 0);
        assert_eq!(rec(&zero, &help).unwrap(), key);
    }

    #[test]
    fn rec_recovers_within_tolerance_and_flips_beyond() {
        let p = params::by_id(params::ids::NEWHOPE_1024).unwrap();
        let mut rng = SeededRng::new(*b"peikert-tolerance-roundtrip-seed", 0);
        let v = crate::sampling::sample_uniform_ring(&mut rng, &p);
        let (help, key) = helprec(&v, &mut Dbl::Deterministic);
        let t = Q / 4 - 1;
        let shift = t / 2 - 1;

        // every coefficient moved by +-(T/2 - 1): keys must match
        let delta: Vec<u64> = (0..1024)
            .map(|i| if i % 2 == 0 { shift } else { Q - shift })
            .collect();
        let w = RingElement::from_coeffs(
            &p,
            (0..1024).map(|i| (v.coeff(i) + delta[i]) % Q).collect(),
        )
        .unwrap();
        assert_eq!(rec(&w, &help).unwrap(), key);

        // push exactly one coefficient far out: exactly that key bit flips
        let mut coeffs: Vec<u64> = (0..1024).map(|i| v.coeff(i)).collect();
        coeffs[17] = (coeffs[17] + (Q + 1) / 2) % Q;
        let w2 = RingElement::from_coeffs(&p, coeffs).unwrap();
        let flipped = rec(&w2, &help).unwrap();
        assert_eq!(key.hamming_distance(&flipped), 1);
        assert_ne!(key.bit(17), flipped.bit(17));
    }

    #[test]
    fn rec_rejects_wrong_backend_and_length() {
        let p = params::by_id(params::ids::TOY_8).unwrap();
        let zero = RingElement::zero(&p);
        let bad = HelpBits::new(Backend::D4, BitString::with_capacity(0));
        assert!(matches!(
            rec(&zero, &bad),
            Err(ReconcileError::BackendMismatch { .. })
        ));
        let short = HelpBits::new(Backend::Peikert, BitString::with_capacity(0));
        assert!(matches!(
            rec(&zero, &short),
            Err(ReconcileError::HelpLength { expected: 8, got: 0 })
        ));
    }
}
