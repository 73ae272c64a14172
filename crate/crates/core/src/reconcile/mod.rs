//! Key-bit reconciliation.
//!
//! Two backends derive identical key bits from approximately equal ring
//! elements:
//!
//! * [`peikert`] — one help bit and one key bit per coefficient, built from
//!   the randomized doubling trick for odd q plus interval membership tests.
//! * [`d4`] — one key bit per group of four coefficients, decoding against
//!   the checkerboard lattice in dimension four with 8 help bits per group.
//!   All geometry is exact rational; no floats decide anything.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod d4;
pub mod peikert;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReconcileError {
    #[error("help bits built for backend {built:?}, used with {used:?}")]
    BackendMismatch { built: Backend, used: Backend },
    #[error("help bit length {got} does not match backend contract {expected}")]
    HelpLength { expected: usize, got: usize },
    #[error("dimension {0} is not divisible by 4")]
    DimensionNotGroupable(usize),
}

/// Reconciliation backend selector; the numeric values are the wire ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Peikert,
    D4,
}

impl Backend {
    pub fn wire_id(self) -> u8 {
        match self {
            Backend::Peikert => 0,
            Backend::D4 => 1,
        }
    }

    pub fn from_wire_id(id: u8) -> Option<Backend> {
        match id {
            0 => Some(Backend::Peikert),
            1 => Some(Backend::D4),
            _ => None,
        }
    }

    /// Help bits per coefficient-vector of length n.
    pub fn help_bits(self, n: usize) -> usize {
        match self {
            Backend::Peikert => n,
            Backend::D4 => 2 * n,
        }
    }

    /// Key bits per coefficient-vector of length n.
    pub fn key_bits(self, n: usize) -> usize {
        match self {
            Backend::Peikert => n,
            Backend::D4 => n / 4,
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Peikert => write!(f, "peikert"),
            Backend::D4 => write!(f, "d4"),
        }
    }
}

/// A bit string packed LSB-first into bytes; the packing order is part of
/// the wire format.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn with_capacity(bits: usize) -> Self {
        BitString {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 1 << (self.len % 8);
        }
        self.len += 1;
    }

    /// Pushes the low `width` bits of `value`, LSB first.
    pub fn push_bits(&mut self, value: u8, width: usize) {
        for i in 0..width {
            self.push(value >> i & 1 == 1);
        }
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.bytes[i / 8] >> (i % 8) & 1 == 1
    }

    /// Reads `width` bits starting at `i`, LSB first.
    pub fn get_bits(&self, i: usize, width: usize) -> u8 {
        let mut v = 0u8;
        for j in 0..width {
            if self.get(i + j) {
                v |= 1 << j;
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Rebuilds from packed bytes; trailing pad bits must be zero.
    pub fn from_bytes(len: usize, bytes: &[u8]) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        if len % 8 != 0 {
            let pad = bytes[bytes.len() - 1] >> (len % 8);
            if pad != 0 {
                return None;
            }
        }
        Some(BitString {
            bytes: bytes.to_vec(),
            len,
        })
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    pub fn count_ones(&self) -> usize {
        (0..self.len).filter(|&i| self.get(i)).count()
    }

    /// Number of positions where two equal-length strings differ.
    pub fn hamming_distance(&self, other: &BitString) -> usize {
        assert_eq!(self.len, other.len);
        (0..self.len).filter(|&i| self.get(i) != other.get(i)).count()
    }
}

/// Helper data published by the responder, one per session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelpBits {
    backend: Backend,
    bits: BitString,
}

impl HelpBits {
    pub fn new(backend: Backend, bits: BitString) -> Self {
        HelpBits { backend, bits }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// The derived session key; raw reconciled bits, no KDF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyBits {
    bits: BitString,
}

impl KeyBits {
    pub fn new(bits: BitString) -> Self {
        KeyBits { bits }
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn to_hex(&self) -> String {
        self.bits.to_hex()
    }

    pub fn hamming_distance(&self, other: &KeyBits) -> usize {
        self.bits.hamming_distance(&other.bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_lsb_first_packing() {
        let mut b = BitString::with_capacity(10);
        // 0b0000_0011 then 0b0000_0010 pattern
        for bit in [true, true, false, false, false, false, false, false, false, true] {
            b.push(bit);
        }
        assert_eq!(b.len(), 10);
        assert_eq!(b.as_bytes(), &[0b0000_0011, 0b0000_0010]);
        assert!(b.get(0) && b.get(1) && !b.get(2) && b.get(9));
        let back = BitString::from_bytes(10, b.as_bytes()).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn bitstring_rejects_nonzero_padding() {
        assert!(BitString::from_bytes(10, &[0xFF, 0xFF]).is_none());
        assert!(BitString::from_bytes(10, &[0xFF]).is_none());
        assert!(BitString::from_bytes(16, &[0xFF, 0xFF]).is_some());
    }

    #[test]
    fn two_bit_fields_roundtrip() {
        let mut b = BitString::with_capacity(8);
        for v in [0b00u8, 0b01, 0b10, 0b11] {
            b.push_bits(v, 2);
        }
        for (i, v) in [0b00u8, 0b01, 0b10, 0b11].iter().enumerate() {
            assert_eq!(b.get_bits(2 * i, 2), *v);
        }
    }

    #[test]
    fn backend_lengths() {
        assert_eq!(Backend::Peikert.help_bits(1024), 1024);
        assert_eq!(Backend::Peikert.key_bits(1024), 1024);
        assert_eq!(Backend::D4.help_bits(1024), 2048);
        assert_eq!(Backend::D4.key_bits(1024), 256);
    }
}
