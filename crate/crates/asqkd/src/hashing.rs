//! An ε-almost-universal hash family over GF(2^m), keyed by the pre-shared
//! key K₂.
//!
//! The family is the classical polynomial-evaluation (Horner) construction:
//! the message is split into m-bit blocks b₁…b_L and hashed to
//! ((b₁·k + b₂)·k + … + b_L)·k in GF(2^m), where k is the key element.
//! Distinct equal-length messages collide for at most L of the 2^m keys,
//! so the collision probability is at most ⌈n/m⌉ / 2^m.
//!
//! The field is represented with the lexicographically smallest irreducible
//! reduction polynomial of degree m, so digests are reproducible across
//! implementations without shipping tables. The all-zero key is remapped to
//! the field element 1: key 0 would hash every message to 0.

use thiserror::Error;

use crate::bits::BitString;

/// Supported digest widths. Width 1 degenerates to a parity bit and exists
/// for exhaustive small-instance analyses.
pub const MIN_HASH_BITS: usize = 1;
pub const MAX_HASH_BITS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HashError {
    #[error("hash width {0} outside supported range {MIN_HASH_BITS}..={MAX_HASH_BITS}")]
    WidthOutOfRange(usize),
    #[error("message must not be empty")]
    EmptyMessage,
}

/// A selected member of the hash family: a nonzero element of GF(2^m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashKey {
    m: usize,
    element: u64,
    reduction: u64,
}

impl HashKey {
    pub fn width(&self) -> usize {
        self.m
    }

    /// The key as a field element in the polynomial basis, MSB first.
    pub fn element_bits(&self) -> BitString {
        BitString::from_u64(self.element, self.m)
    }
}

/// An m-bit hash value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digest(BitString);

impl Digest {
    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn into_bits(self) -> BitString {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Selects the family member indexed by `k2`.
///
/// `k2` is read MSB-first as a polynomial-basis element of GF(2^m) with
/// m = |k2|; the all-zero string maps to the element 1.
pub fn select_hash(k2: &BitString) -> Result<HashKey, HashError> {
    let m = k2.len();
    if !(MIN_HASH_BITS..=MAX_HASH_BITS).contains(&m) {
        return Err(HashError::WidthOutOfRange(m));
    }
    let mut element = k2.to_u64();
    if element == 0 {
        element = 1;
    }
    let reduction = reduction_poly_value(m);
    Ok(HashKey {
        m,
        element,
        reduction,
    })
}

/// Hashes `message` with `key`: zero-pad to a multiple of m bits, split into
/// m-bit blocks MSB first, and evaluate the Horner recurrence
/// h ← (h ⊕ bᵢ) · k over GF(2^m). Deterministic.
pub fn universal_hash(message: &BitString, key: &HashKey) -> Result<Digest, HashError> {
    if message.is_empty() {
        return Err(HashError::EmptyMessage);
    }
    let m = key.m;
    let blocks = message.len().div_ceil(m);
    let mut h = 0u64;
    for b in 0..blocks {
        let mut block = 0u64;
        for i in 0..m {
            let pos = b * m + i;
            let bit = if pos < message.len() {
                message.bit(pos)
            } else {
                0
            };
            block = (block << 1) | u64::from(bit);
        }
        h = gf_mul(h ^ block, key.element, m, key.reduction);
    }
    Ok(Digest(BitString::from_u64(h, m)))
}

/// The lexicographically smallest irreducible polynomial of degree m over
/// GF(2), as m+1 coefficient bits MSB first.
///
/// Irreducibility is established by exhaustive trial division over all
/// polynomials of degree 1..=m/2.
pub fn find_reduction_poly(m: usize) -> Result<BitString, HashError> {
    if !(MIN_HASH_BITS..=MAX_HASH_BITS).contains(&m) {
        return Err(HashError::WidthOutOfRange(m));
    }
    Ok(BitString::from_u64(reduction_poly_value(m), m + 1))
}

/// Reduction polynomial as a bit-packed value with bit i = coefficient of xⁱ
/// ... in the *numeric* ordering (bit 0 = constant term after the MSB-first
/// string is read as an integer, i.e. the x^m coefficient is the top bit).
fn reduction_poly_value(m: usize) -> u64 {
    debug_assert!((MIN_HASH_BITS..=MAX_HASH_BITS).contains(&m));
    for candidate in (1u64 << m)..(1u64 << (m + 1)) {
        if poly_is_irreducible(candidate, m) {
            return candidate;
        }
    }
    unreachable!("an irreducible polynomial of each degree exists");
}

fn poly_degree(p: u64) -> u32 {
    debug_assert!(p != 0);
    63 - p.leading_zeros()
}

/// Remainder of polynomial division over GF(2).
fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

fn poly_is_irreducible(p: u64, m: usize) -> bool {
    for d in 1..=(m / 2) {
        for divisor in (1u64 << d)..(1u64 << (d + 1)) {
            if poly_rem(p, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

/// Product in GF(2^m): carryless multiplication followed by reduction.
fn gf_mul(a: u64, b: u64, m: usize, reduction: u64) -> u64 {
    let mut acc = 0u64;
    for i in 0..m {
        if (b >> i) & 1 == 1 {
            acc ^= a << i;
        }
    }
    if m >= 2 {
        for bit in (m..=(2 * m - 2)).rev() {
            if (acc >> bit) & 1 == 1 {
                acc ^= reduction << (bit - m);
            }
        }
    }
    acc
}
