//! Bit strings, most significant bit first.
//!
//! Keys, messages and digests in this crate are short binary strings with a
//! fixed MSB-first reading; this module is the single place that pins down
//! that convention.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use rand::Rng;

/// A binary string. Bit 0 is the most significant (leftmost) bit.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<u8>);

impl BitString {
    /// The all-zero string of the given length.
    pub fn zeros(len: usize) -> Self {
        BitString(vec![0; len])
    }

    /// Builds a bit string from a slice of 0/1 values.
    ///
    /// Panics if any element is not 0 or 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bit values must be 0 or 1");
        BitString(bits.to_vec())
    }

    /// Draws `len` uniform bits from the generator.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        BitString((0..len).map(|_| rng.gen_range(0..2u8)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, index: usize) -> u8 {
        self.0[index]
    }

    pub fn set(&mut self, index: usize, value: u8) {
        assert!(value <= 1, "bit values must be 0 or 1");
        self.0[index] = value;
    }

    pub fn flip(&mut self, index: usize) {
        self.0[index] ^= 1;
    }

    pub fn push(&mut self, value: u8) {
        assert!(value <= 1, "bit values must be 0 or 1");
        self.0.push(value);
    }

    /// Concatenation `self ∥ other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        BitString(bits)
    }

    /// The sub-string covering `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> BitString {
        BitString(self.0[range].to_vec())
    }

    /// Bitwise XOR of two equal-length strings.
    ///
    /// Panics if the lengths differ.
    pub fn xor(&self, other: &BitString) -> BitString {
        assert_eq!(self.len(), other.len(), "xor needs equal lengths");
        BitString(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a ^ b)
                .collect(),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// Interprets the string as an unsigned integer, MSB first.
    ///
    /// Panics if the string is longer than 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len() <= 64, "bit string too long for u64");
        self.0
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    /// The `len` low-order bits of `value`, MSB first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        BitString((0..len).rev().map(|i| ((value >> i) & 1) as u8).collect())
    }
}

impl Index<usize> for BitString {
    type Output = u8;

    fn index(&self, index: usize) -> &u8 {
        &self.0[index]
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Error returned when parsing a bit string from text fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseBitStringError(char);

impl fmt::Display for ParseBitStringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid bit character {:?}", self.0)
    }
}

impl std::error::Error for ParseBitStringError {}

impl FromStr for BitString {
    type Err = ParseBitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(ParseBitStringError(other)),
            })
            .collect::<Result<Vec<u8>, _>>()
            .map(BitString)
    }
}
