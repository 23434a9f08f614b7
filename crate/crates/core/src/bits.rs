//! Fixed-width bit strings used for measurement outcomes, level labels and
//! spectral line labels.
//!
//! Bit `k` of a string of width `n` corresponds to qubit `k`, and the integer
//! value is big-endian: qubit 0 is the most significant bit.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    value: usize,
}

impl BitString {
    pub const MAX_LEN: usize = 32;

    pub fn new(len: usize, value: usize) -> Result<Self> {
        if len > Self::MAX_LEN || (len < usize::BITS as usize && value >> len != 0) {
            return Err(Error::InvalidBits(format!("value {value} does not fit in {len} bits")));
        }
        Ok(Self { len, value })
    }

    pub fn zeros(len: usize) -> Self {
        Self { len, value: 0 }
    }

    pub fn ones(len: usize) -> Self {
        Self { len, value: (1usize << len) - 1 }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let value = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        Self { len: bits.len(), value }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Big-endian integer value (basis index).
    pub fn value(&self) -> usize {
        self.value
    }

    /// Bit of qubit `k` (0 = most significant).
    pub fn bit(&self, k: usize) -> bool {
        assert!(k < self.len, "bit {k} out of range for width {}", self.len);
        (self.value >> (self.len - 1 - k)) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |k| self.bit(k))
    }

    /// All strings of the given width in increasing basis order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        (0..1usize << len).map(move |value| BitString { len, value })
    }

    /// True when every bit is equal (all zeros or all ones).
    pub fn is_uniform(&self) -> bool {
        self.value == 0 || self.value == (1usize << self.len) - 1
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.len() > Self::MAX_LEN {
            return Err(Error::InvalidBits(s.to_string()));
        }
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::InvalidBits(s.to_string())),
            }
        }
        Ok(Self::from_bits(&bits))
    }
}

/// Extracts the bit of qubit `k` from basis index `index` of an `n`-qubit register.
#[inline]
pub fn qubit_bit(index: usize, k: usize, n: usize) -> usize {
    (index >> (n - 1 - k)) & 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.value(), 6);
        assert!(!b.bit(0) && b.bit(1) && b.bit(2) && !b.bit(3));
        assert_eq!(b.to_string(), "0110");
    }

    #[test]
    fn rejects_garbage() {
        assert!("01a".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().is_err());
        assert!(BitString::new(2, 4).is_err());
    }

    #[test]
    fn uniform() {
        assert!(BitString::zeros(3).is_uniform());
        assert!(BitString::ones(3).is_uniform());
        assert!(!"001".parse::<BitString>().unwrap().is_uniform());
        assert_eq!(BitString::all(3).count(), 8);
    }
}
