//! Fixed-length binary genomes packed into 64-bit words.
//!
//! Bits beyond `len` in the last word are kept at zero, so word-wise
//! equality, hashing and popcount-based Hamming distance are exact.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

type Words = SmallVec<[u64; 4]>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Words,
    len: usize,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

impl BitString {
    /// All-zero string of `len` bits.
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: SmallVec::from_elem(0, word_count(len)),
            len,
        }
    }

    /// `len` independent fair bits drawn from `rng`, lowest index first.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut s = Self::zeros(len);
        for i in 0..len {
            if rng.random::<bool>() {
                s.set(i, true);
            }
        }
        s
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of positions at which the two strings differ.
    ///
    /// Panics when the lengths differ; callers validate lengths at the
    /// public boundary.
    #[inline]
    pub fn hamming_distance(&self, other: &BitString) -> usize {
        assert_eq!(self.len, other.len, "hamming distance of unequal lengths");
        let (a, b) = (self.words.as_slice(), other.words.as_slice());
        let mut d = 0u32;
        for (x, y) in a.iter().zip(b) {
            d += (x ^ y).count_ones();
        }
        d as usize
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses a string of ASCII `'0'`/`'1'` characters, index 0 first.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Self::zeros(s.len());
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => out.set(i, true),
                other => {
                    return Err(Error::Format(format!(
                        "bit string contains {:?} at position {i}",
                        other as char
                    )))
                }
            }
        }
        Ok(out)
    }
}
