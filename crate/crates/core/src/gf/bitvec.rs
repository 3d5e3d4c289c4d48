use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Packed vector over GF(2). Bit `i` lives in word `i / 64` at position `i % 64`.
///
/// Bits past `len` in the last word are always zero, so equality and hashing
/// can work directly on the words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                words[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        BitVec { len, words }
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    /// Build from raw words; bits beyond `len` are cleared.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = BitVec { len, words };
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
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
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the bitwise AND, i.e. the GF(2) dot product.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    #[inline]
    pub fn xor_assign_checked(&mut self, other: &BitVec) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        *self ^= other;
        Ok(())
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Gather the bits at `positions` into a new vector.
    pub fn select(&self, positions: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(k, true);
            }
        }
        out
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_idx * 64 + tz);
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}

impl BitXorAssign<&BitVec> for BitVec {
    #[inline]
    fn bitxor_assign(&mut self, rhs: &BitVec) {
        debug_assert_eq!(self.len, rhs.len);
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor<&BitVec> for &BitVec {
    type Output = BitVec;

    fn bitxor(self, rhs: &BitVec) -> BitVec {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    /// Parses a string of '0'/'1' characters; column 0 is the leftmost character.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut bits = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(Error::Parse(format!(
                        "unexpected character {other:?} at position {i} in bit string"
                    )))
                }
            }
        }
        Ok(BitVec::from_bits(bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_iterates_across_words() {
        let v = BitVec::from_indices(130, &[0, 63, 64, 129]);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(v.weight(), 4);
    }

    #[test]
    fn string_round_trip() {
        let v: BitVec = "1001011".parse().unwrap();
        assert_eq!(v.len(), 7);
        assert!(v.get(0) && v.get(3) && v.get(5) && v.get(6));
        assert_eq!(v.to_string(), "1001011");
        assert!("10a1".parse::<BitVec>().is_err());
    }

    #[test]
    fn from_words_masks_tail() {
        let v = BitVec::from_words(3, vec![u64::MAX]);
        assert_eq!(v.weight(), 3);
        assert_eq!(v, BitVec::from_indices(3, &[0, 1, 2]));
    }

    #[test]
    fn dot_is_parity_of_overlap() {
        let a: BitVec = "1101".parse().unwrap();
        let b: BitVec = "1011".parse().unwrap();
        assert!(!a.dot(&b));
        let c: BitVec = "1000".parse().unwrap();
        assert!(a.dot(&c));
    }
}
