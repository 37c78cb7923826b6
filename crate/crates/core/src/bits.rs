//! Fixed-length binary words.
//!
//! Bit 0 is the leftmost bit: the most significant bit of the first hex
//! character, and of the first packed `u64`. A 128-bit word therefore packs
//! as two `u64`s that read exactly like its hex rendering.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{BitXor, BitXorAssign};

use smallvec::SmallVec;

use crate::error::{Error, Result};

type Words = SmallVec<[u64; 2]>;

/// A binary vector of fixed length with packed 64-bit storage.
///
/// Bits beyond `len` in the last storage word are always zero, so equality,
/// ordering and hashing only see the meaningful bits. Ordering is by length
/// first, then by value read left to right.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitWord {
    len: usize,
    words: Words,
}

#[inline]
fn mask_for(bit: usize) -> u64 {
    1u64 << (63 - (bit % 64))
}

impl BitWord {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: SmallVec::from_elem(0, len.div_ceil(64)),
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut w = Self {
            len,
            words: SmallVec::from_elem(u64::MAX, len.div_ceil(64)),
        };
        w.clear_tail();
        w
    }

    /// The unit vector with a single one at position `i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut w = Self::zeros(len);
        w.set(i, true);
        w
    }

    /// Alternating pattern `0101…` (or `1010…` when `start_bit` is true).
    pub fn alternating(len: usize, start_bit: bool) -> Self {
        let pattern = if start_bit {
            0xAAAA_AAAA_AAAA_AAAA
        } else {
            0x5555_5555_5555_5555
        };
        let mut w = Self {
            len,
            words: SmallVec::from_elem(pattern, len.div_ceil(64)),
        };
        w.clear_tail();
        w
    }

    /// Builds a word from packed MSB-first storage words; excess bits are cleared.
    pub fn from_words(len: usize, words: &[u64]) -> Result<Self> {
        let needed = len.div_ceil(64);
        if words.len() != needed {
            return Err(Error::LengthMismatch {
                expected: needed * 64,
                actual: words.len() * 64,
            });
        }
        let mut w = Self {
            len,
            words: SmallVec::from_slice(words),
        };
        w.clear_tail();
        Ok(w)
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Words::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                words[len / 64] |= mask_for(len);
            }
            len += 1;
        }
        Self { len, words }
    }

    /// Parses contiguous hex; whitespace is ignored and either case is accepted.
    /// The resulting length is four bits per hex digit.
    pub fn from_hex(s: &str) -> Result<Self> {
        let mut words = Words::new();
        let mut len = 0usize;
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidHex(String::from(s)))? as u64;
            if len % 64 == 0 {
                words.push(0);
            }
            let shift = 60 - (len % 64);
            words[len / 64] |= nibble << shift;
            len += 4;
        }
        if len == 0 {
            return Err(Error::InvalidHex(String::from(s)));
        }
        Ok(Self { len, words })
    }

    /// Parses hex of exactly `len` bits; zero padding up to the next nibble is accepted.
    pub fn from_hex_len(s: &str, len: usize) -> Result<Self> {
        let w = Self::from_hex(s)?;
        // a trailing partial nibble arrives zero-padded
        if w.len == len.div_ceil(4) * 4 && w.len != len {
            let cut = w.slice(0, len);
            if cut.weight() == w.weight() {
                return Ok(cut);
            }
        }
        if w.len != len {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: w.len,
            });
        }
        Ok(w)
    }

    /// Uppercase hex rendering; a trailing partial nibble is zero-padded.
    pub fn to_hex(&self) -> String {
        const DIGITS: &[u8; 16] = b"0123456789ABCDEF";
        let nibbles = self.len.div_ceil(4);
        let mut out = String::with_capacity(nibbles);
        for i in 0..nibbles {
            let bit = i * 4;
            let nibble = (self.words[bit / 64] >> (60 - (bit % 64))) & 0xF;
            out.push(DIGITS[nibble as usize] as char);
        }
        out
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
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / 64] & mask_for(i) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        if value {
            self.words[i / 64] |= mask_for(i);
        } else {
            self.words[i / 64] &= !mask_for(i);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / 64] ^= mask_for(i);
    }

    /// Hamming weight.
    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Positions of the ones, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut rest = word;
            core::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let lz = rest.leading_zeros() as usize;
                rest &= !(1u64 << (63 - lz));
                Some(wi * 64 + lz)
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        Ok(())
    }

    pub fn distance(&self, other: &Self) -> Result<usize> {
        self.check_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Size of the intersection of the supports.
    pub fn overlap(&self, other: &Self) -> Result<usize> {
        self.check_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum())
    }

    pub fn checked_xor(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(out)
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        Ok(out)
    }

    pub fn not(&self) -> Self {
        let mut out = self.clone();
        for a in out.words.iter_mut() {
            *a = !*a;
        }
        out.clear_tail();
        out
    }

    /// Reads `len ≤ 64` bits starting at `start`; bit `start` becomes the most
    /// significant of the returned `len`-bit value.
    pub fn read_u64(&self, start: usize, len: usize) -> u64 {
        assert!(len <= 64 && start + len <= self.len);
        if len == 0 {
            return 0;
        }
        let wi = start / 64;
        let off = start % 64;
        let hi = self.words[wi] << off;
        let lo = if off != 0 && wi + 1 < self.words.len() {
            self.words[wi + 1] >> (64 - off)
        } else {
            0
        };
        (hi | lo) >> (64 - len)
    }

    /// Overwrites `len ≤ 64` bits starting at `start` with the low `len` bits
    /// of `value` (most significant first).
    pub fn write_u64(&mut self, start: usize, len: usize, value: u64) {
        assert!(len <= 64 && start + len <= self.len);
        for j in 0..len {
            self.set(start + j, (value >> (len - 1 - j)) & 1 == 1);
        }
    }

    /// Copy of `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.len);
        if start % 64 == 0 {
            let first = start / 64;
            let count = len.div_ceil(64);
            let mut out = Self {
                len,
                words: SmallVec::from_slice(&self.words[first..first + count]),
            };
            out.clear_tail();
            return out;
        }
        Self::from_bits((start..start + len).map(|i| self.get(i)))
    }

    pub fn concat(&self, other: &Self) -> Self {
        if self.len % 64 == 0 {
            let mut words = self.words.clone();
            words.extend_from_slice(&other.words);
            return Self {
                len: self.len + other.len,
                words,
            };
        }
        Self::from_bits(self.iter().chain(other.iter()))
    }

    /// Simultaneous right circular shift by one of every `block`-bit block.
    pub fn qc_shift(&self, block: usize) -> Self {
        assert!(block > 0 && self.len % block == 0);
        let mut out = Self::zeros(self.len);
        for b in (0..self.len).step_by(block) {
            for j in 0..block {
                if self.get(b + j) {
                    out.set(b + (j + 1) % block, true);
                }
            }
        }
        out
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX << (64 - rem);
            }
        }
    }
}

/// Hamming distance; errors on length mismatch.
pub fn hamming_distance(a: &BitWord, b: &BitWord) -> Result<usize> {
    a.distance(b)
}

/// Hamming weight.
pub fn weight(a: &BitWord) -> usize {
    a.weight()
}

/// `|Supp(a) ∩ Supp(b)|`; errors on length mismatch.
pub fn overlap(a: &BitWord, b: &BitWord) -> Result<usize> {
    a.overlap(b)
}

/// Panics on length mismatch; use [`BitWord::checked_xor`] for a fallible form.
impl BitXor for &BitWord {
    type Output = BitWord;

    fn bitxor(self, rhs: &BitWord) -> BitWord {
        self.checked_xor(rhs).expect("xor of words with different lengths")
    }
}

impl BitXorAssign<&BitWord> for BitWord {
    fn bitxor_assign(&mut self, rhs: &BitWord) {
        assert_eq!(self.len, rhs.len, "xor of words with different lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({}, {})", self.len, self.to_hex())
    }
}

impl core::str::FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_hex(s)
    }
}
