//! Bit blocks, bit-index arithmetic and the polar transform `x = u·G2^⊗n`.
//!
//! Blocks are packed into `u64` words, LSB of word 0 holding index 0. The
//! transform runs as `n` butterfly passes over the packed words; each pass
//! XORs position `j | 2^b` into position `j` for every `j` with bit `b`
//! clear. Since `G2^⊗n` is its own inverse, the same routine inverts it.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, PolarError, Result};

/// Largest supported block exponent.
pub const MAX_EXPONENT: u32 = 24;

/// Lanes whose index has bit `b` clear, for in-word butterflies (`b < 6`).
pub(crate) const LOW_LANES: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

pub(crate) fn words_for(n: u32) -> usize {
    ((1usize << n) + 63) / 64
}

/// Returns the exponent `n` of a power-of-two length.
pub fn exponent_of(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(PolarError::NotPowerOfTwo(len));
    }
    let n = len.trailing_zeros();
    check_exponent(n)?;
    Ok(n)
}

pub(crate) fn check_exponent(n: u32) -> Result<()> {
    if n > MAX_EXPONENT {
        Err(PolarError::ExponentTooLarge(n))
    } else {
        Ok(())
    }
}

/// A block of `2^n` bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitBlock {
    n: u32,
    words: Vec<u64>,
}

impl BitBlock {
    /// All-zero block of length `2^n`.
    pub fn zeros(n: u32) -> Result<Self> {
        check_exponent(n)?;
        Ok(Self {
            n,
            words: vec![0; words_for(n)],
        })
    }

    /// All-one block of length `2^n`.
    pub fn ones(n: u32) -> Result<Self> {
        let mut block = Self::zeros(n)?;
        for i in 0..block.len() {
            block.set(i, 1);
        }
        Ok(block)
    }

    /// Block with a single one at position `i`.
    pub fn indicator(n: u32, i: usize) -> Result<Self> {
        let mut block = Self::zeros(n)?;
        if i >= block.len() {
            return Err(invalid(format!("index {i} outside block of length {}", block.len())));
        }
        block.set(i, 1);
        Ok(block)
    }

    /// Builds a block from a slice of `0`/`1` values.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let n = exponent_of(bits.len())?;
        let mut block = Self::zeros(n)?;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => block.set(i, 1),
                other => return Err(invalid(format!("bit value {other} at position {i}"))),
            }
        }
        Ok(block)
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let n = exponent_of(bits.len())?;
        let mut block = Self::zeros(n)?;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                block.set(i, 1);
            }
        }
        Ok(block)
    }

    /// Block exponent.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Block length `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        ((self.words[i >> 6] >> (i & 63)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: u8) {
        debug_assert!(i < self.len());
        let mask = 1u64 << (i & 63);
        if bit & 1 == 1 {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.iter().collect()
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of positions where the two blocks differ.
    pub fn distance(&self, other: &Self) -> Result<usize> {
        self.check_same_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_same_len(other)?;
        Ok(Self {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        })
    }

    /// Block whose position `k` holds `self[perm[k]]`.
    pub fn gather(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(PolarError::LengthMismatch {
                expected: self.len(),
                actual: perm.len(),
            });
        }
        let mut out = Self::zeros(self.n)?;
        for (k, &src) in perm.iter().enumerate() {
            out.set(k, self.get(src));
        }
        Ok(out)
    }

    /// Block whose position `perm[k]` holds `self[k]`; inverse of [`gather`](Self::gather).
    pub fn scatter(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(PolarError::LengthMismatch {
                expected: self.len(),
                actual: perm.len(),
            });
        }
        let mut out = Self::zeros(self.n)?;
        for (k, &dst) in perm.iter().enumerate() {
            out.set(dst, self.get(k));
        }
        Ok(out)
    }

    /// Position-reversed block: position `i` moves to `N - 1 - i`.
    pub fn mirrored(&self) -> Self {
        let len = self.len();
        let words = if len >= 64 {
            self.words.iter().rev().map(|w| w.reverse_bits()).collect()
        } else {
            vec![self.words[0].reverse_bits() >> (64 - len)]
        };
        Self { n: self.n, words }
    }

    fn check_same_len(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(PolarError::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBlock({self})")
    }
}

impl fmt::Display for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitBlock {
    type Err = PolarError;

    /// Parses a string of `0`/`1` characters; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let bits = parse_bit_string(s)?;
        Self::from_bits(&bits)
    }
}

/// Parses `0`/`1` characters, skipping whitespace.
pub fn parse_bit_string(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(invalid(format!("unexpected character {other:?} in bit string"))),
        })
        .collect()
}

/// An index into a block of length `2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitIndex {
    value: usize,
    n: u32,
}

impl BitIndex {
    pub fn new(value: usize, n: u32) -> Result<Self> {
        check_exponent(n)?;
        if value >= 1 << n {
            return Err(invalid(format!("index {value} outside [0, 2^{n})")));
        }
        Ok(Self { value, n })
    }

    pub fn value(self) -> usize {
        self.value
    }

    pub fn n(self) -> u32 {
        self.n
    }
}

/// Reverses the `n`-bit binary expansion of the index.
pub fn bit_reversal(i: BitIndex) -> BitIndex {
    BitIndex {
        value: reverse_bits(i.value, i.n),
        n: i.n,
    }
}

/// Number of ones in the binary expansion of the index.
pub fn index_weight(i: BitIndex) -> u32 {
    i.value.count_ones()
}

/// Weight `2^wt(i)` of row `i` of `G2^⊗n`.
pub fn generator_row_weight(i: BitIndex) -> usize {
    1 << index_weight(i)
}

#[inline]
pub(crate) fn reverse_bits(value: usize, n: u32) -> usize {
    if n == 0 {
        0
    } else {
        value.reverse_bits() >> (usize::BITS - n)
    }
}

/// The bit-reversal permutation of `[0, 2^n)` as a table.
pub fn bit_reversal_table(n: u32) -> Vec<usize> {
    (0..1usize << n).map(|i| reverse_bits(i, n)).collect()
}

/// Computes `u·G2^⊗n` over GF(2).
pub fn polar_transform(u: &BitBlock) -> BitBlock {
    let mut x = u.clone();
    polar_transform_in_place(&mut x.words, u.n);
    x
}

/// Computes `u·(G2^⊗n)^T`, the transform of the index-reversed graph.
pub fn dual_transform(u: &BitBlock) -> BitBlock {
    polar_transform(&u.mirrored()).mirrored()
}

pub(crate) fn polar_transform_in_place(words: &mut [u64], n: u32) {
    for b in 0..n {
        if b < 6 {
            let shift = 1u32 << b;
            let mask = LOW_LANES[b as usize];
            for w in words.iter_mut() {
                *w ^= (*w >> shift) & mask;
            }
        } else {
            let stride = 1usize << (b - 6);
            for base in (0..words.len()).step_by(2 * stride) {
                for w in base..base + stride {
                    words[w] ^= words[w + stride];
                }
            }
        }
    }
}

/// Row `i` of `G2^⊗n` as a bit block: ones exactly at the subsets of `i`.
pub fn generator_row(i: BitIndex) -> BitBlock {
    let mut row = BitBlock::zeros(i.n).expect("validated exponent");
    for j in 0..row.len() {
        if j & !i.value == 0 {
            row.set(j, 1);
        }
    }
    row
}
