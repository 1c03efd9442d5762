//! Classical spin configurations as packed bit strings.
//!
//! Bit `b_i = 0` means `z_i = +1`, bit `b_i = 1` means `z_i = -1`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// An `n`-bit computational basis state.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinState {
    n: usize,
    words: Box<[u64]>,
}

impl SpinState {
    /// All bits zero, i.e. every spin up.
    pub fn all_up(n: usize) -> Self {
        Self {
            n,
            words: vec![0; words_for(n)].into_boxed_slice(),
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = Self::all_up(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.flip(i);
            }
        }
        s
    }

    /// Builds a state from spin values; `+1 -> bit 0`, `-1 -> bit 1`.
    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        let mut s = Self::all_up(spins.len());
        for (i, &z) in spins.iter().enumerate() {
            match z {
                1 => {}
                -1 => s.flip(i),
                other => {
                    return Err(Error::contract(format!(
                        "spin {i} has value {other}, expected +1 or -1"
                    )))
                }
            }
        }
        Ok(s)
    }

    /// Low `n` bits of `index`; bit `i` of the integer is qubit `i`.
    pub fn from_index(n: usize, index: u64) -> Self {
        let mut s = Self::all_up(n);
        if n > 0 {
            let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
            s.words[0] = index & mask;
        }
        s
    }

    pub(crate) fn from_words(n: usize, words: Box<[u64]>) -> Self {
        debug_assert_eq!(words.len(), words_for(n));
        Self { n, words }
    }

    /// Parses a string of `0`/`1` characters, character `i` being bit `i`.
    pub fn parse(text: &str) -> Result<Self> {
        let bits = text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    /// Eigenvalue of `σz_i`.
    #[inline]
    pub fn spin(&self, i: usize) -> f64 {
        if self.bit(i) {
            -1.0
        } else {
            1.0
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.flip(i);
        s
    }

    /// Every spin reversed.
    pub fn global_flip(&self) -> Self {
        let mut s = self.clone();
        for i in 0..self.n {
            s.flip(i);
        }
        s
    }

    pub fn hamming(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Integer index for states of at most 64 bits.
    pub fn index(&self) -> Option<u64> {
        (self.n <= 64).then(|| self.words.first().copied().unwrap_or(0))
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.n)
            .map(|i| if self.bit(i) { '1' } else { '0' })
            .collect()
    }
}

/// Lexicographic order of the bit string `b_0 b_1 ... b_{n-1}`.
pub(crate) fn lex_cmp_words(a: &[u64], b: &[u64]) -> Ordering {
    for (&x, &y) in a.iter().zip(b.iter()) {
        let diff = x ^ y;
        if diff != 0 {
            let i = diff.trailing_zeros();
            return if (x >> i) & 1 == 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
    }
    a.len().cmp(&b.len())
}

impl Ord for SpinState {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_cmp_words(&self.words, &other.words).then(self.n.cmp(&other.n))
    }
}

impl PartialOrd for SpinState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinState({})", self.to_bit_string())
    }
}

impl fmt::Display for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}
