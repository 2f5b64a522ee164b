//! Packed measurement outcomes.
//!
//! Qubit `q` lives in bit `q % 64` of word `q / 64`. The textual form puts
//! qubit 0 first, and ordering is lexicographic on that text, which is the
//! same as numeric order of the dense index where qubit 0 is the most
//! significant bit.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

pub(crate) fn word_count(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    /// Builds the outcome for a dense index of an `len`-qubit register.
    pub fn from_index(index: u64, len: usize) -> Self {
        let mut out = Self::zeros(len);
        for q in 0..len {
            if (index >> (len - 1 - q)) & 1 == 1 {
                out.set(q, true);
            }
        }
        out
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), word_count(len));
        Self { len, words }
    }

    /// Dense index with qubit 0 as the most significant bit. `None` above 64 qubits.
    pub fn to_index(&self) -> Option<u64> {
        if self.len > 64 {
            return None;
        }
        let mut idx = 0u64;
        for q in 0..self.len {
            idx = (idx << 1) | self.get(q) as u64;
        }
        Some(idx)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, q: usize) -> bool {
        (self.words[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn set(&mut self, q: usize, value: bool) {
        let mask = 1u64 << (q % 64);
        if value {
            self.words[q / 64] |= mask;
        } else {
            self.words[q / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, q: usize) {
        self.words[q / 64] ^= 1u64 << (q % 64);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Parity of the bits selected by `mask` (same word layout).
    pub fn masked_parity(&self, mask: &[u64]) -> bool {
        let ones: u32 = self
            .words
            .iter()
            .zip(mask)
            .map(|(w, m)| (w & m).count_ones())
            .sum();
        ones & 1 == 1
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                if a != b {
                    return a.reverse_bits().cmp(&b.reverse_bits());
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|q| if self.get(q) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Argument("empty bitstring".into()));
        }
        let mut out = Self::zeros(s.len());
        for (q, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out.set(q, true),
                other => {
                    return Err(Error::Argument(format!(
                        "invalid character {other:?} in bitstring {s:?}"
                    )))
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip_uses_qubit_zero_as_msb() {
        let b: BitString = "01".parse().unwrap();
        assert_eq!(b.to_index(), Some(1));
        assert_eq!(BitString::from_index(2, 2).to_string(), "10");
        for idx in 0..32 {
            assert_eq!(BitString::from_index(idx, 5).to_index(), Some(idx));
        }
    }

    #[test]
    fn ordering_matches_text_order() {
        let mut v: Vec<BitString> = ["110", "001", "100", "011", "000"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        v.sort();
        let text: Vec<String> = v.iter().map(|b| b.to_string()).collect();
        assert_eq!(text, ["000", "001", "011", "100", "110"]);
    }

    #[test]
    fn ordering_across_words() {
        let mut a = BitString::zeros(130);
        let mut b = BitString::zeros(130);
        a.set(129, true);
        b.set(64, true);
        assert!(a < b);
        assert_eq!(a.to_string().len(), 130);
    }

    #[test]
    fn rejects_bad_chars() {
        assert!("01a".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().is_err());
    }
}
