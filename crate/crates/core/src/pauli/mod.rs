//! Pauli strings in symplectic form, real-weighted Pauli sums, and
//! tensor-product-basis grouping.
//!
//! A string stores one X bit and one Z bit per qubit plus a phase in
//! `{+1, +i, -1, -i}`. The letter on a qubit is read from its bits:
//! `(0,0) = I`, `(1,0) = X`, `(1,1) = Y`, `(0,1) = Z`, where `Y` is the
//! Hermitian Pauli `i X Z`.

mod sum;
mod tpb;

pub use sum::{PauliSum, PRUNE_TOLERANCE};
pub use tpb::{group_tpb, group_tpb_weighted, qubitwise_commutes, Basis, Tpb};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::bits::{word_count, BitString};
use crate::error::{ensure_same_qubits, Error, Result};

/// Multiplicative phase `i^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Phase {
    #[default]
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> i64 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_exponent(self.exponent() + rhs.exponent())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn rank(self) -> u8 {
        match self {
            Letter::I => 0,
            Letter::X => 1,
            Letter::Y => 2,
            Letter::Z => 3,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Phase,
}

fn popcount_and(a: &[u64], b: &[u64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as i64).sum()
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        let w = word_count(num_qubits);
        Self {
            num_qubits,
            x: vec![0; w],
            z: vec![0; w],
            phase: Phase::PlusOne,
        }
    }

    /// Single-letter string on `qubit`.
    pub fn single(num_qubits: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = Self::identity(num_qubits);
        p.set_letter(qubit, letter);
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// The same letters with phase `+1`.
    pub fn phase_free(&self) -> Self {
        Self {
            phase: Phase::PlusOne,
            ..self.clone()
        }
    }

    pub fn letter(&self, q: usize) -> Letter {
        let xb = (self.x[q / 64] >> (q % 64)) & 1 == 1;
        let zb = (self.z[q / 64] >> (q % 64)) & 1 == 1;
        match (xb, zb) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        assert!(q < self.num_qubits, "qubit {q} out of range");
        let (xb, zb) = match letter {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        };
        let m = 1u64 << (q % 64);
        let w = q / 64;
        self.x[w] = if xb { self.x[w] | m } else { self.x[w] & !m };
        self.z[w] = if zb { self.z[w] | m } else { self.z[w] & !m };
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// True when every letter is I or Z.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    /// Mask (word layout of [`BitString`]) of the qubits with a non-identity letter.
    pub fn support_mask(&self) -> Vec<u64> {
        self.x.iter().zip(&self.z).map(|(a, b)| a | b).collect()
    }

    pub fn weight(&self) -> usize {
        self.support_mask().iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Phase-exact product `self * other`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        ensure_same_qubits(self.num_qubits, other.num_qubits, "pauli multiply")?;
        let x: Vec<u64> = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z: Vec<u64> = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        // Letter form is i^{|x&z|} X^x Z^z; reorder Z1 X2 -> X2 Z1 at a cost of (-1)^{|z1&x2|}.
        let k = self.phase.exponent()
            + other.phase.exponent()
            + popcount_and(&self.x, &self.z)
            + popcount_and(&other.x, &other.z)
            + 2 * popcount_and(&self.z, &other.x)
            - popcount_and(&x, &z);
        Ok(PauliString {
            num_qubits: self.num_qubits,
            x,
            z,
            phase: Phase::from_exponent(k),
        })
    }

    /// True when the two strings commute as operators.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let s = popcount_and(&self.x, &other.z) + popcount_and(&self.z, &other.x);
        s % 2 == 0
    }

    /// `+1` or `-1`: parity of `outcome` on this string's support.
    pub fn outcome_eigenvalue(&self, outcome: &BitString) -> Result<i8> {
        ensure_same_qubits(self.num_qubits, outcome.len(), "outcome eigenvalue")?;
        Ok(if outcome.masked_parity(&self.support_mask()) {
            -1
        } else {
            1
        })
    }

    /// Support mask in dense-index layout, where qubit `q` is bit `n - 1 - q`.
    pub fn dense_support_mask(&self) -> u64 {
        let (xm, zm) = self.dense_masks();
        xm | zm
    }

    /// X and Z masks in dense-index layout. Only valid for at most 64 qubits.
    pub fn dense_masks(&self) -> (u64, u64) {
        assert!(self.num_qubits <= 64, "dense masks need at most 64 qubits");
        let n = self.num_qubits;
        let mut xm = 0u64;
        let mut zm = 0u64;
        for q in 0..n {
            match self.letter(q) {
                Letter::I => {}
                Letter::X => xm |= 1 << (n - 1 - q),
                Letter::Z => zm |= 1 << (n - 1 - q),
                Letter::Y => {
                    xm |= 1 << (n - 1 - q);
                    zm |= 1 << (n - 1 - q);
                }
            }
        }
        (xm, zm)
    }

    /// Action on a computational basis index: `P|b> = c |b'>`.
    pub fn apply_to_index(&self, b: u64) -> (Complex64, u64) {
        let (xm, zm) = self.dense_masks();
        self.apply_with_masks(b, xm, zm)
    }

    pub(crate) fn apply_with_masks(&self, b: u64, xm: u64, zm: u64) -> (Complex64, u64) {
        let y_count = (xm & zm).count_ones() as i64;
        let mut c = Phase::from_exponent(self.phase.exponent() + y_count).to_complex();
        if (b & zm).count_ones() % 2 == 1 {
            c = -c;
        }
        (c, b ^ xm)
    }

    fn cmp_letters(&self, other: &Self) -> Ordering {
        for w in 0..self.x.len().min(other.x.len()) {
            let diff = (self.x[w] ^ other.x[w]) | (self.z[w] ^ other.z[w]);
            if diff != 0 {
                let q = w * 64 + diff.trailing_zeros() as usize;
                return self.letter(q).rank().cmp(&other.letter(q).rank());
            }
        }
        Ordering::Equal
    }
}

impl Ord for PauliString {
    /// Lexicographic on the text form with `I < X < Y < Z`, then by phase.
    fn cmp(&self, other: &Self) -> Ordering {
        self.num_qubits
            .cmp(&other.num_qubits)
            .then_with(|| self.cmp_letters(other))
            .then_with(|| self.phase.cmp(&other.phase))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    /// Letters only; the phase is shown as a prefix when it is not `+1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            Phase::PlusOne => {}
            Phase::PlusI => f.write_str("+i")?,
            Phase::MinusOne => f.write_str("-")?,
            Phase::MinusI => f.write_str("-i")?,
        }
        let s: String = (0..self.num_qubits).map(|q| self.letter(q).as_char()).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses a fixed-length uppercase string over `{I, X, Y, Z}`.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Argument("empty Pauli string".into()));
        }
        let mut p = PauliString::identity(s.chars().count());
        for (q, c) in s.chars().enumerate() {
            let letter = match c {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                other => {
                    return Err(Error::Argument(format!(
                        "invalid Pauli letter {other:?} in {s:?}"
                    )))
                }
            };
            p.set_letter(q, letter);
        }
        Ok(p)
    }
}
