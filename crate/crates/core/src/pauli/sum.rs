use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;

use super::{Phase, PauliString};
use crate::error::{ensure_same_qubits, Error, Result};
use crate::linalg::CMatrix;

/// Terms with `|weight|` below this are dropped.
pub const PRUNE_TOLERANCE: f64 = 1e-12;

/// Real-weighted sum of phase-free Pauli strings.
#[derive(Clone, PartialEq, Default)]
pub struct PauliSum {
    num_qubits: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(num_qubits: usize, weight: f64) -> Self {
        let mut s = Self::new(num_qubits);
        s.add_term(PauliString::identity(num_qubits), weight)
            .expect("identity has a real phase");
        s
    }

    /// Collects terms, merging duplicates and pruning negligible weights.
    pub fn from_terms<I>(num_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut s = Self::new(num_qubits);
        for (p, w) in terms {
            s.add_term(p, w)?;
        }
        Ok(s)
    }

    /// Parses `[("ZZ", 1.0), ...]`-style literals; handy in tests and examples.
    pub fn from_labels(labels: &[(&str, f64)]) -> Result<Self> {
        let first = labels
            .first()
            .ok_or_else(|| Error::Argument("no terms given".into()))?;
        let n = first.0.len();
        let terms = labels
            .iter()
            .map(|(s, w)| Ok((s.parse::<PauliString>()?, *w)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, terms)
    }

    /// Adds `weight * p`. A `-1` phase on `p` flips the sign; imaginary phases are rejected.
    pub fn add_term(&mut self, p: PauliString, weight: f64) -> Result<()> {
        ensure_same_qubits(self.num_qubits, p.num_qubits(), "pauli sum term")?;
        let w = match p.phase() {
            Phase::PlusOne => weight,
            Phase::MinusOne => -weight,
            _ => {
                return Err(Error::Argument(format!(
                    "term {p} has an imaginary phase; Pauli sums hold real weights"
                )))
            }
        };
        let key = p.phase_free();
        let merged = self.terms.get(&key).copied().unwrap_or(0.0) + w;
        if merged.abs() < PRUNE_TOLERANCE {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, merged);
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(p, w)| (p, *w))
    }

    pub fn weight(&self, p: &PauliString) -> f64 {
        self.terms.get(&p.phase_free()).copied().unwrap_or(0.0)
    }

    pub fn identity_weight(&self) -> f64 {
        self.weight(&PauliString::identity(self.num_qubits))
    }

    /// Sum of `|w|` over non-identity terms; bounds the spread of the spectrum
    /// around the identity weight.
    pub fn non_identity_one_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(p, _)| !p.is_identity())
            .map(|(_, w)| w.abs())
            .sum()
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(|p| p.is_diagonal())
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        let terms = self.terms.iter().map(|(p, w)| (p.clone(), w * factor));
        PauliSum::from_terms(self.num_qubits, terms).expect("phase-free keys")
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        ensure_same_qubits(self.num_qubits, other.num_qubits, "pauli sum add")?;
        let mut out = self.clone();
        for (p, w) in other.terms() {
            out.add_term(p.clone(), w)?;
        }
        Ok(out)
    }

    /// `self + alpha * I`.
    pub fn shifted(&self, alpha: f64) -> PauliSum {
        let mut out = self.clone();
        out.add_term(PauliString::identity(self.num_qubits), alpha)
            .expect("identity has a real phase");
        out
    }

    /// Distributes `self * other`, merging like terms.
    ///
    /// Products of Hermitian sums may carry imaginary weights on individual
    /// strings that cancel in aggregate. Residues within rounding of the
    /// operand scale are discarded; anything larger means the operands were
    /// not Hermitian-compatible and is reported.
    pub fn sum_multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        ensure_same_qubits(self.num_qubits, other.num_qubits, "pauli sum multiply")?;
        let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
        for (a, wa) in &self.terms {
            for (b, wb) in &other.terms {
                let prod = a.multiply(b)?;
                let c = prod.phase().to_complex() * (wa * wb);
                *acc.entry(prod.phase_free()).or_default() += c;
            }
        }
        let scale = self.terms.values().map(|w| w.abs()).sum::<f64>()
            * other.terms.values().map(|w| w.abs()).sum::<f64>();
        let imag_tol = PRUNE_TOLERANCE * scale.max(1.0);
        let mut out = PauliSum::new(self.num_qubits);
        for (p, c) in acc {
            if c.im.abs() > imag_tol {
                return Err(Error::Consistency(format!(
                    "imaginary weight {:e} on {p} in product of Pauli sums",
                    c.im
                )));
            }
            if c.re.abs() >= PRUNE_TOLERANCE {
                out.terms.insert(p, c.re);
            }
        }
        Ok(out)
    }

    /// `[H, H^2, ..., H^max_order]`.
    pub fn powers(&self, max_order: usize) -> Result<Vec<PauliSum>> {
        if max_order < 1 {
            return Err(Error::Argument("max_order must be at least 1".into()));
        }
        let mut out = vec![self.clone()];
        for _ in 1..max_order {
            let next = out.last().expect("non-empty").sum_multiply(self)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Dense `2^n x 2^n` matrix.
    pub fn to_dense(&self) -> CMatrix {
        let d = 1usize << self.num_qubits;
        let mut m = CMatrix::zeros(d);
        for (p, w) in &self.terms {
            let (xm, zm) = p.dense_masks();
            for b in 0..d as u64 {
                let (c, b2) = p.apply_with_masks(b, xm, zm);
                m[(b2 as usize, b as usize)] += c * *w;
            }
        }
        m
    }

    /// `H |v>` without forming the matrix.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply_into(v, &mut out);
        out
    }

    pub(crate) fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(v.len(), 1usize << self.num_qubits);
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (p, w) in &self.terms {
            let (xm, zm) = p.dense_masks();
            for (b, amp) in v.iter().enumerate() {
                if amp.re == 0.0 && amp.im == 0.0 {
                    continue;
                }
                let (c, b2) = p.apply_with_masks(b as u64, xm, zm);
                out[b2 as usize] += c * *w * amp;
            }
        }
    }

    /// Union of the strings appearing in any of `sums`, keyed by the largest
    /// absolute weight seen for each.
    pub fn string_union<'a, I>(sums: I) -> BTreeMap<PauliString, f64>
    where
        I: IntoIterator<Item = &'a PauliSum>,
    {
        let mut out: BTreeMap<PauliString, f64> = BTreeMap::new();
        for s in sums {
            for (p, w) in s.terms() {
                let e = out.entry(p.clone()).or_insert(0.0);
                *e = e.max(w.abs());
            }
        }
        out
    }
}

impl fmt::Display for PauliSum {
    /// One `STRING WEIGHT` line per term; weights use the shortest
    /// representation that round-trips.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, w) in &self.terms {
            writeln!(f, "{p} {w:?}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliSum[{}]{{", self.num_qubits)?;
        for (i, (p, w)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}: {w}")?;
        }
        f.write_str("}")
    }
}
