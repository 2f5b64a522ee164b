use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Letter, PauliString, PauliSum};
use crate::bits::word_count;
use crate::error::{ensure_same_qubits, Error, Result};

/// Per-qubit measurement axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub fn as_char(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }

    fn letter(self) -> Letter {
        match self {
            Basis::X => Letter::X,
            Basis::Y => Letter::Y,
            Basis::Z => Letter::Z,
        }
    }
}

/// Tensor-product measurement basis: one axis per qubit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tpb(Vec<Basis>);

impl Tpb {
    pub fn new(axes: Vec<Basis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Argument("a measurement basis needs at least one qubit".into()));
        }
        Ok(Self(axes))
    }

    /// The computational basis.
    pub fn all_z(num_qubits: usize) -> Self {
        Self(vec![Basis::Z; num_qubits])
    }

    pub fn num_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn axes(&self) -> &[Basis] {
        &self.0
    }

    pub fn is_all_z(&self) -> bool {
        self.0.iter().all(|&b| b == Basis::Z)
    }

    /// True when every non-identity letter of `p` matches the axis on its qubit.
    pub fn hosts(&self, p: &PauliString) -> bool {
        p.num_qubits() == self.num_qubits()
            && (0..p.num_qubits()).all(|q| {
                let l = p.letter(q);
                l == Letter::I || l == self.0[q].letter()
            })
    }

    /// The string with this basis' letter on every qubit.
    pub fn as_pauli(&self) -> PauliString {
        let mut p = PauliString::identity(self.num_qubits());
        for (q, b) in self.0.iter().enumerate() {
            p.set_letter(q, b.letter());
        }
        p
    }
}

impl fmt::Display for Tpb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|b| b.as_char()).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Tpb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tpb({self})")
    }
}

impl FromStr for Tpb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .chars()
            .map(|c| match c {
                'X' => Ok(Basis::X),
                'Y' => Ok(Basis::Y),
                'Z' => Ok(Basis::Z),
                other => Err(Error::Argument(format!(
                    "invalid basis letter {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Tpb::new(axes)
    }
}

impl Serialize for Tpb {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tpb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// True iff on every qubit the letters agree or one of them is identity.
pub fn qubitwise_commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    ensure_same_qubits(a.num_qubits(), b.num_qubits(), "qubit-wise commutation")?;
    let ok = a
        .x_words()
        .iter()
        .zip(a.z_words())
        .zip(b.x_words().iter().zip(b.z_words()))
        .all(|((ax, az), (bx, bz))| {
            let overlap = (ax | az) & (bx | bz);
            ((ax ^ bx) | (az ^ bz)) & overlap == 0
        });
    Ok(ok)
}

struct Group {
    fixed: Vec<u64>,
    x: Vec<u64>,
    z: Vec<u64>,
    members: Vec<PauliString>,
}

impl Group {
    fn accepts(&self, p: &PauliString) -> bool {
        let (px, pz) = (p.x_words(), p.z_words());
        (0..self.fixed.len()).all(|w| {
            let overlap = self.fixed[w] & (px[w] | pz[w]);
            ((self.x[w] ^ px[w]) | (self.z[w] ^ pz[w])) & overlap == 0
        })
    }

    fn absorb(&mut self, p: PauliString) {
        let (px, pz) = (p.x_words(), p.z_words());
        for w in 0..self.fixed.len() {
            let supp = px[w] | pz[w];
            self.fixed[w] |= supp;
            self.x[w] |= px[w] & supp;
            self.z[w] |= pz[w] & supp;
        }
        self.members.push(p);
    }

    fn basis(&self, n: usize) -> Tpb {
        let axes = (0..n)
            .map(|q| {
                let bit = |v: &[u64]| (v[q / 64] >> (q % 64)) & 1 == 1;
                if !bit(&self.fixed) {
                    return Basis::Z;
                }
                match (bit(&self.x), bit(&self.z)) {
                    (true, false) => Basis::X,
                    (true, true) => Basis::Y,
                    _ => Basis::Z,
                }
            })
            .collect();
        Tpb(axes)
    }
}

/// Greedy first-fit grouping of weighted strings into tensor-product bases.
///
/// Strings are visited by descending `|weight|`, ties broken by text order.
/// Qubits no member constrains are measured in Z. Phases are ignored.
pub fn group_tpb_weighted<I>(num_qubits: usize, strings: I) -> Result<BTreeMap<Tpb, Vec<PauliString>>>
where
    I: IntoIterator<Item = (PauliString, f64)>,
{
    let mut items: Vec<(PauliString, f64)> = strings
        .into_iter()
        .map(|(p, w)| (p.phase_free(), w.abs()))
        .collect();
    for (p, _) in &items {
        ensure_same_qubits(num_qubits, p.num_qubits(), "tpb grouping")?;
    }
    items.sort_by(|(pa, wa), (pb, wb)| wb.total_cmp(wa).then_with(|| pa.cmp(pb)));
    items.dedup_by(|a, b| a.0 == b.0);

    let words = word_count(num_qubits);
    let mut groups: Vec<Group> = Vec::new();
    for (p, _) in items {
        match groups.iter_mut().find(|g| g.accepts(&p)) {
            Some(g) => g.absorb(p),
            None => {
                let mut g = Group {
                    fixed: vec![0; words],
                    x: vec![0; words],
                    z: vec![0; words],
                    members: Vec::new(),
                };
                g.absorb(p);
                groups.push(g);
            }
        }
    }
    Ok(groups
        .into_iter()
        .map(|g| (g.basis(num_qubits), g.members))
        .collect())
}

/// Groups the strings of a Pauli sum using their weights for the visiting order.
pub fn group_tpb(sum: &PauliSum) -> Result<BTreeMap<Tpb, Vec<PauliString>>> {
    group_tpb_weighted(
        sum.num_qubits(),
        sum.terms().map(|(p, w)| (p.clone(), w)),
    )
}
