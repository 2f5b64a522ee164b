use std::collections::{BTreeMap, HashMap};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::circuit::{hadamard, s_dagger};
use super::noise::NoiseModel;
use super::state::{bit_pos, check_probability, DensityMatrix, StateVector};
use crate::bits::BitString;
use crate::error::{ensure_same_qubits, Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::pauli::{Basis, PauliString, Tpb};

/// Largest register for which distributions may be stored densely.
pub const DENSE_DIST_LIMIT: usize = 20;

/// Outcome probabilities (or counts) for one measurement basis.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcomes {
    /// Exact, indexed by dense index (qubit 0 most significant).
    Dense(Vec<f64>),
    /// Exact, zero entries omitted.
    Sparse(BTreeMap<BitString, f64>),
    /// Empirical counts; probabilities are `count / shots`.
    Counts(BTreeMap<BitString, u64>),
}

/// Distribution of outcomes in a tensor-product basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbDist {
    basis: Tpb,
    outcomes: Outcomes,
    shots: Option<u64>,
}

fn check_sum(total: f64) -> Result<()> {
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Argument(format!(
            "probabilities sum to {total}, expected 1 within 1e-9"
        )));
    }
    Ok(())
}

fn check_entry(p: f64) -> Result<f64> {
    if !p.is_finite() || p < -1e-12 {
        return Err(Error::Argument(format!("invalid probability {p}")));
    }
    Ok(p.max(0.0))
}

impl ProbDist {
    /// Exact dense distribution. Entries down to `-1e-12` are treated as rounding and zeroed.
    pub fn dense(basis: Tpb, probs: Vec<f64>) -> Result<Self> {
        let n = basis.num_qubits();
        if n > DENSE_DIST_LIMIT {
            return Err(Error::Capacity {
                what: "dense distribution",
                requested: n,
                limit: DENSE_DIST_LIMIT,
            });
        }
        if probs.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "{} probabilities for {n} qubits",
                probs.len()
            )));
        }
        let probs = probs.into_iter().map(check_entry).collect::<Result<Vec<_>>>()?;
        check_sum(probs.iter().sum())?;
        Ok(Self {
            basis,
            outcomes: Outcomes::Dense(probs),
            shots: None,
        })
    }

    pub fn sparse(basis: Tpb, probs: BTreeMap<BitString, f64>) -> Result<Self> {
        let n = basis.num_qubits();
        let mut out = BTreeMap::new();
        for (b, p) in probs {
            ensure_same_qubits(n, b.len(), "outcome length")?;
            let p = check_entry(p)?;
            if p > 0.0 {
                out.insert(b, p);
            }
        }
        check_sum(out.values().sum())?;
        Ok(Self {
            basis,
            outcomes: Outcomes::Sparse(out),
            shots: None,
        })
    }

    pub fn from_counts(basis: Tpb, counts: BTreeMap<BitString, u64>) -> Result<Self> {
        let n = basis.num_qubits();
        for b in counts.keys() {
            ensure_same_qubits(n, b.len(), "outcome length")?;
        }
        let counts: BTreeMap<_, _> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        let shots: u64 = counts.values().sum();
        if shots == 0 {
            return Err(Error::Argument("counts are empty".into()));
        }
        Ok(Self {
            basis,
            outcomes: Outcomes::Counts(counts),
            shots: Some(shots),
        })
    }

    pub fn basis(&self) -> &Tpb {
        &self.basis
    }

    pub fn num_qubits(&self) -> usize {
        self.basis.num_qubits()
    }

    pub fn outcomes(&self) -> &Outcomes {
        &self.outcomes
    }

    /// Number of shots behind an empirical distribution; `None` when exact.
    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    pub fn is_exact(&self) -> bool {
        self.shots.is_none()
    }

    pub fn probability(&self, outcome: &BitString) -> f64 {
        match &self.outcomes {
            Outcomes::Dense(v) => outcome.to_index().map(|i| v[i as usize]).unwrap_or(0.0),
            Outcomes::Sparse(m) => m.get(outcome).copied().unwrap_or(0.0),
            Outcomes::Counts(m) => {
                m.get(outcome).copied().unwrap_or(0) as f64 / self.shots.unwrap_or(1) as f64
            }
        }
    }

    /// Calls `f(outcome, p)` for every stored outcome in outcome order.
    /// Dense distributions visit every index, including zeros.
    pub fn for_each(&self, mut f: impl FnMut(OutcomeRef<'_>, f64)) {
        match &self.outcomes {
            Outcomes::Dense(v) => v
                .iter()
                .enumerate()
                .for_each(|(i, &p)| f(OutcomeRef::Index(i as u64), p)),
            Outcomes::Sparse(m) => m.iter().for_each(|(b, &p)| f(OutcomeRef::Bits(b), p)),
            Outcomes::Counts(m) => {
                let s = self.shots.unwrap_or(1) as f64;
                m.iter().for_each(|(b, &c)| f(OutcomeRef::Bits(b), c as f64 / s))
            }
        }
    }

    /// `(eigenvalue, probability)` pairs for `p`'s parity on each outcome.
    pub fn parity_pairs(&self, p: &PauliString) -> Result<Vec<(f64, f64)>> {
        ensure_same_qubits(self.num_qubits(), p.num_qubits(), "parity")?;
        let mask = ParityMask::of(p);
        let mut out = Vec::new();
        self.for_each(|o, prob| out.push((if mask.odd(o) { -1.0 } else { 1.0 }, prob)));
        Ok(out)
    }

    /// All stored `(outcome, probability)` pairs in outcome order.
    pub fn entries(&self) -> Vec<(BitString, f64)> {
        let n = self.num_qubits();
        let mut out = Vec::new();
        self.for_each(|o, p| out.push((o.to_bits(n), p)));
        out
    }

    /// Dense probability vector, if the register is small enough.
    pub fn to_dense(&self) -> Option<Vec<f64>> {
        let n = self.num_qubits();
        if n > DENSE_DIST_LIMIT {
            return None;
        }
        if let Outcomes::Dense(v) = &self.outcomes {
            return Some(v.clone());
        }
        let mut v = vec![0.0; 1 << n];
        self.for_each(|o, p| {
            if let OutcomeRef::Bits(b) = o {
                v[b.to_index().expect("n <= 20") as usize] = p;
            }
        });
        Some(v)
    }
}

/// Borrowed outcome key used during iteration.
#[derive(Clone, Copy, Debug)]
pub enum OutcomeRef<'a> {
    Index(u64),
    Bits(&'a BitString),
}

impl OutcomeRef<'_> {
    pub fn to_bits(self, n: usize) -> BitString {
        match self {
            OutcomeRef::Index(i) => BitString::from_index(i, n),
            OutcomeRef::Bits(b) => b.clone(),
        }
    }
}

/// Support of a Pauli string in both outcome layouts.
#[derive(Clone, Debug)]
pub struct ParityMask {
    dense: u64,
    words: Vec<u64>,
}

impl ParityMask {
    pub fn of(p: &PauliString) -> Self {
        let dense = if p.num_qubits() <= 64 {
            p.dense_support_mask()
        } else {
            0
        };
        Self {
            dense,
            words: p.support_mask(),
        }
    }

    pub fn odd(&self, o: OutcomeRef<'_>) -> bool {
        match o {
            OutcomeRef::Index(i) => (i & self.dense).count_ones() % 2 == 1,
            OutcomeRef::Bits(b) => b.masked_parity(&self.words),
        }
    }
}

/// States that can report outcome probabilities in a rotated basis.
pub trait Measurable {
    fn num_qubits(&self) -> usize;
    /// Noise-free dense probabilities after rotating into `basis`.
    fn basis_probabilities(&self, basis: &Tpb) -> Result<Vec<f64>>;
}

pub(crate) fn rotation(b: Basis) -> Option<[[C64; 2]; 2]> {
    match b {
        Basis::Z => None,
        Basis::X => Some(hadamard()),
        Basis::Y => {
            // H S^dagger
            let (h, sd) = (hadamard(), s_dagger());
            let mut m = [[ZERO; 2]; 2];
            for (r, row) in m.iter_mut().enumerate() {
                for (c, v) in row.iter_mut().enumerate() {
                    *v = h[r][0] * sd[0][c] + h[r][1] * sd[1][c];
                }
            }
            Some(m)
        }
    }
}

impl Measurable for StateVector {
    fn num_qubits(&self) -> usize {
        StateVector::num_qubits(self)
    }

    fn basis_probabilities(&self, basis: &Tpb) -> Result<Vec<f64>> {
        ensure_same_qubits(self.num_qubits(), basis.num_qubits(), "measurement basis")?;
        let mut s = self.clone();
        for (q, &b) in basis.axes().iter().enumerate() {
            if let Some(u) = rotation(b) {
                s.apply_1q(&u, q);
            }
        }
        Ok(s.amplitudes().iter().map(|a| a.norm_sqr()).collect())
    }
}

impl Measurable for DensityMatrix {
    fn num_qubits(&self) -> usize {
        DensityMatrix::num_qubits(self)
    }

    fn basis_probabilities(&self, basis: &Tpb) -> Result<Vec<f64>> {
        ensure_same_qubits(self.num_qubits(), basis.num_qubits(), "measurement basis")?;
        Ok(rotated_diagonal(self.matrix(), basis).into_iter().map(|v| v.re).collect())
    }
}

/// Diagonal of `U m U^dagger` for the product rotation `U` into `basis`.
///
/// Contracts one qubit at a time, so the working tensor halves at every step
/// and the whole pass costs a few sweeps over `m`.
pub(crate) fn rotated_diagonal(m: &CMatrix, basis: &Tpb) -> Vec<C64> {
    let n = basis.num_qubits();
    debug_assert_eq!(m.dim(), 1 << n);
    // Layout: t[(d, r, c)] with d over processed qubits (high bits), r and c
    // over the remaining qubits. Initially that is m row-major.
    let mut t: Vec<C64> = m.data().to_vec();
    for (k, &axis) in basis.axes().iter().enumerate() {
        let half = 1usize << (n - k - 1);
        let rem = 2 * half;
        let blocks = 1usize << k;
        let mut next = vec![ZERO; blocks * 2 * half * half];
        let u = rotation(axis);
        for d in 0..blocks {
            let src = &t[d * rem * rem..(d + 1) * rem * rem];
            for i in 0..2 {
                let dst = &mut next[(2 * d + i) * half * half..(2 * d + i + 1) * half * half];
                match &u {
                    None => {
                        for r in 0..half {
                            let row = (i * half + r) * rem + i * half;
                            dst[r * half..(r + 1) * half].copy_from_slice(&src[row..row + half]);
                        }
                    }
                    Some(u) => {
                        for a in 0..2 {
                            for b in 0..2 {
                                let cab = u[i][a] * u[i][b].conj();
                                for r in 0..half {
                                    let row = (a * half + r) * rem + b * half;
                                    let out = &mut dst[r * half..(r + 1) * half];
                                    for (o, s) in out.iter_mut().zip(&src[row..row + half]) {
                                        *o += cab * s;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        t = next;
    }
    t
}

/// Independent symmetric bit flips with probability `q` on every qubit.
pub fn apply_readout(probs: &mut [f64], n: usize, q: f64) -> Result<()> {
    check_probability("readout flip", q)?;
    if q == 0.0 {
        return Ok(());
    }
    for qubit in 0..n {
        let s = 1usize << bit_pos(n, qubit);
        for i0 in (0..probs.len()).filter(|i| i & s == 0) {
            let (a, b) = (probs[i0], probs[i0 | s]);
            probs[i0] = (1.0 - q) * a + q * b;
            probs[i0 | s] = q * a + (1.0 - q) * b;
        }
    }
    Ok(())
}

/// Exact outcome distribution of `state` in `basis`, with readout flips from `nm`.
pub fn measure_probs<S: Measurable>(state: &S, basis: &Tpb, nm: &NoiseModel) -> Result<ProbDist> {
    let mut probs = state.basis_probabilities(basis)?;
    apply_readout(&mut probs, state.num_qubits(), nm.readout_flip)?;
    ProbDist::dense(basis.clone(), probs)
}

/// Stream id for a sampling call, derived from the basis text and a call index.
pub fn sampling_stream(basis: &Tpb, call_index: u64) -> u64 {
    // FNV-1a over the basis text, then mixed with the call index.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in basis.to_string().bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    splitmix(h ^ splitmix(call_index))
}

pub(crate) fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Generator for sampling call `call_index` on `basis` under `seed`.
pub fn sampling_rng(seed: u64, basis: &Tpb, call_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sampling_stream(basis, call_index));
    rng
}

/// Draws `shots` outcomes from an exact distribution (call index 0).
pub fn sample(dist: &ProbDist, shots: u64, seed: u64) -> Result<ProbDist> {
    sample_call(dist, shots, seed, 0)
}

/// Draws `shots` outcomes using the stream for `(seed, basis, call_index)`.
pub fn sample_call(dist: &ProbDist, shots: u64, seed: u64, call_index: u64) -> Result<ProbDist> {
    if shots == 0 {
        return Err(Error::Argument("shots must be positive".into()));
    }
    if !dist.is_exact() {
        return Err(Error::Argument("sampling needs an exact distribution".into()));
    }
    let n = dist.num_qubits();
    let mut rng = sampling_rng(seed, dist.basis(), call_index);
    let counts: BTreeMap<BitString, u64> = match dist.outcomes() {
        Outcomes::Dense(v) => {
            let w = WeightedIndex::new(v).map_err(|e| Error::Argument(e.to_string()))?;
            let mut c: HashMap<usize, u64> = HashMap::new();
            for _ in 0..shots {
                *c.entry(w.sample(&mut rng)).or_default() += 1;
            }
            c.into_iter()
                .map(|(i, k)| (BitString::from_index(i as u64, n), k))
                .collect()
        }
        Outcomes::Sparse(m) => {
            let keys: Vec<&BitString> = m.keys().collect();
            let w = WeightedIndex::new(m.values()).map_err(|e| Error::Argument(e.to_string()))?;
            let mut c = vec![0u64; keys.len()];
            for _ in 0..shots {
                c[w.sample(&mut rng)] += 1;
            }
            keys.into_iter().cloned().zip(c).filter(|(_, k)| *k > 0).collect()
        }
        Outcomes::Counts(_) => unreachable!("checked exact above"),
    };
    ProbDist::from_counts(dist.basis().clone(), counts)
}

/// Where a measurement set came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<String>,
}

/// Distributions keyed by measurement basis.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    num_qubits: usize,
    dists: BTreeMap<Tpb, ProbDist>,
    provenance: Provenance,
}

impl MeasurementSet {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            dists: BTreeMap::new(),
            provenance: Provenance::default(),
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Adds a distribution; a second entry for the same basis is rejected.
    pub fn insert(&mut self, dist: ProbDist) -> Result<()> {
        ensure_same_qubits(self.num_qubits, dist.num_qubits(), "measurement set")?;
        if self.dists.contains_key(dist.basis()) {
            return Err(Error::Argument(format!("duplicate basis {}", dist.basis())));
        }
        self.dists.insert(dist.basis().clone(), dist);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn get(&self, basis: &Tpb) -> Option<&ProbDist> {
        self.dists.get(basis)
    }

    pub fn bases(&self) -> impl Iterator<Item = &Tpb> {
        self.dists.keys()
    }

    pub fn dists(&self) -> impl Iterator<Item = &ProbDist> {
        self.dists.values()
    }

    pub fn len(&self) -> usize {
        self.dists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dists.is_empty()
    }

    /// First stored basis (in basis order) compatible with `p`.
    pub fn host_for(&self, p: &PauliString) -> Option<&ProbDist> {
        self.dists.values().find(|d| d.basis().hosts(p))
    }

    /// Applies `f` to every distribution, keeping provenance.
    pub fn map_dists(&self, f: impl Fn(&ProbDist) -> Result<ProbDist>) -> Result<Self> {
        let mut out = MeasurementSet::new(self.num_qubits).with_provenance(self.provenance.clone());
        for d in self.dists.values() {
            out.insert(f(d)?)?;
        }
        Ok(out)
    }
}

/// Measures `state` in every basis of `bases`. With `shots`, each exact
/// distribution is sampled on its own stream derived from `(seed, basis)`.
pub fn simulate_measurements<S: Measurable + Sync>(
    state: &S,
    bases: &[Tpb],
    nm: &NoiseModel,
    shots: Option<u64>,
    seed: u64,
) -> Result<MeasurementSet> {
    let dists: Vec<ProbDist> = bases
        .par_iter()
        .map(|b| {
            let exact = measure_probs(state, b, nm)?;
            match shots {
                Some(s) => sample_call(&exact, s, seed, 0),
                None => Ok(exact),
            }
        })
        .collect::<Result<_>>()?;
    let mut ms = MeasurementSet::new(state.num_qubits()).with_provenance(Provenance {
        seed: shots.map(|_| seed),
        shots,
        noise: Some(nm.to_string()),
        device: None,
    });
    for d in dists {
        ms.insert(d)?;
    }
    Ok(ms)
}
