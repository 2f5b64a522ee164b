//! Squared-distribution correction of expectation values.
//!
//! Each outcome probability `p_i` is replaced by `p_i^2`, or by a joint term
//! built from two independent copies, and expectation values are
//! renormalized. Dense two-copy references live in [`oracle`].

pub mod oracle;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{ensure_same_qubits, Error, Result};
use crate::pauli::{group_tpb_weighted, PauliString, PauliSum, Tpb};
use crate::sim::{MeasurementSet, OutcomeRef, Outcomes, ParityMask, ProbDist};

pub use oracle::{
    derivative_analytic, derivative_check, truncated_vd, truncation_epsilon,
    truncation_epsilon_in, vd_exact,
};

/// Denominators below this fraction of the total probability count as zero.
pub const ZERO_DENOMINATOR: f64 = 1e-14;

/// How corrected string expectations are normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Every string is normalized by its own host distribution.
    #[default]
    PerBasis,
    /// One shared denominator taken from the preferred basis.
    GlobalZ,
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Normalization::PerBasis => "per-basis",
            Normalization::GlobalZ => "global-z",
        })
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-basis" => Ok(Self::PerBasis),
            "global-z" => Ok(Self::GlobalZ),
            other => Err(Error::Argument(format!(
                "unknown normalization `{other}` (expected per-basis or global-z)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FcqemConfig {
    pub normalization: Normalization,
    /// Basis of the shared denominator in global mode; all-Z when unset.
    pub preferred_basis: Option<Tpb>,
}

impl FcqemConfig {
    pub fn per_basis() -> Self {
        Self::default()
    }

    pub fn global_z() -> Self {
        Self {
            normalization: Normalization::GlobalZ,
            preferred_basis: None,
        }
    }

    pub fn preferred(&self, n: usize) -> Tpb {
        self.preferred_basis.clone().unwrap_or_else(|| Tpb::all_z(n))
    }
}

/// A corrected expectation value.
///
/// In global mode `value = numerator / denominator + identity weight`. In
/// per-basis mode every string has its own denominator, so the reported pair
/// is `(value, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectedValue {
    pub value: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub mode: Normalization,
    /// Set when `value` lies outside `identity +- sum |w|` of the observable.
    pub out_of_range: bool,
}

/// `q_i = p_i^2 / sum_j p_j^2`. Exact inputs stay in their representation;
/// counts become exact sparse probabilities.
pub fn square_normalize(dist: &ProbDist) -> Result<ProbDist> {
    let mut norm = 0.0;
    dist.for_each(|_, p| norm += p * p);
    if norm <= ZERO_DENOMINATOR {
        return Err(Error::DegenerateInput(
            "distribution has no weight to square".into(),
        ));
    }
    match dist.outcomes() {
        Outcomes::Dense(v) => ProbDist::dense(
            dist.basis().clone(),
            v.iter().map(|p| p * p / norm).collect(),
        ),
        _ => {
            let n = dist.num_qubits();
            let mut m = BTreeMap::new();
            dist.for_each(|o, p| {
                m.insert(o.to_bits(n), p * p / norm);
            });
            ProbDist::sparse(dist.basis().clone(), m)
        }
    }
}

/// Joint two-copy weights `t_i` over outcomes aligned by index.
///
/// `t_i = p_i p'_i + p_i A_i - p'_i B_i + (p'_i S - p_i S') / 2` with `A`, `B`
/// the exclusive prefix sums of `p'` and `p` and `S`, `S'` their totals. This
/// is the pairwise antisymmetric sum with half weight, evaluated in one pass.
pub fn joint_weights(p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!(
            "joint weights over {} and {} outcomes",
            p.len(),
            q.len()
        )));
    }
    let s: f64 = p.iter().sum();
    let s2: f64 = q.iter().sum();
    let (mut a, mut b) = (0.0, 0.0);
    let mut out = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        out.push(pi * qi + pi * a - qi * b + 0.5 * (qi * s - pi * s2));
        a += qi;
        b += pi;
    }
    Ok(out)
}

/// Aligned `(outcome, p, p')` over the union of both supports, in outcome order.
fn align(p: &ProbDist, q: &ProbDist) -> Result<Vec<(BitString, f64, f64)>> {
    if p.basis() != q.basis() {
        return Err(Error::Dimension(format!(
            "joint distribution over bases {} and {}",
            p.basis(),
            q.basis()
        )));
    }
    let (a, b) = (p.entries(), q.entries());
    let mut out = Vec::with_capacity(a.len().max(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        match ord {
            std::cmp::Ordering::Less => {
                out.push((a[i].0.clone(), a[i].1, 0.0));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((b[j].0.clone(), 0.0, b[j].1));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1, b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    Ok(out)
}

/// Two-copy joint numerator and denominator for `observable` measured on `p` and `p'`.
pub fn fcqem_joint(p: &ProbDist, q: &ProbDist, observable: &PauliString) -> Result<(f64, f64)> {
    ensure_same_qubits(p.num_qubits(), observable.num_qubits(), "joint observable")?;
    let rows = align(p, q)?;
    let pv: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let qv: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let t = joint_weights(&pv, &qv)?;
    let mask = ParityMask::of(observable);
    let mut num = 0.0;
    for ((o, _, _), ti) in rows.iter().zip(&t) {
        num += if mask.odd(OutcomeRef::Bits(o)) { -ti } else { *ti };
    }
    Ok((num, t.iter().sum()))
}

/// Per-outcome weights used by a corrector for one basis.
enum Weights<'a> {
    Raw(&'a ProbDist),
    Squared(&'a ProbDist),
    Joint(Vec<(BitString, f64)>),
}

impl Weights<'_> {
    /// `(sum lambda w, sum w, sum p)` for the parity of `mask`.
    fn sums(&self, mask: &ParityMask) -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        let mut visit = |o: OutcomeRef<'_>, w: f64| {
            den += w;
            num += if mask.odd(o) { -w } else { w };
        };
        match self {
            Weights::Raw(d) => d.for_each(|o, p| visit(o, p)),
            Weights::Squared(d) => d.for_each(|o, p| visit(o, p * p)),
            Weights::Joint(v) => v.iter().for_each(|(o, w)| visit(OutcomeRef::Bits(o), *w)),
        }
        (num, den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Raw,
    Squared,
    Joint,
}

/// Evaluates Pauli strings against a measurement set.
///
/// Hosts are chosen once for the whole string set: the basis the greedy
/// grouping would plan, when measured, and otherwise the first measured
/// basis compatible with the string.
pub struct Estimator<'a> {
    ms: &'a MeasurementSet,
    second: Option<&'a MeasurementSet>,
    mode: Mode,
    hosts: HashMap<PauliString, Tpb>,
    cache: HashMap<Tpb, Weights<'a>>,
}

impl<'a> Estimator<'a> {
    fn build<I>(
        ms: &'a MeasurementSet,
        second: Option<&'a MeasurementSet>,
        mode: Mode,
        strings: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let n = ms.num_qubits();
        if let Some(s) = second {
            ensure_same_qubits(n, s.num_qubits(), "second copy")?;
        }
        let strings: Vec<(PauliString, f64)> = strings
            .into_iter()
            .filter(|(p, _)| !p.is_identity())
            .collect();
        for (p, _) in &strings {
            ensure_same_qubits(n, p.num_qubits(), "observable")?;
        }
        let plan = group_tpb_weighted(n, strings.iter().cloned())?;
        let mut hosts = HashMap::new();
        let mut missing = Vec::new();
        for (basis, members) in plan {
            for p in members {
                let measured = |b: &Tpb| ms.get(b).is_some() && second.is_none_or(|s| s.get(b).is_some());
                let host = if measured(&basis) {
                    Some(basis.clone())
                } else {
                    ms.bases().find(|b| b.hosts(&p) && measured(b)).cloned()
                };
                match host {
                    Some(h) => {
                        hosts.insert(p, h);
                    }
                    None => missing.push(basis.to_string()),
                }
            }
        }
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(Error::MissingMeasurement { bases: missing });
        }
        Ok(Self {
            ms,
            second,
            mode,
            hosts,
            cache: HashMap::new(),
        })
    }

    /// Plain outcome averages.
    pub fn raw<I>(ms: &'a MeasurementSet, strings: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        Self::build(ms, None, Mode::Raw, strings)
    }

    /// Squared-probability weights.
    pub fn squared<I>(ms: &'a MeasurementSet, strings: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        Self::build(ms, None, Mode::Squared, strings)
    }

    /// Joint weights from two independent measurement sets.
    pub fn joint<I>(ms: &'a MeasurementSet, other: &'a MeasurementSet, strings: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        Self::build(ms, Some(other), Mode::Joint, strings)
    }

    fn weights(&mut self, basis: &Tpb) -> Result<&Weights<'a>> {
        if !self.cache.contains_key(basis) {
            let d = self.ms.get(basis).ok_or_else(|| Error::MissingMeasurement {
                bases: vec![basis.to_string()],
            })?;
            let w = match self.mode {
                Mode::Raw => Weights::Raw(d),
                Mode::Squared => Weights::Squared(d),
                Mode::Joint => {
                    let d2 = self
                        .second
                        .and_then(|s| s.get(basis))
                        .ok_or_else(|| Error::MissingMeasurement {
                            bases: vec![basis.to_string()],
                        })?;
                    let rows = align(d, d2)?;
                    let pv: Vec<f64> = rows.iter().map(|r| r.1).collect();
                    let qv: Vec<f64> = rows.iter().map(|r| r.2).collect();
                    let t = joint_weights(&pv, &qv)?;
                    Weights::Joint(rows.into_iter().map(|r| r.0).zip(t).collect())
                }
            };
            self.cache.insert(basis.clone(), w);
        }
        Ok(&self.cache[basis])
    }

    /// Host basis chosen for `p`.
    pub fn host(&self, p: &PauliString) -> Option<&Tpb> {
        self.hosts.get(&p.phase_free())
    }

    /// `(sum lambda w, sum w)` of `p` on its host. Identity gives `(1, 1)`.
    pub fn sums(&mut self, p: &PauliString) -> Result<(f64, f64)> {
        if p.is_identity() {
            return Ok((1.0, 1.0));
        }
        let host = self
            .hosts
            .get(&p.phase_free())
            .cloned()
            .ok_or_else(|| Error::Argument(format!("string {p} was not planned")))?;
        let mask = ParityMask::of(p);
        Ok(self.weights(&host)?.sums(&mask))
    }

    /// Normalized value of one string on its own host.
    pub fn value(&mut self, p: &PauliString) -> Result<f64> {
        let (num, den) = self.sums(p)?;
        if self.mode == Mode::Raw {
            return Ok(num);
        }
        check_denominator(den)?;
        Ok(num / den)
    }

    /// `sum w` for an arbitrary measured basis (shared denominator of global mode).
    pub fn denominator_of(&mut self, basis: &Tpb) -> Result<f64> {
        let id = PauliString::identity(basis.num_qubits());
        Ok(self.weights(basis)?.sums(&ParityMask::of(&id)).1)
    }
}

fn check_denominator(den: f64) -> Result<()> {
    // Distributions carry unit mass, so the relative threshold is absolute here.
    if den.abs() <= ZERO_DENOMINATOR {
        return Err(Error::DegenerateInput(format!(
            "correction denominator {den:e} is numerically zero"
        )));
    }
    Ok(())
}

/// `sum_i w_i <P_i>` with plain outcome averages.
pub fn raw_expectation(ms: &MeasurementSet, m: &PauliSum) -> Result<f64> {
    ensure_same_qubits(ms.num_qubits(), m.num_qubits(), "observable")?;
    let mut est = Estimator::raw(ms, m.terms().map(|(p, w)| (p.clone(), w)))?;
    let mut acc = 0.0;
    for (p, w) in m.terms() {
        acc += w * est.value(p)?;
    }
    Ok(acc)
}

pub(crate) fn combine(est: &mut Estimator<'_>, ms: &MeasurementSet, m: &PauliSum, cfg: &FcqemConfig) -> Result<CorrectedValue> {
    let id_w = m.identity_weight();
    let (value, numerator, denominator) = match cfg.normalization {
        Normalization::PerBasis => {
            let mut v = id_w;
            for (p, w) in m.terms().filter(|(p, _)| !p.is_identity()) {
                v += w * est.value(p)?;
            }
            (v, v, 1.0)
        }
        Normalization::GlobalZ => {
            let pref = cfg.preferred(ms.num_qubits());
            ensure_same_qubits(ms.num_qubits(), pref.num_qubits(), "preferred basis")?;
            if ms.get(&pref).is_none() {
                return Err(Error::MissingMeasurement {
                    bases: vec![pref.to_string()],
                });
            }
            let den = est.denominator_of(&pref)?;
            check_denominator(den)?;
            let mut num = 0.0;
            for (p, w) in m.terms().filter(|(p, _)| !p.is_identity()) {
                num += w * est.sums(p)?.0;
            }
            (num / den + id_w, num, den)
        }
    };
    let radius = m.non_identity_one_norm();
    let out_of_range = (value - id_w).abs() > radius * (1.0 + 1e-12) + 1e-12;
    Ok(CorrectedValue {
        value,
        numerator,
        denominator,
        mode: cfg.normalization,
        out_of_range,
    })
}

/// Squared-probability corrected `<M>`.
pub fn fcqem_expectation(ms: &MeasurementSet, m: &PauliSum, cfg: &FcqemConfig) -> Result<CorrectedValue> {
    ensure_same_qubits(ms.num_qubits(), m.num_qubits(), "observable")?;
    let mut est = Estimator::squared(ms, m.terms().map(|(p, w)| (p.clone(), w)))?;
    combine(&mut est, ms, m, cfg)
}

/// Corrected `<M>` from two independently measured copies.
pub fn fcqem_expectation_two_copy(
    ms: &MeasurementSet,
    other: &MeasurementSet,
    m: &PauliSum,
    cfg: &FcqemConfig,
) -> Result<CorrectedValue> {
    ensure_same_qubits(ms.num_qubits(), m.num_qubits(), "observable")?;
    let mut est = Estimator::joint(ms, other, m.terms().map(|(p, w)| (p.clone(), w)))?;
    if cfg.normalization == Normalization::GlobalZ && other.get(&cfg.preferred(ms.num_qubits())).is_none() {
        return Err(Error::MissingMeasurement {
            bases: vec![cfg.preferred(ms.num_qubits()).to_string()],
        });
    }
    combine(&mut est, ms, m, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::ProbDist;

    fn tpb(s: &str) -> Tpb {
        s.parse().unwrap()
    }

    fn set(dists: Vec<ProbDist>) -> MeasurementSet {
        let mut ms = MeasurementSet::new(dists[0].num_qubits());
        for d in dists {
            ms.insert(d).unwrap();
        }
        ms
    }

    fn quadratic(p: &[f64], q: &[f64]) -> Vec<f64> {
        (0..p.len())
            .map(|i| {
                let mut t = 2.0 * p[i] * q[i];
                for j in 0..i {
                    t += p[i] * q[j] - q[i] * p[j];
                }
                for j in i + 1..p.len() {
                    t += q[i] * p[j] - p[i] * q[j];
                }
                0.5 * t
            })
            .collect()
    }

    #[test]
    fn square_normalize_examples() {
        let d = ProbDist::dense(tpb("Z"), vec![0.8, 0.2]).unwrap();
        let q = square_normalize(&d).unwrap().to_dense().unwrap();
        assert!((q[0] - 16.0 / 17.0).abs() < 1e-15 && (q[1] - 1.0 / 17.0).abs() < 1e-15);
        let delta = ProbDist::dense(tpb("Z"), vec![1.0, 0.0]).unwrap();
        assert_eq!(square_normalize(&delta).unwrap(), delta);
        let u = ProbDist::dense(tpb("ZZ"), vec![0.25; 4]).unwrap();
        assert_eq!(square_normalize(&u).unwrap(), u);
    }

    #[test]
    fn single_z_example() {
        let ms = set(vec![ProbDist::dense(tpb("Z"), vec![0.8, 0.2]).unwrap()]);
        let m = PauliSum::from_labels(&[("Z", 1.0)]).unwrap();
        let v = fcqem_expectation(&ms, &m, &FcqemConfig::per_basis()).unwrap();
        assert!((v.value - 0.6 / 0.68).abs() < 1e-15);
        assert!((raw_expectation(&ms, &m).unwrap() - 0.6).abs() < 1e-15);
        let g = fcqem_expectation(&ms, &m, &FcqemConfig::global_z()).unwrap();
        assert!((g.numerator - 0.6).abs() < 1e-15 && (g.denominator - 0.68).abs() < 1e-15);
    }

    #[test]
    fn identity_only_passes_through() {
        let ms = set(vec![ProbDist::dense(tpb("ZZ"), vec![0.1, 0.2, 0.3, 0.4]).unwrap()]);
        let m = PauliSum::identity(2, -1.25);
        for cfg in [FcqemConfig::per_basis(), FcqemConfig::global_z()] {
            assert_eq!(fcqem_expectation(&ms, &m, &cfg).unwrap().value, -1.25);
        }
    }

    #[test]
    fn missing_basis_is_named() {
        let ms = set(vec![ProbDist::dense(tpb("ZZ"), vec![0.25; 4]).unwrap()]);
        let m = PauliSum::from_labels(&[("ZZ", 1.0), ("XI", 0.5), ("IX", 0.5)]).unwrap();
        match fcqem_expectation(&ms, &m, &FcqemConfig::per_basis()) {
            Err(Error::MissingMeasurement { bases }) => assert_eq!(bases, vec!["XX".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
        let xs = set(vec![ProbDist::dense(tpb("XX"), vec![0.25; 4]).unwrap()]);
        let m = PauliSum::from_labels(&[("XX", 1.0)]).unwrap();
        assert!(matches!(
            fcqem_expectation(&xs, &m, &FcqemConfig::global_z()),
            Err(Error::MissingMeasurement { .. })
        ));
    }

    #[test]
    fn joint_example_and_reduction() {
        let p = ProbDist::dense(tpb("Z"), vec![0.8, 0.2]).unwrap();
        let q = ProbDist::dense(tpb("Z"), vec![0.6, 0.4]).unwrap();
        let z: PauliString = "Z".parse().unwrap();
        let (num, den) = fcqem_joint(&p, &q, &z).unwrap();
        assert!((num - 0.40).abs() < 1e-15 && (den - 0.36).abs() < 1e-15);
        let (num, den) = fcqem_joint(&p, &p, &z).unwrap();
        assert!((num - 0.60).abs() < 1e-15 && (den - 0.68).abs() < 1e-15);
        let d = ProbDist::dense(tpb("Z"), vec![1.0, 0.0]).unwrap();
        assert_eq!(fcqem_joint(&d, &d, &z).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn joint_prefix_matches_quadratic() {
        let p = [0.1, 0.0, 0.35, 0.05, 0.5];
        let q = [0.3, 0.2, 0.1, 0.4, 0.0];
        let fast = joint_weights(&p, &q).unwrap();
        for (a, b) in fast.iter().zip(quadratic(&p, &q)) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn two_copy_with_identical_sets_is_self_square() {
        let ms = set(vec![
            ProbDist::dense(tpb("ZZ"), vec![0.5, 0.2, 0.2, 0.1]).unwrap(),
            ProbDist::dense(tpb("XX"), vec![0.7, 0.1, 0.1, 0.1]).unwrap(),
        ]);
        let m = PauliSum::from_labels(&[("ZZ", 1.0), ("XI", 0.5), ("IX", -0.3), ("II", 0.2)]).unwrap();
        for cfg in [FcqemConfig::per_basis(), FcqemConfig::global_z()] {
            let a = fcqem_expectation(&ms, &m, &cfg).unwrap();
            let b = fcqem_expectation_two_copy(&ms, &ms, &m, &cfg).unwrap();
            assert!((a.value - b.value).abs() < 1e-14);
        }
    }

    #[test]
    fn out_of_range_is_flagged_not_clipped() {
        let p = ProbDist::dense(tpb("Z"), vec![0.8, 0.2]).unwrap();
        let q = ProbDist::dense(tpb("Z"), vec![0.6, 0.4]).unwrap();
        let m = PauliSum::from_labels(&[("Z", 1.0)]).unwrap();
        let v = fcqem_expectation_two_copy(&set(vec![p]), &set(vec![q]), &m, &FcqemConfig::per_basis()).unwrap();
        assert!((v.value - 0.40 / 0.36).abs() < 1e-14);
        assert!(v.out_of_range);
    }
}
