//! End-to-end runs shared by the command-line driver and the test suites.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{frame_sample, spin_correlation, CliffordCircuit, PauliNoiseSpec};
use crate::io::{build_tfim, DistRow, ScaleRow, SweepRow, TfimSpec};
use crate::mitigation::{
    fcqem_expectation, fcqem_expectation_two_copy, raw_expectation, square_normalize,
    CorrectedValue, FcqemConfig,
};
use crate::pauli::{PauliSum, Tpb};
use crate::qcm::{measurement_plan, qcm_raw, qcm_with_fcqem, QcmEstimate, QcmStatus};
use crate::sim::{
    exact_ground_state, neel_circuit, run_circuit, run_noisy, simulate_measurements, Circuit, Gate,
    MeasurementSet, NoiseModel, PauliRates, ProbDist, Provenance, DENSITY_LIMIT, STATEVECTOR_LIMIT,
};

/// Where the Hamiltonian comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianSource {
    /// Nearest-neighbour chain; the field is the sweep value or `h`.
    Tfim { n: usize, j: f64, h: f64, periodic: bool },
    Explicit(PauliSum),
}

impl HamiltonianSource {
    pub fn num_qubits(&self) -> usize {
        match self {
            HamiltonianSource::Tfim { n, .. } => *n,
            HamiltonianSource::Explicit(h) => h.num_qubits(),
        }
    }

    fn build(&self, field: Option<f64>) -> Result<PauliSum> {
        match self {
            HamiltonianSource::Tfim { n, j, h, periodic } => {
                build_tfim(&TfimSpec::chain(*n, *j, field.unwrap_or(*h), *periodic)?)
            }
            HamiltonianSource::Explicit(h) => Ok(h.clone()),
        }
    }
}

/// What varies across sweep points.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepAxis {
    /// Transverse field of a TFIM source.
    Field(Vec<f64>),
    /// `RY(theta)` appended on `qubit` after the trial circuit.
    Theta { qubit: usize, values: Vec<f64> },
    /// Two-qubit depolarizing rate `p`, one-qubit rate `p / 10`.
    Depolarizing(Vec<f64>),
}

impl SweepAxis {
    fn values(&self) -> &[f64] {
        match self {
            SweepAxis::Field(v) | SweepAxis::Depolarizing(v) => v,
            SweepAxis::Theta { values, .. } => values,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub source: HamiltonianSource,
    /// `None` prepares the Néel state.
    pub trial: Option<Circuit>,
    pub axis: SweepAxis,
    pub noise: NoiseModel,
    /// `None` keeps exact distributions.
    pub shots: Option<u64>,
    pub seed: u64,
    pub fcqem: FcqemConfig,
}

impl SweepConfig {
    /// Rejects inconsistent settings before any simulation starts.
    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        let n = self.source.num_qubits();
        if let Some(t) = &self.trial {
            if t.num_qubits() != n {
                return Err(Error::Argument(format!(
                    "trial circuit has {} qubits, hamiltonian has {n}",
                    t.num_qubits()
                )));
            }
        }
        match &self.axis {
            SweepAxis::Field(_) if !matches!(self.source, HamiltonianSource::Tfim { .. }) => {
                return Err(Error::Argument("a field sweep needs the TFIM model".into()))
            }
            SweepAxis::Theta { qubit, .. } if *qubit >= n => {
                return Err(Error::Argument(format!("rotation qubit {qubit} out of range for {n} qubits")))
            }
            SweepAxis::Depolarizing(v) => {
                for &p in v {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::Argument(format!("depolarizing rate {p} outside [0, 1]")));
                    }
                }
            }
            _ => {}
        }
        if self.shots == Some(0) {
            return Err(Error::Argument("shots must be positive".into()));
        }
        if self.trial.is_none() {
            neel_circuit(n)?;
        }
        let state_noisy = !self.noise.is_state_noiseless() || matches!(self.axis, SweepAxis::Depolarizing(_));
        let limit = if state_noisy { DENSITY_LIMIT } else { STATEVECTOR_LIMIT };
        if n > limit {
            return Err(Error::Capacity {
                what: if state_noisy { "noisy sweep" } else { "sweep" },
                requested: n,
                limit,
            });
        }
        Ok(())
    }
}

/// Estimates at one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointEstimates {
    pub raw: f64,
    pub fcqem: CorrectedValue,
    pub qcm: QcmEstimate,
    pub fcqem_qcm: QcmEstimate,
}

/// Prepares `trial` under `noise` and measures every basis that `h` and its powers need.
pub fn measure_trial(
    h: &PauliSum,
    trial: &Circuit,
    noise: &NoiseModel,
    shots: Option<u64>,
    seed: u64,
) -> Result<MeasurementSet> {
    let bases = measurement_plan(h)?;
    let ms = if noise.is_state_noiseless() {
        simulate_measurements(&run_circuit(trial)?, &bases, noise, shots, seed)?
    } else {
        simulate_measurements(&run_noisy(trial, noise)?, &bases, noise, shots, seed)?
    };
    Ok(ms.with_provenance(Provenance {
        seed: Some(seed),
        shots,
        noise: Some(noise.to_string()),
        device: None,
    }))
}

/// Raw, corrected, and moment-based estimates from one measurement set.
pub fn estimate(ms: &MeasurementSet, h: &PauliSum, cfg: &FcqemConfig) -> Result<PointEstimates> {
    Ok(PointEstimates {
        raw: raw_expectation(ms, h)?,
        fcqem: fcqem_expectation(ms, h, cfg)?,
        qcm: qcm_raw(ms, h)?,
        fcqem_qcm: qcm_with_fcqem(ms, h, cfg)?,
    })
}

/// Every sweep point, in the order of the axis values. Points run in parallel;
/// each uses the same seed so neighbouring points share sampling noise.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let n = cfg.source.num_qubits();
    let base_trial = match &cfg.trial {
        Some(t) => t.clone(),
        None => neel_circuit(n)?,
    };
    let fixed_exact = match cfg.axis {
        SweepAxis::Field(_) => None,
        _ => Some(exact_ground_state(&cfg.source.build(None)?)?.0),
    };
    cfg.axis
        .values()
        .par_iter()
        .map(|&x| {
            let (h, trial, noise) = match &cfg.axis {
                SweepAxis::Field(_) => (cfg.source.build(Some(x))?, base_trial.clone(), cfg.noise),
                SweepAxis::Theta { qubit, .. } => {
                    let mut t = base_trial.clone();
                    t.push(Gate::Ry(*qubit, x))?;
                    (cfg.source.build(None)?, t, cfg.noise)
                }
                SweepAxis::Depolarizing(_) => {
                    let nm = NoiseModel {
                        depolarizing_2q: x,
                        depolarizing_1q: x / 10.0,
                        ..cfg.noise
                    };
                    (cfg.source.build(None)?, base_trial.clone(), nm)
                }
            };
            let exact = match fixed_exact {
                Some(e) => e,
                None => exact_ground_state(&h)?.0,
            };
            let ms = measure_trial(&h, &trial, &noise, cfg.shots, cfg.seed)?;
            let est = estimate(&ms, &h, &cfg.fcqem)?;
            Ok(SweepRow {
                param: x,
                raw: est.raw,
                fcqem: est.fcqem.value,
                qcm: est.qcm.energy,
                fcqem_qcm: est.fcqem_qcm.energy,
                exact,
                qcm_status: est.qcm.status.to_string(),
                fcqem_qcm_status: est.fcqem_qcm.status.to_string(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleConfig {
    pub sizes: Vec<usize>,
    pub rates: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    /// `pz / px`, with `px = py`.
    pub bias: f64,
    /// `None` prepares the Néel state at every size; a circuit fixes the size.
    pub trial: Option<Circuit>,
}

impl ScaleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Argument("shots must be positive".into()));
        }
        for &r in &self.rates {
            PauliRates::biased(r, self.bias)?;
        }
        match &self.trial {
            Some(t) => {
                CliffordCircuit::new(t)?;
                if self.sizes.iter().any(|&n| n != t.num_qubits()) {
                    return Err(Error::Argument(format!(
                        "trial circuit fixes the size to {} qubits",
                        t.num_qubits()
                    )));
                }
            }
            None => {
                for &n in &self.sizes {
                    CliffordCircuit::new(&neel_circuit(n)?)?;
                }
            }
        }
        Ok(())
    }
}

/// `<Z...Z>` raw and squared-corrected for one frame-sampled distribution.
pub fn parity_estimates(dist: &ProbDist) -> Result<(f64, f64)> {
    let n = dist.num_qubits();
    let raw = spin_correlation(dist)?;
    let mut ms = MeasurementSet::new(n);
    ms.insert(dist.clone())?;
    let zn = PauliSum::from_terms(n, [(Tpb::all_z(n).as_pauli(), 1.0)])?;
    let corrected = fcqem_expectation(&ms, &zn, &FcqemConfig::per_basis())?.value;
    Ok((raw, corrected))
}

/// One row per `(size, rate)`, sizes outermost.
pub fn run_scale(cfg: &ScaleConfig) -> Result<Vec<ScaleRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let circuit = match &cfg.trial {
            Some(t) => t.clone(),
            None => neel_circuit(n)?,
        };
        let cc = CliffordCircuit::new(&circuit)?;
        let ideal = spin_correlation(&frame_sample(&cc, &PauliNoiseSpec::noiseless(), cfg.shots, cfg.seed)?)?;
        for &rate in &cfg.rates {
            let spec = PauliNoiseSpec::new(PauliRates::biased(rate, cfg.bias)?);
            let start = Instant::now();
            let dist = frame_sample(&cc, &spec, cfg.shots, cfg.seed)?;
            let (raw, fcqem) = parity_estimates(&dist)?;
            rows.push(ScaleRow {
                n,
                rate,
                shots: cfg.shots,
                raw,
                fcqem,
                ideal,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(rows)
}

/// Raw and squared-normalized probabilities of one distribution.
///
/// Rows where both values fall below `threshold` are dropped; a zero
/// threshold keeps every outcome the distribution enumerates.
pub fn dump_distribution(dist: &ProbDist, threshold: f64) -> Result<Vec<DistRow>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Argument(format!("threshold {threshold} outside [0, 1]")));
    }
    let sq = square_normalize(dist)?;
    let n = dist.num_qubits();
    let mut rows = Vec::new();
    dist.for_each(|o, p| {
        let bits = o.to_bits(n);
        let c = sq.probability(&bits);
        if threshold == 0.0 || p >= threshold || c >= threshold {
            rows.push(DistRow {
                outcome: bits.to_string(),
                raw_prob: p,
                corrected_prob: c,
            });
        }
    });
    Ok(rows)
}

/// Distribution of `trial` in `basis` under `noise`, sampled when `shots` is set.
pub fn simulate_distribution(
    trial: &Circuit,
    basis: &Tpb,
    noise: &NoiseModel,
    shots: Option<u64>,
    seed: u64,
) -> Result<ProbDist> {
    let ms = if noise.is_state_noiseless() {
        simulate_measurements(&run_circuit(trial)?, std::slice::from_ref(basis), noise, shots, seed)?
    } else {
        simulate_measurements(&run_noisy(trial, noise)?, std::slice::from_ref(basis), noise, shots, seed)?
    };
    Ok(ms.get(basis).expect("measured").clone())
}

/// A QCM estimate in report form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcmReport {
    pub energy: f64,
    pub status: QcmStatus,
    pub radicand: f64,
    pub denominator: f64,
}

impl From<QcmEstimate> for QcmReport {
    fn from(e: QcmEstimate) -> Self {
        Self {
            energy: e.energy,
            status: e.status,
            radicand: e.radicand,
            denominator: e.denominator,
        }
    }
}

/// Everything the post-processing pipeline can say about one data set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MitigationReport {
    pub num_qubits: usize,
    pub raw: f64,
    pub fcqem_per_basis: f64,
    /// Absent when no all-Z record was supplied.
    pub fcqem_global_z: Option<f64>,
    pub out_of_range: bool,
    pub two_copy: Option<f64>,
    pub qcm: QcmReport,
    pub fcqem_qcm: QcmReport,
    pub notes: Vec<String>,
}

/// Post-processes measured data. `other` enables the two-copy estimate.
pub fn mitigate(ms: &MeasurementSet, h: &PauliSum, other: Option<&MeasurementSet>) -> Result<MitigationReport> {
    let n = ms.num_qubits();
    let per_basis = fcqem_expectation(ms, h, &FcqemConfig::per_basis())?;
    let mut notes = Vec::new();
    let global_z = if ms.get(&Tpb::all_z(n)).is_some() {
        Some(fcqem_expectation(ms, h, &FcqemConfig::global_z())?.value)
    } else {
        notes.push(format!("global-z normalization skipped: no {} record", Tpb::all_z(n)));
        None
    };
    let two_copy = match other {
        Some(o) => Some(fcqem_expectation_two_copy(ms, o, h, &FcqemConfig::per_basis())?.value),
        None => None,
    };
    // Moments need every basis of H^4; report that gap instead of failing the whole run.
    let (qcm, fcqem_qcm) = match (qcm_raw(ms, h), qcm_with_fcqem(ms, h, &FcqemConfig::per_basis())) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::MissingMeasurement { bases }), _) | (_, Err(Error::MissingMeasurement { bases })) => {
            notes.push(format!("moments need bases {}; falling back to first moments", bases.join(", ")));
            let fallback = |v: f64| QcmEstimate {
                energy: v,
                status: QcmStatus::DegenerateFallback,
                radicand: f64::NAN,
                denominator: f64::NAN,
            };
            (fallback(raw_expectation(ms, h)?), fallback(per_basis.value))
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    Ok(MitigationReport {
        num_qubits: n,
        raw: raw_expectation(ms, h)?,
        fcqem_per_basis: per_basis.value,
        fcqem_global_z: global_z,
        out_of_range: per_basis.out_of_range,
        two_copy,
        qcm: qcm.into(),
        fcqem_qcm: fcqem_qcm.into(),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tfim(n: usize) -> HamiltonianSource {
        HamiltonianSource::Tfim {
            n,
            j: 1.0,
            h: 0.0,
            periodic: false,
        }
    }

    #[test]
    fn noiseless_neel_sweep_is_exact_at_zero_field() {
        let cfg = SweepConfig {
            source: tfim(4),
            trial: None,
            axis: SweepAxis::Field(vec![0.0, 0.5]),
            noise: NoiseModel::noiseless(),
            shots: None,
            seed: 1,
            fcqem: FcqemConfig::per_basis(),
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        for v in [rows[0].raw, rows[0].fcqem, rows[0].qcm, rows[0].fcqem_qcm, rows[0].exact] {
            assert!((v + 3.0).abs() < 1e-12, "{v}");
        }
        assert_eq!(rows[0].qcm_status, "degenerate-fallback");
        // The Néel state has zero transverse magnetization, so raw stays at -3.
        assert!((rows[1].raw + 3.0).abs() < 1e-12);
        assert!(rows[1].qcm < rows[1].raw);
        assert!(rows[1].exact < -3.0);
    }

    #[test]
    fn config_conflicts_fail_early() {
        let mut cfg = SweepConfig {
            source: HamiltonianSource::Explicit(PauliSum::from_labels(&[("ZZ", 1.0)]).unwrap()),
            trial: None,
            axis: SweepAxis::Field(vec![0.0]),
            noise: NoiseModel::noiseless(),
            shots: None,
            seed: 1,
            fcqem: FcqemConfig::per_basis(),
        };
        assert!(cfg.validate().is_err());
        cfg.axis = SweepAxis::Theta { qubit: 2, values: vec![] };
        assert!(cfg.validate().is_err());
        cfg.axis = SweepAxis::Theta { qubit: 1, values: vec![] };
        assert!(run_sweep(&cfg).unwrap().is_empty());
        cfg.source = tfim(14);
        cfg.noise = NoiseModel::readout(0.01);
        cfg.axis = SweepAxis::Depolarizing(vec![0.01]);
        assert!(matches!(cfg.validate(), Err(Error::Capacity { .. })));
    }

    #[test]
    fn scale_rate_zero_is_exact() {
        let cfg = ScaleConfig {
            sizes: vec![4, 16],
            rates: vec![0.0, 0.01],
            shots: 2000,
            seed: 3,
            bias: 10.0,
            trial: None,
        };
        let rows = run_scale(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].raw, rows[0].fcqem, rows[0].ideal), (1.0, 1.0, 1.0));
        assert_eq!((rows[2].raw, rows[2].fcqem, rows[2].ideal), (1.0, 1.0, 1.0));
        assert!(rows[3].raw < 1.0 && rows[3].fcqem > rows[3].raw);
        let bad = ScaleConfig {
            trial: Some(Circuit::parse("RX 0 0.1\n", Some(4)).unwrap()),
            sizes: vec![4],
            ..cfg
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn dump_of_neel() {
        let d = simulate_distribution(&neel_circuit(4).unwrap(), &Tpb::all_z(4), &NoiseModel::noiseless(), None, 0)
            .unwrap();
        let rows = dump_distribution(&d, 0.005).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert!((r.raw_prob - 0.5).abs() < 1e-12 && (r.corrected_prob - 0.5).abs() < 1e-12);
        }
        assert_eq!(dump_distribution(&d, 0.0).unwrap().len(), 16);
        let noisy = simulate_distribution(&neel_circuit(4).unwrap(), &Tpb::all_z(4), &NoiseModel::readout(0.03), None, 0)
            .unwrap();
        let rows = dump_distribution(&noisy, 0.0).unwrap();
        let small = |f: fn(&DistRow) -> f64| rows.iter().filter(|r| r.outcome != "0101" && r.outcome != "1010").map(f).sum::<f64>();
        assert!(small(|r| r.corrected_prob) < small(|r| r.raw_prob) / 5.0);
    }

    #[test]
    fn mitigate_identical_copies() {
        let h = PauliSum::from_labels(&[("ZZ", 1.0), ("XI", 0.5)]).unwrap();
        let c = Circuit::parse("RY 0 0.3\nCNOT 0 1\n", None).unwrap();
        let ms = measure_trial(&h, &c, &NoiseModel::readout(0.02), Some(5000), 9).unwrap();
        let r = mitigate(&ms, &h, Some(&ms)).unwrap();
        assert!((r.two_copy.unwrap() - r.fcqem_per_basis).abs() < 1e-12);
        assert!(r.fcqem_global_z.is_some());
    }
}
