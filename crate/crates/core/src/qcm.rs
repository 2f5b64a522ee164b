//! Fourth-order computed-moments ground-state energy estimate.
//!
//! `<H^k>` for `k = 1..4` are measured (optionally through the squared
//! correction), turned into cumulants, and combined into an energy estimate
//! that lies below `<H>` for a trial state with ground-state overlap.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_qubits, Error, Result};
use crate::mitigation::{combine, Estimator, FcqemConfig};
use crate::pauli::{group_tpb_weighted, PauliSum, Tpb};
use crate::sim::{DensityMatrix, MeasurementSet, StateVector};

/// `<H>`, `<H^2>`, `<H^3>`, `<H^4>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl Moments {
    pub fn new(m1: f64, m2: f64, m3: f64, m4: f64) -> Self {
        Self { m1, m2, m3, m4 }
    }

    /// Exact moments of a pure state using two applications of `H`.
    pub fn exact(psi: &StateVector, h: &PauliSum) -> Result<Self> {
        ensure_same_qubits(psi.num_qubits(), h.num_qubits(), "hamiltonian")?;
        let a = psi.amplitudes();
        let v1 = h.apply(a);
        let v2 = h.apply(&v1);
        let dot = |x: &[crate::linalg::C64], y: &[crate::linalg::C64]| -> f64 {
            x.iter().zip(y).map(|(p, q)| (p.conj() * q).re).sum()
        };
        Ok(Self::new(dot(a, &v1), dot(&v1, &v1), dot(&v1, &v2), dot(&v2, &v2)))
    }

    /// Exact moments of a mixed state.
    pub fn exact_density(rho: &DensityMatrix, h: &PauliSum) -> Result<Self> {
        let p = h.powers(4)?;
        Ok(Self::new(
            rho.expectation(&p[0])?,
            rho.expectation(&p[1])?,
            rho.expectation(&p[2])?,
            rho.expectation(&p[3])?,
        ))
    }

    /// `<H^2> - <H>^2`. Only reported; noisy inputs may make it negative.
    pub fn variance(&self) -> f64 {
        self.m2 - self.m1 * self.m1
    }

    fn as_array(&self) -> [f64; 4] {
        [self.m1, self.m2, self.m3, self.m4]
    }
}

/// Connected moments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cumulants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

/// `c_n = m_n - sum_{p=0}^{n-2} C(n-1, p) c_{p+1} m_{n-1-p}`.
pub fn cumulants(m: &Moments) -> Cumulants {
    let mv = m.as_array();
    let mut c = [0.0f64; 4];
    for n in 1..=4usize {
        let mut acc = mv[n - 1];
        let mut binom = 1.0;
        for p in 0..=n.saturating_sub(2) {
            if n < 2 {
                break;
            }
            acc -= binom * c[p] * mv[n - 2 - p];
            binom = binom * (n - 1 - p) as f64 / (p + 1) as f64;
        }
        c[n - 1] = acc;
    }
    Cumulants {
        c1: c[0],
        c2: c[1],
        c3: c[2],
        c4: c[3],
    }
}

/// Outcome of [`qcm_energy`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QcmStatus {
    #[default]
    Ok,
    /// Vanishing variance or denominator; the energy is `c1`.
    DegenerateFallback,
    /// `3 c3^2 - 2 c2 c4 < 0`; the energy is `c1`.
    NegativeRadicand,
}

impl QcmStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            QcmStatus::Ok => "ok",
            QcmStatus::DegenerateFallback => "degenerate-fallback",
            QcmStatus::NegativeRadicand => "negative-radicand",
        }
    }
}

impl fmt::Display for QcmStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QcmStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ok" => Ok(QcmStatus::Ok),
            "degenerate-fallback" => Ok(QcmStatus::DegenerateFallback),
            "negative-radicand" => Ok(QcmStatus::NegativeRadicand),
            _ => Err(Error::Argument(format!("unknown status '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcmEstimate {
    pub energy: f64,
    pub status: QcmStatus,
    /// `3 c3^2 - 2 c2 c4`.
    pub radicand: f64,
    /// `c3^2 - c2 c4`.
    pub denominator: f64,
}

/// Fourth-order energy estimate with fallback to `c1` on pathological input.
pub fn qcm_energy(c: &Cumulants) -> QcmEstimate {
    let Cumulants { c1, c2, c3, c4 } = *c;
    let radicand = 3.0 * c3 * c3 - 2.0 * c2 * c4;
    let denominator = c3 * c3 - c2 * c4;
    let fallback = |status| QcmEstimate {
        energy: c1,
        status,
        radicand,
        denominator,
    };
    if c2 <= 1e-9 * c1.powi(2).max(1.0) || denominator.abs() <= 1e-12 * c2.powi(2).max(1.0) {
        return fallback(QcmStatus::DegenerateFallback);
    }
    if radicand < 0.0 {
        return fallback(QcmStatus::NegativeRadicand);
    }
    QcmEstimate {
        energy: c1 - c2 * c2 / denominator * (radicand.sqrt() - c3),
        status: QcmStatus::Ok,
        radicand,
        denominator,
    }
}

/// Moments from measured distributions, squared-corrected when `corrector` is given.
///
/// All four powers are planned together so every string of `H^k` is read from
/// the same family of bases.
pub fn moments_from_measurements(
    ms: &MeasurementSet,
    h: &PauliSum,
    corrector: Option<&FcqemConfig>,
) -> Result<Moments> {
    ensure_same_qubits(ms.num_qubits(), h.num_qubits(), "hamiltonian")?;
    let powers = h.powers(4)?;
    let union = PauliSum::string_union(&powers);
    let mut est = match corrector {
        Some(_) => Estimator::squared(ms, union)?,
        None => Estimator::raw(ms, union)?,
    };
    let mut m = [0.0; 4];
    for (k, hk) in powers.iter().enumerate() {
        m[k] = match corrector {
            Some(cfg) => combine(&mut est, ms, hk, cfg)?.value,
            None => {
                let mut acc = hk.identity_weight();
                for (p, w) in hk.terms().filter(|(p, _)| !p.is_identity()) {
                    acc += w * est.value(p)?;
                }
                acc
            }
        };
    }
    Ok(Moments::new(m[0], m[1], m[2], m[3]))
}

/// Bases to measure for all four moments of `h`, plus all-Z for global normalization.
pub fn measurement_plan(h: &PauliSum) -> Result<Vec<Tpb>> {
    let powers = h.powers(4)?;
    let union = PauliSum::string_union(&powers);
    let mut bases: Vec<Tpb> = group_tpb_weighted(h.num_qubits(), union)?.into_keys().collect();
    let z = Tpb::all_z(h.num_qubits());
    if !bases.contains(&z) {
        bases.push(z);
    }
    Ok(bases)
}

/// Uncorrected moments through the energy estimate.
pub fn qcm_raw(ms: &MeasurementSet, h: &PauliSum) -> Result<QcmEstimate> {
    Ok(qcm_energy(&cumulants(&moments_from_measurements(ms, h, None)?)))
}

/// Squared-corrected moments through the energy estimate.
pub fn qcm_with_fcqem(ms: &MeasurementSet, h: &PauliSum, cfg: &FcqemConfig) -> Result<QcmEstimate> {
    Ok(qcm_energy(&cumulants(&moments_from_measurements(ms, h, Some(cfg))?)))
}
