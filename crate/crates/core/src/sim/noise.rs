use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::state::{check_probability, DensityMatrix};
use crate::error::{Error, Result};

/// Per-qubit Pauli error probabilities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliRates {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliRates {
    pub fn new(px: f64, py: f64, pz: f64) -> Result<Self> {
        let r = Self { px, py, pz };
        r.validate()?;
        Ok(r)
    }

    /// Total rate `rate` split as `px = py` and `pz = bias * px`.
    pub fn biased(rate: f64, bias: f64) -> Result<Self> {
        if !(bias >= 0.0 && bias.is_finite()) {
            return Err(Error::Argument(format!("bias ratio {bias} must be finite and non-negative")));
        }
        check_probability("Pauli error rate", rate)?;
        let px = rate / (2.0 + bias);
        Self::new(px, px, rate - 2.0 * px)
    }

    /// Dephasing-dominated split: `pz = 10 px = 10 py`.
    pub fn dephasing_biased(rate: f64) -> Result<Self> {
        Self::biased(rate, 10.0)
    }

    pub fn total(&self) -> f64 {
        self.px + self.py + self.pz
    }

    /// `pz / px`, or infinity when only dephasing is present.
    pub fn bias_ratio(&self) -> f64 {
        if self.px == 0.0 {
            if self.pz == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.pz / self.px
        }
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p_x", self.px)?;
        check_probability("p_y", self.py)?;
        check_probability("p_z", self.pz)?;
        check_probability("p_x+p_y+p_z", self.total())
    }
}

/// Noise applied by the dense simulator.
///
/// Local depolarizing acts after gates: the one-qubit rate after rotations,
/// the two-qubit rate after entangling gates. The Pauli channel acts on the
/// touched qubits after every gate and once more on all qubits before
/// measurement. Global depolarizing closes the circuit; readout flips are
/// folded into measured probabilities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub global_depolarizing: f64,
    pub depolarizing_1q: f64,
    pub depolarizing_2q: f64,
    pub readout_flip: f64,
    pub pauli: PauliRates,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn readout(q: f64) -> Self {
        Self {
            readout_flip: q,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("global depolarizing", self.global_depolarizing)?;
        check_probability("1q depolarizing", self.depolarizing_1q)?;
        check_probability("2q depolarizing", self.depolarizing_2q)?;
        check_probability("readout flip", self.readout_flip)?;
        self.pauli.validate()
    }

    /// True when the state itself is untouched (readout may still be noisy).
    pub fn is_state_noiseless(&self) -> bool {
        self.global_depolarizing == 0.0
            && self.depolarizing_1q == 0.0
            && self.depolarizing_2q == 0.0
            && self.pauli.is_zero()
    }
}

impl fmt::Display for NoiseModel {
    /// Compact `key=value` list in the same syntax `FromStr` accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.readout_flip != 0.0 {
            parts.push(format!("readout={:?}", self.readout_flip));
        }
        if self.depolarizing_1q != 0.0 {
            parts.push(format!("depol-1q={:?}", self.depolarizing_1q));
        }
        if self.depolarizing_2q != 0.0 {
            parts.push(format!("depol-2q={:?}", self.depolarizing_2q));
        }
        if self.global_depolarizing != 0.0 {
            parts.push(format!("depol-global={:?}", self.global_depolarizing));
        }
        if !self.pauli.is_zero() {
            let p = self.pauli;
            parts.push(format!("pauli={:?}:{:?}:{:?}", p.px, p.py, p.pz));
        }
        if parts.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    /// Parses `readout=0.03,depol-2q=0.01,...`; `none` or an empty string is noiseless.
    /// `dephasing=r` is shorthand for a dephasing-biased Pauli channel of total rate `r`.
    fn from_str(s: &str) -> Result<Self> {
        let mut nm = NoiseModel::default();
        let s = s.trim();
        if s.is_empty() || s == "none" {
            return Ok(nm);
        }
        for item in s.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("noise item `{item}` is not key=value")))?;
            let num = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Argument(format!("noise `{item}`: {e}")))
            };
            match k.trim() {
                "readout" => nm.readout_flip = num(v)?,
                "depol-1q" => nm.depolarizing_1q = num(v)?,
                "depol-2q" => nm.depolarizing_2q = num(v)?,
                "depol-global" => nm.global_depolarizing = num(v)?,
                "depol" => {
                    // Two-qubit rate with a tenth of it on one-qubit rotations.
                    let r = num(v)?;
                    nm.depolarizing_2q = r;
                    nm.depolarizing_1q = r / 10.0;
                }
                "dephasing" => nm.pauli = PauliRates::dephasing_biased(num(v)?)?,
                "pauli" => {
                    let p: Vec<f64> = v.split(':').map(num).collect::<Result<_>>()?;
                    if p.len() != 3 {
                        return Err(Error::Argument(format!(
                            "noise `{item}`: expected pauli=px:py:pz"
                        )));
                    }
                    nm.pauli = PauliRates::new(p[0], p[1], p[2])?;
                }
                other => return Err(Error::Argument(format!("unknown noise key `{other}`"))),
            }
        }
        nm.validate()?;
        Ok(nm)
    }
}

/// Density-matrix evolution of `c` from `|0...0>` under `nm`.
pub fn run_noisy(c: &Circuit, nm: &NoiseModel) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::zero_state(c.num_qubits())?;
    run_noisy_from(&mut rho, c, nm)?;
    Ok(rho)
}

/// Applies `c` with gate noise, the pre-measurement Pauli layer and global
/// depolarizing to an existing state.
pub fn run_noisy_from(rho: &mut DensityMatrix, c: &Circuit, nm: &NoiseModel) -> Result<()> {
    crate::error::ensure_same_qubits(rho.num_qubits(), c.num_qubits(), "circuit")?;
    nm.validate()?;
    let p = nm.pauli;
    for g in c.gates() {
        rho.apply_gate(g);
        let qs = g.qubits();
        if g.is_rotation() && nm.depolarizing_1q > 0.0 {
            rho.depolarize_local(&qs, nm.depolarizing_1q)?;
        }
        if g.is_two_qubit() && nm.depolarizing_2q > 0.0 {
            rho.depolarize_local(&qs, nm.depolarizing_2q)?;
        }
        if !p.is_zero() {
            for &q in &qs {
                rho.pauli_channel(q, p.px, p.py, p.pz)?;
            }
        }
    }
    if !p.is_zero() {
        for q in 0..c.num_qubits() {
            rho.pauli_channel(q, p.px, p.py, p.pz)?;
        }
    }
    rho.depolarize_global(nm.global_depolarizing)
}
