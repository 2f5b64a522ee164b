//! Models and file formats.

mod hamiltonian;
mod measurements;
mod results;
mod tfim;

pub use hamiltonian::{load_hamiltonian, parse_hamiltonian, save_hamiltonian};
pub use measurements::{load_measurements, measurements_from_json, measurements_to_json, save_measurements};
pub use results::{write_table, DistRow, Metadata, ScaleRow, SweepRow, Table, TableOptions};
pub use tfim::{build_tfim, TfimSpec, Topology};

use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::Circuit;

/// Reads a circuit file. `num_qubits` is required when the file has no `QUBITS` line.
pub fn load_circuit(path: &Path, num_qubits: Option<usize>) -> Result<Circuit> {
    Circuit::parse(&std::fs::read_to_string(path)?, num_qubits)
}

/// Parses a decimal angle with an optional `pi` factor: `0.3`, `pi`, `0.05pi`, `-pi/2`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || Error::Argument(format!("invalid angle `{s}`"));
    let (body, div) = match t.split_once('/') {
        Some((a, b)) => (a, b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t, 1.0),
    };
    let body = body.trim();
    let v = if let Some(pre) = body.strip_suffix("pi") {
        let pre = pre.trim().trim_end_matches('*');
        let f = match pre {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse::<f64>().map_err(|_| bad())?,
        };
        f * std::f64::consts::PI
    } else {
        body.parse::<f64>().map_err(|_| bad())?
    };
    let v = v / div;
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

/// Inclusive `start:stop:step` range of angles or plain numbers.
///
/// `stop < start` gives an empty range. Values are `start + k * step`, so
/// rounding does not accumulate.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(Error::Argument(format!("range `{s}` is not start:stop:step")));
    };
    let (a, b, step) = (parse_angle(a)?, parse_angle(b)?, parse_angle(step)?);
    if step <= 0.0 {
        return Err(Error::Argument(format!("range `{s}` needs a positive step")));
    }
    if b < a {
        return Ok(Vec::new());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| a + k as f64 * step).collect())
}
