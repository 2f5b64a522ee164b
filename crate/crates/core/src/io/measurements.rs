//! Measurement records as JSON.
//!
//! ```json
//! {"num_qubits": 2, "records": [{"basis": "ZZ", "shots": 10, "counts": {"00": 7, "11": 3}}]}
//! ```
//!
//! Exact distributions use `"exact": true` with a `"probs"` map instead of
//! counts. Output keys are sorted and zero entries are omitted, so saving a
//! loaded file reproduces it byte for byte when it was canonical to begin with.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::pauli::Tpb;
use crate::sim::{MeasurementSet, Outcomes, ProbDist, Provenance};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRepr {
    #[serde(default, skip_serializing_if = "is_default")]
    metadata: Provenance,
    num_qubits: usize,
    records: Vec<RecordRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordRepr {
    basis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counts: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probs: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
}

fn is_default(p: &Provenance) -> bool {
    *p == Provenance::default()
}

fn schema(location: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Schema {
        location: location.into(),
        msg: msg.into(),
    }
}

fn outcome_keys<V: Copy>(map: &BTreeMap<String, V>, n: usize, loc: &str) -> Result<BTreeMap<BitString, V>> {
    let mut out = BTreeMap::new();
    for (k, v) in map {
        let b: BitString = k
            .parse()
            .map_err(|e: Error| schema(loc, format!("outcome `{k}`: {e}")))?;
        if b.len() != n {
            return Err(schema(loc, format!("outcome `{k}` has {} bits, expected {n}", b.len())));
        }
        out.insert(b, *v);
    }
    Ok(out)
}

fn record_to_dist(r: &RecordRepr, n: usize, idx: usize) -> Result<ProbDist> {
    let loc = format!("records[{idx}] (basis {})", r.basis);
    let basis: Tpb = r.basis.parse().map_err(|e: Error| schema(&loc, e.to_string()))?;
    if basis.num_qubits() != n {
        return Err(schema(&loc, format!("basis has {} qubits, expected {n}", basis.num_qubits())));
    }
    let wrap = |e: Error| schema(&loc, e.to_string());
    if r.exact {
        if r.counts.is_some() || r.shots.is_some() {
            return Err(schema(&loc, "exact records carry `probs`, not `counts` or `shots`"));
        }
        let probs = r.probs.as_ref().ok_or_else(|| schema(&loc, "exact record without `probs`"))?;
        ProbDist::sparse(basis, outcome_keys(probs, n, &loc)?).map_err(wrap)
    } else {
        if r.probs.is_some() {
            return Err(schema(&loc, "`probs` requires `\"exact\": true`"));
        }
        let counts = r.counts.as_ref().ok_or_else(|| schema(&loc, "missing `counts`"))?;
        let shots = r.shots.ok_or_else(|| schema(&loc, "missing `shots`"))?;
        let total = counts.values().try_fold(0u64, |a, &c| a.checked_add(c));
        if total != Some(shots) {
            return Err(schema(
                &loc,
                format!("counts sum to {}, shots is {shots}", total.map_or("overflow".into(), |t| t.to_string())),
            ));
        }
        ProbDist::from_counts(basis, outcome_keys(counts, n, &loc)?).map_err(wrap)
    }
}

fn dist_to_record(d: &ProbDist) -> RecordRepr {
    let basis = d.basis().to_string();
    match d.outcomes() {
        Outcomes::Counts(c) => RecordRepr {
            basis,
            counts: Some(c.iter().map(|(b, &v)| (b.to_string(), v)).collect()),
            exact: false,
            probs: None,
            shots: d.shots(),
        },
        _ => RecordRepr {
            basis,
            counts: None,
            exact: true,
            probs: Some(
                d.entries()
                    .into_iter()
                    .filter(|(_, p)| *p > 0.0)
                    .map(|(b, p)| (b.to_string(), p))
                    .collect(),
            ),
            shots: None,
        },
    }
}

pub fn measurements_from_json(text: &str) -> Result<MeasurementSet> {
    let file: FileRepr = serde_json::from_str(text).map_err(|e| {
        schema(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    if file.num_qubits == 0 {
        return Err(schema("num_qubits", "must be positive"));
    }
    let mut ms = MeasurementSet::new(file.num_qubits).with_provenance(file.metadata);
    for (idx, r) in file.records.iter().enumerate() {
        let d = record_to_dist(r, file.num_qubits, idx)?;
        ms.insert(d)
            .map_err(|e| schema(format!("records[{idx}] (basis {})", r.basis), e.to_string()))?;
    }
    Ok(ms)
}

/// Canonical pretty-printed JSON with a trailing newline.
pub fn measurements_to_json(ms: &MeasurementSet) -> Result<String> {
    let file = FileRepr {
        metadata: ms.provenance().clone(),
        num_qubits: ms.num_qubits(),
        records: ms.dists().map(dist_to_record).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

pub fn load_measurements(path: &Path) -> Result<MeasurementSet> {
    measurements_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_measurements(ms: &MeasurementSet, path: &Path) -> Result<()> {
    std::fs::write(path, measurements_to_json(ms)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"num_qubits": 2, "records": [{"basis": "ZZ", "shots": 10, "counts": {"00": 7, "11": 3}}]}"#;

    fn location(e: Error) -> String {
        match e {
            Error::Schema { location, .. } => location,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimal_file() {
        let ms = measurements_from_json(MINIMAL).unwrap();
        assert_eq!(ms.len(), 1);
        let d = ms.get(&"ZZ".parse().unwrap()).unwrap();
        assert_eq!(d.shots(), Some(10));
        assert_eq!(d.probability(&"11".parse().unwrap()), 0.3);
    }

    #[test]
    fn canonical_round_trip() {
        let text = measurements_to_json(&measurements_from_json(MINIMAL).unwrap()).unwrap();
        let again = measurements_to_json(&measurements_from_json(&text).unwrap()).unwrap();
        assert_eq!(text, again);
        let exact = r#"{"metadata": {"seed": 4, "device": "sim"}, "num_qubits": 1,
            "records": [{"basis": "X", "exact": true, "probs": {"0": 0.25, "1": 0.75}}]}"#;
        let ms = measurements_from_json(exact).unwrap();
        assert_eq!(ms.provenance().seed, Some(4));
        let text = measurements_to_json(&ms).unwrap();
        assert_eq!(measurements_from_json(&text).unwrap(), ms);
        assert_eq!(measurements_to_json(&measurements_from_json(&text).unwrap()).unwrap(), text);
    }

    #[test]
    fn rejections_name_the_record() {
        let bad_sum = MINIMAL.replace("\"shots\": 10", "\"shots\": 11");
        assert_eq!(location(measurements_from_json(&bad_sum).unwrap_err()), "records[0] (basis ZZ)");
        let bad_len = MINIMAL.replace("\"11\"", "\"1\"");
        assert!(location(measurements_from_json(&bad_len).unwrap_err()).starts_with("records[0]"));
        let bad_basis = MINIMAL.replace("\"ZZ\"", "\"ZQ\"");
        assert!(location(measurements_from_json(&bad_basis).unwrap_err()).starts_with("records[0]"));
        let float_count = MINIMAL.replace(": 7", ": 7.0");
        assert!(location(measurements_from_json(&float_count).unwrap_err()).starts_with("line 1"));
        let dup = r#"{"num_qubits": 1, "records": [
            {"basis": "Z", "shots": 1, "counts": {"0": 1}},
            {"basis": "Z", "shots": 1, "counts": {"1": 1}}]}"#;
        assert_eq!(location(measurements_from_json(dup).unwrap_err()), "records[1] (basis Z)");
        let mixed = r#"{"num_qubits": 1, "records": [{"basis": "Z", "exact": true, "counts": {"0": 1}}]}"#;
        assert!(measurements_from_json(mixed).is_err());
    }
}
