//! CSV tables with `# key: value` metadata lines ahead of the header.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// Leading comment lines: seed, version, and the full configuration.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metadata {
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        // Values stay on one line.
        let v = value.to_string().replace(['\n', '\r'], " ");
        self.entries.push((key.to_string(), v));
        self
    }
}

/// Rows that know their CSV header.
pub trait Table: Serialize {
    fn header(extra: &TableOptions) -> Vec<&'static str>;
    fn cells(&self, extra: &TableOptions) -> Vec<String>;
}

/// Optional columns.
#[derive(Clone, Copy, Debug, Default)]
pub struct TableOptions {
    pub timing: bool,
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// One point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub raw: f64,
    pub fcqem: f64,
    pub qcm: f64,
    pub fcqem_qcm: f64,
    pub exact: f64,
    pub qcm_status: String,
    pub fcqem_qcm_status: String,
}

impl Table for SweepRow {
    fn header(_: &TableOptions) -> Vec<&'static str> {
        vec!["param", "raw", "fcqem", "qcm", "fcqem_qcm", "exact", "qcm_status", "fcqem_qcm_status"]
    }

    fn cells(&self, _: &TableOptions) -> Vec<String> {
        vec![
            num(self.param),
            num(self.raw),
            num(self.fcqem),
            num(self.qcm),
            num(self.fcqem_qcm),
            num(self.exact),
            self.qcm_status.clone(),
            self.fcqem_qcm_status.clone(),
        ]
    }
}

/// One point of a frame-sampling scale run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleRow {
    pub n: usize,
    pub rate: f64,
    pub shots: u64,
    pub raw: f64,
    pub fcqem: f64,
    pub ideal: f64,
    pub seconds: f64,
}

impl Table for ScaleRow {
    fn header(o: &TableOptions) -> Vec<&'static str> {
        let mut h = vec!["n", "rate", "shots", "raw", "fcqem", "ideal"];
        if o.timing {
            h.push("seconds");
        }
        h
    }

    fn cells(&self, o: &TableOptions) -> Vec<String> {
        let mut c = vec![
            self.n.to_string(),
            num(self.rate),
            self.shots.to_string(),
            num(self.raw),
            num(self.fcqem),
            num(self.ideal),
        ];
        if o.timing {
            c.push(format!("{:.3}", self.seconds));
        }
        c
    }
}

/// One outcome of a distribution dump.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistRow {
    pub outcome: String,
    pub raw_prob: f64,
    pub corrected_prob: f64,
}

impl Table for DistRow {
    fn header(_: &TableOptions) -> Vec<&'static str> {
        vec!["outcome", "raw_prob", "corrected_prob"]
    }

    fn cells(&self, _: &TableOptions) -> Vec<String> {
        vec![self.outcome.clone(), num(self.raw_prob), num(self.corrected_prob)]
    }
}

/// Metadata comments, header, then one line per row.
pub fn write_table<W: Write, T: Table>(mut out: W, meta: &Metadata, rows: &[T], opts: &TableOptions) -> Result<()> {
    for (k, v) in &meta.entries {
        writeln!(out, "# {k}: {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(T::header(opts))?;
    for r in rows {
        w.write_record(r.cells(opts))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text<T: Table>(rows: &[T], opts: &TableOptions) -> String {
        let mut buf = Vec::new();
        write_table(&mut buf, &Metadata::new().with("seed", 7), rows, opts).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_is_header_only() {
        let t = text::<SweepRow>(&[], &TableOptions::default());
        assert_eq!(t, "# seed: 7\nparam,raw,fcqem,qcm,fcqem_qcm,exact,qcm_status,fcqem_qcm_status\n");
    }

    #[test]
    fn rows_parse_back() {
        let rows: Vec<SweepRow> = [0.0, 0.125, 0.25]
            .iter()
            .map(|&h| SweepRow {
                param: h,
                raw: -8.5,
                fcqem: -8.9,
                qcm: -9.0,
                fcqem_qcm: -9.0,
                exact: -9.0 - h,
                qcm_status: "ok".into(),
                fcqem_qcm_status: "degenerate-fallback".into(),
            })
            .collect();
        let t = text(&rows, &TableOptions::default());
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(t.as_bytes());
        let params: Vec<f64> = r.records().map(|rec| rec.unwrap()[0].parse().unwrap()).collect();
        assert_eq!(params, vec![0.0, 0.125, 0.25]);
    }

    #[test]
    fn timing_column_is_optional() {
        let row = ScaleRow { n: 16, rate: 0.01, shots: 10, raw: 0.5, fcqem: 1.0, ideal: 1.0, seconds: 0.25 };
        let plain = text(std::slice::from_ref(&row), &TableOptions::default());
        assert!(!plain.contains("seconds"));
        let timed = text(&[row], &TableOptions { timing: true });
        assert!(timed.contains(",seconds\n") && timed.ends_with(",0.250\n"));
    }
}
