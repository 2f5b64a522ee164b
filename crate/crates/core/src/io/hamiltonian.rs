use std::path::Path;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Parses `STRING WEIGHT` lines. `#` starts a comment; repeated strings are summed.
pub fn parse_hamiltonian(text: &str) -> Result<PauliSum> {
    let mut sum: Option<PauliSum> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line, msg };
        let mut fields = body.split_whitespace();
        let (label, weight) = match (fields.next(), fields.next(), fields.next()) {
            (Some(l), Some(w), None) => (l, w),
            _ => return Err(parse_err(format!("expected `STRING WEIGHT`, got `{body}`"))),
        };
        let p: PauliString = label
            .to_ascii_uppercase()
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let w: f64 = weight
            .parse()
            .ok()
            .filter(|w: &f64| w.is_finite())
            .ok_or_else(|| parse_err(format!("invalid weight `{weight}`")))?;
        let s = sum.get_or_insert_with(|| PauliSum::new(p.num_qubits()));
        if s.num_qubits() != p.num_qubits() {
            return Err(Error::Format(format!(
                "line {line}: string `{label}` has {} qubits, earlier terms have {}",
                p.num_qubits(),
                s.num_qubits()
            )));
        }
        s.add_term(p, w)?;
    }
    sum.ok_or_else(|| Error::Format("hamiltonian has no terms".into()))
}

pub fn load_hamiltonian(path: &Path) -> Result<PauliSum> {
    parse_hamiltonian(&std::fs::read_to_string(path)?)
}

/// Writes one term per line with round-trip exact weights.
pub fn save_hamiltonian(h: &PauliSum, path: &Path) -> Result<()> {
    std::fs::write(path, h.to_string())?;
    Ok(())
}
