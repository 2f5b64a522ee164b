use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    ISwap(usize, usize),
}

pub(crate) type Mat2 = [[C64; 2]; 2];
pub(crate) type Mat4 = [[C64; 4]; 4];

pub(crate) enum GateMatrix {
    One(usize, Mat2),
    Two(usize, usize, Mat4),
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn hadamard() -> Mat2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]
}

pub(crate) fn s_dagger() -> Mat2 {
    [[ONE, ZERO], [ZERO, c(0.0, -1.0)]]
}

pub(crate) fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub(crate) fn pauli_y() -> Mat2 {
    [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]
}

pub(crate) fn pauli_z() -> Mat2 {
    [[ONE, ZERO], [ZERO, c(-1.0, 0.0)]]
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::S(q) => vec![q],
            Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::ISwap(a, b) => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot(..) | Gate::Cz(..) | Gate::ISwap(..))
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self, Gate::Rx(..) | Gate::Ry(..) | Gate::Rz(..))
    }

    pub(crate) fn matrix(&self) -> GateMatrix {
        let i = |v: f64| c(0.0, v);
        match *self {
            Gate::H(q) => GateMatrix::One(q, hadamard()),
            Gate::X(q) => GateMatrix::One(q, pauli_x()),
            Gate::Y(q) => GateMatrix::One(q, pauli_y()),
            Gate::Z(q) => GateMatrix::One(q, pauli_z()),
            Gate::S(q) => GateMatrix::One(q, [[ONE, ZERO], [ZERO, i(1.0)]]),
            Gate::Rx(q, t) => {
                let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
                GateMatrix::One(q, [[c(co, 0.0), i(-si)], [i(-si), c(co, 0.0)]])
            }
            Gate::Ry(q, t) => {
                let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
                GateMatrix::One(q, [[c(co, 0.0), c(-si, 0.0)], [c(si, 0.0), c(co, 0.0)]])
            }
            Gate::Rz(q, t) => {
                let e = C64::from_polar(1.0, t / 2.0);
                GateMatrix::One(q, [[e.conj(), ZERO], [ZERO, e]])
            }
            Gate::Cnot(a, b) => GateMatrix::Two(
                a,
                b,
                [
                    [ONE, ZERO, ZERO, ZERO],
                    [ZERO, ONE, ZERO, ZERO],
                    [ZERO, ZERO, ZERO, ONE],
                    [ZERO, ZERO, ONE, ZERO],
                ],
            ),
            Gate::Cz(a, b) => GateMatrix::Two(
                a,
                b,
                [
                    [ONE, ZERO, ZERO, ZERO],
                    [ZERO, ONE, ZERO, ZERO],
                    [ZERO, ZERO, ONE, ZERO],
                    [ZERO, ZERO, ZERO, c(-1.0, 0.0)],
                ],
            ),
            Gate::ISwap(a, b) => GateMatrix::Two(
                a,
                b,
                [
                    [ONE, ZERO, ZERO, ZERO],
                    [ZERO, ZERO, i(1.0), ZERO],
                    [ZERO, i(1.0), ZERO, ZERO],
                    [ZERO, ZERO, ZERO, ONE],
                ],
            ),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Y(q) => write!(f, "Y {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Cnot(a, b) => write!(f, "CNOT {a} {b}"),
            Gate::Cz(a, b) => write!(f, "CZ {a} {b}"),
            Gate::ISwap(a, b) => write!(f, "ISWAP {a} {b}"),
            Gate::Rx(q, t) => write!(f, "RX {q} {t:?}"),
            Gate::Ry(q, t) => write!(f, "RY {q} {t:?}"),
            Gate::Rz(q, t) => write!(f, "RZ {q} {t:?}"),
        }
    }
}

/// Ordered gate list on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(num_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let qs = gate.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= self.num_qubits) {
            return Err(Error::Argument(format!(
                "gate `{gate}` touches qubit {q} on a {}-qubit register",
                self.num_qubits
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Argument(format!("gate `{gate}` repeats a qubit")));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends all gates of `other` (same register size).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        for g in other.gates() {
            self.push(*g)?;
        }
        Ok(())
    }

    /// Parses the line-oriented text form (`H 0`, `CNOT 0 1`, `RY 3 0.628`).
    ///
    /// `#` starts a comment. An optional `QUBITS n` line fixes the register
    /// size; otherwise `num_qubits` is used, or the largest index plus one.
    pub fn parse(text: &str, num_qubits: Option<usize>) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            let qubit = |i: usize| -> Result<usize> {
                toks.get(i)
                    .ok_or_else(|| perr(format!("`{line}`: missing qubit operand")))?
                    .parse::<usize>()
                    .map_err(|e| perr(format!("`{line}`: bad qubit index ({e})")))
            };
            let angle = |i: usize| -> Result<f64> {
                let t = toks
                    .get(i)
                    .ok_or_else(|| perr(format!("`{line}`: missing angle")))?;
                crate::io::parse_angle(t).map_err(|e| perr(format!("`{line}`: {e}")))
            };
            let arity = |k: usize| -> Result<()> {
                if toks.len() != k + 1 {
                    return Err(perr(format!(
                        "`{line}`: expected {k} operand(s), found {}",
                        toks.len() - 1
                    )));
                }
                Ok(())
            };
            let op = toks[0].to_ascii_uppercase();
            let gate = match op.as_str() {
                "QUBITS" => {
                    arity(1)?;
                    declared = Some(qubit(1)?);
                    continue;
                }
                "H" | "X" | "Y" | "Z" | "S" => {
                    arity(1)?;
                    let q = qubit(1)?;
                    match op.as_str() {
                        "H" => Gate::H(q),
                        "X" => Gate::X(q),
                        "Y" => Gate::Y(q),
                        "Z" => Gate::Z(q),
                        _ => Gate::S(q),
                    }
                }
                "CNOT" | "CX" => {
                    arity(2)?;
                    Gate::Cnot(qubit(1)?, qubit(2)?)
                }
                "CZ" => {
                    arity(2)?;
                    Gate::Cz(qubit(1)?, qubit(2)?)
                }
                "ISWAP" => {
                    arity(2)?;
                    Gate::ISwap(qubit(1)?, qubit(2)?)
                }
                "RX" | "RY" | "RZ" => {
                    arity(2)?;
                    let (q, t) = (qubit(1)?, angle(2)?);
                    match op.as_str() {
                        "RX" => Gate::Rx(q, t),
                        "RY" => Gate::Ry(q, t),
                        _ => Gate::Rz(q, t),
                    }
                }
                other => return Err(perr(format!("unknown gate `{other}`"))),
            };
            gates.push((line_no, gate));
        }
        let max_index = gates
            .iter()
            .flat_map(|(_, g)| g.qubits())
            .max()
            .map(|q| q + 1)
            .unwrap_or(0);
        let n = declared.or(num_qubits).unwrap_or(max_index.max(1));
        let mut c = Circuit::new(n);
        for (line, g) in gates {
            c.push(g).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(c)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QUBITS {}", self.num_qubits)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Circuit::parse(s, None)
    }
}

/// Clifford circuit for `(|01>^{n/2} - |10>^{n/2}) / sqrt 2`.
///
/// `X 0; H 0` makes `(|0> - |1>)/sqrt 2`, a CNOT chain copies qubit 0 onto
/// the rest, and X on the odd qubits turns the GHZ pair into the Néel pair.
pub fn neel_circuit(n: usize) -> Result<Circuit> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Argument(format!(
            "Néel state needs an even qubit count of at least 2, got {n}"
        )));
    }
    let mut c = Circuit::new(n);
    c.push(Gate::X(0))?;
    c.push(Gate::H(0))?;
    for q in 1..n {
        c.push(Gate::Cnot(q - 1, q))?;
    }
    for q in (1..n).step_by(2) {
        c.push(Gate::X(q))?;
    }
    Ok(c)
}
