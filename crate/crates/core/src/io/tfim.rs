use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString, PauliSum};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    #[default]
    ChainOpen,
    ChainPeriodic,
    Explicit,
}

/// Transverse-field Ising model `sum_<ij> J_ij Z_i Z_j + h sum_i X_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfimSpec {
    pub n: usize,
    pub couplings: Vec<(usize, usize, f64)>,
    pub h: f64,
    pub topology: Topology,
}

impl TfimSpec {
    /// Nearest-neighbour chain with uniform coupling. A periodic chain needs `n >= 3`.
    pub fn chain(n: usize, j: f64, h: f64, periodic: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("chain needs at least one site".into()));
        }
        if periodic && n < 3 {
            return Err(Error::Argument(format!("periodic chain needs n >= 3, got {n}")));
        }
        let mut couplings: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1, j)).collect();
        if periodic {
            couplings.push((n - 1, 0, j));
        }
        Ok(Self {
            n,
            couplings,
            h,
            topology: if periodic {
                Topology::ChainPeriodic
            } else {
                Topology::ChainOpen
            },
        })
    }

    pub fn explicit(n: usize, couplings: Vec<(usize, usize, f64)>, h: f64) -> Self {
        Self {
            n,
            couplings,
            h,
            topology: Topology::Explicit,
        }
    }
}

pub fn build_tfim(spec: &TfimSpec) -> Result<PauliSum> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::Argument("TFIM needs at least one site".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut h = PauliSum::new(n);
    for &(i, j, w) in &spec.couplings {
        if i >= n || j >= n || i == j {
            return Err(Error::Argument(format!("invalid bond ({i}, {j}) for {n} sites")));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(Error::Argument(format!("duplicate bond ({i}, {j})")));
        }
        let mut p = PauliString::single(n, i, Letter::Z);
        p.set_letter(j, Letter::Z);
        h.add_term(p, w)?;
    }
    if spec.h != 0.0 {
        for q in 0..n {
            h.add_term(PauliString::single(n, q, Letter::X), spec.h)?;
        }
    }
    Ok(h)
}
