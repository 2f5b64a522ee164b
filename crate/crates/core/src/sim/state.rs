use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::pauli::PauliSum;

use super::circuit::{Circuit, Gate, GateMatrix, Mat2, Mat4};
use super::{DENSITY_LIMIT, STATEVECTOR_LIMIT};

pub(crate) fn check_capacity(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::Capacity {
            what,
            requested: n,
            limit,
        });
    }
    if n == 0 {
        return Err(Error::Argument(format!("{what} needs at least one qubit")));
    }
    Ok(())
}

/// Bit position of qubit `q` in a dense index: qubit 0 is the most significant bit.
#[inline]
pub(crate) fn bit_pos(n: usize, q: usize) -> usize {
    n - 1 - q
}

/// Pure state of up to 20 qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_capacity("state vector", num_qubits, STATEVECTOR_LIMIT)?;
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    pub fn from_amplitudes(num_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        check_capacity("state vector", num_qubits, STATEVECTOR_LIMIT)?;
        if amps.len() != 1 << num_qubits {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {num_qubits} qubits",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Argument(format!("state norm^2 is {norm}, expected 1")));
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        match gate.matrix() {
            GateMatrix::One(q, u) => self.apply_1q(&u, q),
            GateMatrix::Two(a, b, u) => self.apply_2q(&u, a, b),
        }
    }

    pub(crate) fn apply_1q(&mut self, u: &Mat2, q: usize) {
        let stride = 1usize << bit_pos(self.num_qubits, q);
        for i0 in 0..self.amps.len() {
            if i0 & stride != 0 {
                continue;
            }
            let i1 = i0 | stride;
            let (a, b) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = u[0][0] * a + u[0][1] * b;
            self.amps[i1] = u[1][0] * a + u[1][1] * b;
        }
    }

    pub(crate) fn apply_2q(&mut self, u: &Mat4, qa: usize, qb: usize) {
        let sa = 1usize << bit_pos(self.num_qubits, qa);
        let sb = 1usize << bit_pos(self.num_qubits, qb);
        for base in 0..self.amps.len() {
            if base & (sa | sb) != 0 {
                continue;
            }
            let idx = [base, base | sb, base | sa, base | sa | sb];
            let v: [C64; 4] = std::array::from_fn(|k| self.amps[idx[k]]);
            for (i, &t) in idx.iter().enumerate() {
                self.amps[t] = (0..4).map(|k| u[i][k] * v[k]).sum();
            }
        }
    }

    /// `<psi|H|psi>`.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        crate::error::ensure_same_qubits(self.num_qubits, h.num_qubits(), "expectation")?;
        let hv = h.apply(&self.amps);
        Ok(self
            .amps
            .iter()
            .zip(&hv)
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        check_capacity("density matrix", self.num_qubits, DENSITY_LIMIT)?;
        Ok(DensityMatrix {
            num_qubits: self.num_qubits,
            rho: CMatrix::outer(&self.amps),
        })
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm_sqr()
    }
}

/// Runs `c` from `|0...0>`.
pub fn run_circuit(c: &Circuit) -> Result<StateVector> {
    let mut s = StateVector::zero(c.num_qubits())?;
    run_from(&mut s, c)?;
    Ok(s)
}

/// Applies `c` to an existing state.
pub fn run_from(state: &mut StateVector, c: &Circuit) -> Result<()> {
    crate::error::ensure_same_qubits(state.num_qubits, c.num_qubits(), "circuit")?;
    for g in c.gates() {
        state.apply_gate(g);
    }
    Ok(())
}

/// Mixed state of up to 12 qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        check_capacity("density matrix", num_qubits, DENSITY_LIMIT)?;
        let mut rho = CMatrix::zeros(1 << num_qubits);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, rho })
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_capacity("density matrix", num_qubits, DENSITY_LIMIT)?;
        let d = 1usize << num_qubits;
        let rho = CMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
        Ok(Self { num_qubits, rho })
    }

    /// Wraps a matrix after checking Hermiticity and unit trace (both to 1e-10).
    pub fn from_matrix(num_qubits: usize, rho: CMatrix) -> Result<Self> {
        check_capacity("density matrix", num_qubits, DENSITY_LIMIT)?;
        if rho.dim() != 1 << num_qubits {
            return Err(Error::Dimension(format!(
                "{0}x{0} matrix for {num_qubits} qubits",
                rho.dim()
            )));
        }
        if !rho.is_hermitian(1e-10) {
            return Err(Error::Argument("density matrix is not Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Argument(format!("density matrix trace is {tr}")));
        }
        Ok(Self { num_qubits, rho })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        let n = self.num_qubits;
        match gate.matrix() {
            GateMatrix::One(q, u) => self.rho.conjugate_1q(&u, bit_pos(n, q)),
            GateMatrix::Two(a, b, u) => {
                let (pa, pb) = (bit_pos(n, a), bit_pos(n, b));
                self.rho.left_2q(&u, pa, pb);
                self.rho.right_2q_dagger(&u, pa, pb);
            }
        }
    }

    /// `rho -> (1 - p) rho + p I/d`.
    pub fn depolarize_global(&mut self, p: f64) -> Result<()> {
        check_probability("global depolarizing", p)?;
        if p == 0.0 {
            return Ok(());
        }
        let d = self.rho.dim();
        let shift = p / d as f64;
        for v in self.rho.data_mut() {
            *v *= 1.0 - p;
        }
        for i in 0..d {
            self.rho[(i, i)] += shift;
        }
        Ok(())
    }

    /// Depolarizing channel of total rate `rate` on `qubits`: every non-identity
    /// Pauli on the support is applied with probability `rate / (4^k - 1)`.
    ///
    /// Uses the equivalent replacement form
    /// `rho -> (1 - l) rho + l (I_S / 2^k) (x) tr_S rho` with `l = rate 4^k / (4^k - 1)`.
    pub fn depolarize_local(&mut self, qubits: &[usize], rate: f64) -> Result<()> {
        check_probability("local depolarizing", rate)?;
        let n = self.num_qubits;
        if qubits.is_empty() || qubits.iter().any(|&q| q >= n) {
            return Err(Error::Argument(format!("invalid support {qubits:?} on {n} qubits")));
        }
        if rate == 0.0 {
            return Ok(());
        }
        let k = qubits.len() as i32;
        let four_k = 4f64.powi(k);
        let lam = rate * four_k / (four_k - 1.0);
        let mask: usize = qubits.iter().map(|&q| 1usize << bit_pos(n, q)).sum();
        let subsets: Vec<usize> = subsets_of(mask);
        let d = self.rho.dim();
        let keep = 1.0 - lam;
        let mix = lam / subsets.len() as f64;
        for r in (0..d).filter(|r| r & mask == 0) {
            for c in (0..d).filter(|c| c & mask == 0) {
                let traced: C64 = subsets.iter().map(|&s| self.rho[(r | s, c | s)]).sum();
                for &sr in &subsets {
                    for &sc in &subsets {
                        let v = &mut self.rho[(r | sr, c | sc)];
                        *v *= keep;
                        if sr == sc {
                            *v += traced * mix;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Single-qubit Pauli channel `(1-p) rho + px X rho X + py Y rho Y + pz Z rho Z`.
    pub fn pauli_channel(&mut self, q: usize, px: f64, py: f64, pz: f64) -> Result<()> {
        let n = self.num_qubits;
        if q >= n {
            return Err(Error::Argument(format!("qubit {q} out of range for {n} qubits")));
        }
        for (name, p) in [("p_x", px), ("p_y", py), ("p_z", pz), ("p_x+p_y+p_z", px + py + pz)] {
            check_probability(name, p)?;
        }
        if px + py + pz == 0.0 {
            return Ok(());
        }
        let s = 1usize << bit_pos(n, q);
        let d = self.rho.dim();
        let p = px + py + pz;
        // Within each 2x2 block: diagonal-parity entries keep (1-p+pz) and pick
        // up (px+py) from the opposite corner; off-parity entries keep (1-p-pz)
        // and pick up (px-py).
        let (same_keep, same_swap) = (1.0 - p + pz, px + py);
        let (diff_keep, diff_swap) = (1.0 - p - pz, px - py);
        for r in (0..d).filter(|r| r & s == 0) {
            for c in (0..d).filter(|c| c & s == 0) {
                let (r1, c1) = (r | s, c | s);
                let a00 = self.rho[(r, c)];
                let a11 = self.rho[(r1, c1)];
                let a01 = self.rho[(r, c1)];
                let a10 = self.rho[(r1, c)];
                self.rho[(r, c)] = a00 * same_keep + a11 * same_swap;
                self.rho[(r1, c1)] = a11 * same_keep + a00 * same_swap;
                self.rho[(r, c1)] = a01 * diff_keep + a10 * diff_swap;
                self.rho[(r1, c)] = a10 * diff_keep + a01 * diff_swap;
            }
        }
        Ok(())
    }

    /// `Re tr(H rho)`.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        crate::error::ensure_same_qubits(self.num_qubits, h.num_qubits(), "expectation")?;
        let d = self.rho.dim();
        let mut acc = 0.0;
        for (p, w) in h.terms() {
            let (xm, zm) = p.dense_masks();
            // P|b> = coef |b ^ xm>, so tr(P rho) = sum_b coef(b) rho[b][b ^ xm].
            let mut t = ZERO;
            for b in 0..d {
                let (coef, b2) = p.apply_with_masks(b as u64, xm, zm);
                t += coef * self.rho[(b, b2 as usize)];
            }
            acc += w * t.re;
        }
        Ok(acc)
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.rho.trace_product(&self.rho).re
    }

    /// Smallest eigenvalue; used by validity checks.
    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::eigh(&self.rho).0[0]
    }
}

fn subsets_of(mask: usize) -> Vec<usize> {
    // Enumerate submasks in increasing order.
    let mut out = Vec::new();
    let mut s = 0usize;
    loop {
        out.push(s);
        if s == mask {
            break;
        }
        s = ((s | !mask).wrapping_add(1)) & mask;
    }
    out
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::Argument(format!("{name} = {p} is outside [0, 1]")));
    }
    Ok(())
}
