//! Dense references on two copies of a density matrix.
//!
//! The doubled register puts copy one on qubits `0..n` and copy two on
//! `n..2n`, so a doubled index is `(i << n) | j`. The sign operator `D` is
//! `+1` when `i <= j` and `-1` otherwise, taken in a chosen measurement basis.

use super::ZERO_DENOMINATOR;
use crate::error::{ensure_same_qubits, Error, Result};
use crate::linalg::{eigh, CMatrix, C64};
use crate::pauli::{Basis, Letter, PauliString, PauliSum, Tpb};
use crate::sim::{rotated_diagonal, DensityMatrix, DENSITY_LIMIT};

fn check_doubled(n: usize) -> Result<()> {
    if 2 * n > DENSITY_LIMIT {
        return Err(Error::Capacity {
            what: "two-copy oracle",
            requested: n,
            limit: DENSITY_LIMIT / 2,
        });
    }
    Ok(())
}

/// `tr(M rho^2) / tr(rho^2)`.
pub fn vd_exact(rho: &DensityMatrix, m: &PauliSum) -> Result<f64> {
    ensure_same_qubits(rho.num_qubits(), m.num_qubits(), "observable")?;
    let r = rho.matrix();
    let purity = r.trace_product(r).re;
    if purity < ZERO_DENOMINATOR {
        return Err(Error::DegenerateInput(format!("tr(rho^2) = {purity:e}")));
    }
    Ok(r.left_pauli_sum(m).trace_product(r).re / purity)
}

/// `p` placed on qubits `offset..offset + p.len()` of a `total`-qubit register.
fn embed(p: &PauliString, total: usize, offset: usize) -> PauliString {
    let mut out = PauliString::identity(total);
    for q in 0..p.num_qubits() {
        out.set_letter(offset + q, p.letter(q));
    }
    out
}

/// `(A (x) I + I (x) A) * scale` on the doubled register.
fn symmetrized(a: &PauliSum, scale: f64) -> PauliSum {
    let n = a.num_qubits();
    let terms = a.terms().flat_map(|(p, w)| {
        [
            (embed(p, 2 * n, 0), w * scale),
            (embed(p, 2 * n, n), w * scale),
        ]
    });
    PauliSum::from_terms(2 * n, terms).expect("phase-free terms")
}

fn doubled_basis(b: &Tpb) -> Tpb {
    let mut axes = b.axes().to_vec();
    axes.extend_from_slice(b.axes());
    Tpb::new(axes).expect("non-empty")
}

fn sign(n: usize, k: usize) -> f64 {
    let (i, j) = (k >> n, k & ((1 << n) - 1));
    if i <= j {
        1.0
    } else {
        -1.0
    }
}

/// `sum_k D_kk diag(W x W^dagger)_kk` with `W` the rotation into `basis` on both copies.
fn signed_trace(x: &CMatrix, n: usize, basis: &Tpb) -> C64 {
    rotated_diagonal(x, &doubled_basis(basis))
        .into_iter()
        .enumerate()
        .map(|(k, v)| v * sign(n, k))
        .sum()
}

/// `rho (x) rho`.
fn two_copies(rho: &DensityMatrix) -> CMatrix {
    rho.matrix().kron(rho.matrix())
}

/// `Re tr(Q2 D_B rho rho)` with `Q2 = (Q (x) I + I (x) Q) / 2`.
fn signed_numerator(rr: &CMatrix, q2: &PauliSum, n: usize, basis: &Tpb) -> f64 {
    // tr(Q2 D R) = tr(D R Q2)
    signed_trace(&rr.right_pauli_sum(q2), n, basis).re
}

fn signed_denominator(rho: &DensityMatrix, basis: &Tpb) -> f64 {
    let p: Vec<f64> = rotated_diagonal(rho.matrix(), basis)
        .into_iter()
        .map(|v| v.re)
        .collect();
    // sum over i <= j minus i > j of p_i p_j equals sum p_i^2.
    p.iter().map(|x| x * x).sum()
}

/// First-order truncated two-copy estimate
/// `Re tr(M2 D_B rho rho) / tr(D_B rho rho)` in basis `basis`.
pub fn truncated_vd(rho: &DensityMatrix, m: &PauliSum, basis: &Tpb) -> Result<f64> {
    let n = rho.num_qubits();
    ensure_same_qubits(n, m.num_qubits(), "observable")?;
    ensure_same_qubits(n, basis.num_qubits(), "preferred basis")?;
    check_doubled(n)?;
    let den = signed_denominator(rho, basis);
    if den <= ZERO_DENOMINATOR {
        return Err(Error::DegenerateInput(format!("tr(D rho rho) = {den:e}")));
    }
    let rr = two_copies(rho);
    Ok(signed_numerator(&rr, &symmetrized(m, 0.5), n, basis) / den)
}

/// The basis a string is naturally measured in: its own letters, Z elsewhere.
pub fn natural_host(q: &PauliString) -> Tpb {
    let axes = (0..q.num_qubits())
        .map(|k| match q.letter(k) {
            Letter::X => Basis::X,
            Letter::Y => Basis::Y,
            _ => Basis::Z,
        })
        .collect();
    Tpb::new(axes).expect("non-empty")
}

/// Truncation error of `q` when its sign operator is taken in `preferred`
/// instead of its own host: `|tr(Q2 (D_host - D_preferred) rho rho)|`.
pub fn truncation_epsilon(q: &PauliString, rho: &DensityMatrix, preferred: &Tpb) -> Result<f64> {
    truncation_epsilon_in(q, rho, &natural_host(q), preferred)
}

/// As [`truncation_epsilon`] with an explicit host basis.
pub fn truncation_epsilon_in(
    q: &PauliString,
    rho: &DensityMatrix,
    host: &Tpb,
    preferred: &Tpb,
) -> Result<f64> {
    let n = rho.num_qubits();
    ensure_same_qubits(n, q.num_qubits(), "string")?;
    ensure_same_qubits(n, host.num_qubits(), "host basis")?;
    ensure_same_qubits(n, preferred.num_qubits(), "preferred basis")?;
    if !host.hosts(q) {
        return Err(Error::Argument(format!("basis {host} does not host {q}")));
    }
    check_doubled(n)?;
    let q2 = symmetrized(&PauliSum::from_terms(n, [(q.phase_free(), 1.0)])?, 0.5);
    let rr = two_copies(rho);
    let a = signed_numerator(&rr, &q2, n, host);
    let b = signed_numerator(&rr, &q2, n, preferred);
    Ok((a - b).abs())
}

fn doubled_generator(g: &PauliSum, n: usize) -> Result<PauliSum> {
    if g.num_qubits() == n {
        Ok(symmetrized(g, 1.0))
    } else if g.num_qubits() == 2 * n {
        Ok(g.clone())
    } else {
        Err(Error::Dimension(format!(
            "generator on {} qubits for a {n}-qubit state",
            g.num_qubits()
        )))
    }
}

/// `exp(i t G)` for Hermitian `G`.
fn expi(g: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = eigh(g);
    let d = g.dim();
    let phases: Vec<C64> = vals.iter().map(|l| C64::from_polar(1.0, l * t)).collect();
    CMatrix::from_fn(d, |r, c| {
        (0..d).map(|k| vecs[k][r] * phases[k] * vecs[k][c].conj()).sum()
    })
}

fn computational_sign_trace(x: &CMatrix, n: usize) -> C64 {
    (0..x.dim()).map(|k| x[(k, k)] * sign(n, k)).sum()
}

fn check_eigenstate(rho: &DensityMatrix, m: &PauliSum) -> Result<f64> {
    let lam = rho.expectation(m)?;
    let mr = rho.matrix().left_pauli_sum(m);
    let resid = mr.sub(&rho.matrix().scale(C64::new(lam, 0.0))).frobenius_norm();
    if resid >= 1e-8 {
        return Err(Error::Precondition(format!(
            "state is not an eigenstate of the observable (residual {resid:e})"
        )));
    }
    Ok(lam)
}

/// Central difference of the truncated estimate (computational sign operator)
/// along `rho rho -> e^{iGt} rho rho e^{-iGt}`.
///
/// `g` acts on one copy (applied to both) or on the doubled register.
pub fn derivative_check(rho: &DensityMatrix, m: &PauliSum, g: &PauliSum, delta: f64) -> Result<f64> {
    let n = rho.num_qubits();
    ensure_same_qubits(n, m.num_qubits(), "observable")?;
    check_doubled(n)?;
    if !(1e-5..=1e-2).contains(&delta) {
        return Err(Error::Argument(format!("step {delta} outside [1e-5, 1e-2]")));
    }
    check_eigenstate(rho, m)?;
    let gd = doubled_generator(g, n)?.to_dense();
    let m2 = symmetrized(m, 0.5);
    let rr = two_copies(rho);
    let f = |t: f64| {
        let u = expi(&gd, t);
        let rt = u.matmul(&rr).matmul(&u.dagger());
        let num = computational_sign_trace(&rt.right_pauli_sum(&m2), n).re;
        let den = computational_sign_trace(&rt, n).re;
        num / den
    };
    Ok((f(delta) - f(-delta)) / (2.0 * delta))
}

/// Exact derivative at `t = 0`: `Re(i tr(D [M2, G] rho rho)) / tr(D rho rho)`.
pub fn derivative_analytic(rho: &DensityMatrix, m: &PauliSum, g: &PauliSum) -> Result<f64> {
    let n = rho.num_qubits();
    ensure_same_qubits(n, m.num_qubits(), "observable")?;
    check_doubled(n)?;
    check_eigenstate(rho, m)?;
    let gd = doubled_generator(g, n)?.to_dense();
    let m2 = symmetrized(m, 0.5);
    let rr = two_copies(rho);
    let m2gr = gd.matmul(&rr).left_pauli_sum(&m2);
    let gm2r = gd.matmul(&rr.left_pauli_sum(&m2));
    let comm = m2gr.sub(&gm2r);
    let num = (C64::new(0.0, 1.0) * computational_sign_trace(&comm, n)).re;
    let den = computational_sign_trace(&rr, n).re;
    if den.abs() <= ZERO_DENOMINATOR {
        return Err(Error::DegenerateInput(format!("tr(D rho rho) = {den:e}")));
    }
    Ok(num / den)
}
