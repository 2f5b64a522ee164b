//! Shared generators and dense references for the integration suites.
#![allow(dead_code)]

use fcqem::linalg::{CMatrix, C64};
use fcqem::pauli::Letter;
use fcqem::sim::DensityMatrix;
use fcqem::{PauliString, PauliSum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Single-qubit matrix of a letter, written out by hand.
pub fn letter_matrix(l: Letter) -> CMatrix {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    CMatrix::from_rows(&match l {
        Letter::I => vec![vec![o, z], vec![z, o]],
        Letter::X => vec![vec![z, o], vec![o, z]],
        Letter::Y => vec![vec![z, -i], vec![i, z]],
        Letter::Z => vec![vec![o, z], vec![z, -o]],
    })
}

/// Kronecker product of letter matrices, qubit 0 most significant, times the phase.
pub fn kron_string(p: &PauliString) -> CMatrix {
    let mut m = CMatrix::identity(1);
    for q in 0..p.num_qubits() {
        m = m.kron(&letter_matrix(p.letter(q)));
    }
    m.scale(p.phase().to_complex())
}

pub fn kron_sum(h: &PauliSum) -> CMatrix {
    let d = 1 << h.num_qubits();
    let mut m = CMatrix::zeros(d);
    for (p, w) in h.terms() {
        m = m.add(&kron_string(p).scale(c(w, 0.0)));
    }
    m
}

pub fn all_strings(n: usize) -> Vec<PauliString> {
    let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    (0..4usize.pow(n as u32))
        .map(|mut k| {
            let mut p = PauliString::identity(n);
            for q in 0..n {
                p.set_letter(q, letters[k % 4]);
                k /= 4;
            }
            p
        })
        .collect()
}

/// `sum_P tr(P A) / d  P` for Hermitian `A`.
pub fn pauli_decompose(a: &CMatrix, n: usize) -> PauliSum {
    let d = (1 << n) as f64;
    let terms = all_strings(n)
        .into_iter()
        .map(|p| {
            let w = kron_string(&p).trace_product(a).re / d;
            (p, w)
        })
        .collect::<Vec<_>>();
    PauliSum::from_terms(n, terms).unwrap()
}

pub fn random_string(r: &mut impl Rng, n: usize) -> PauliString {
    let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set_letter(q, letters[r.random_range(0..4)]);
    }
    p
}

pub fn random_sum(r: &mut impl Rng, n: usize, terms: usize) -> PauliSum {
    let t: Vec<_> = (0..terms)
        .map(|_| (random_string(r, n), r.random_range(-1.0..1.0)))
        .collect();
    PauliSum::from_terms(n, t).unwrap()
}

/// Random sum of Z-type strings.
pub fn random_diagonal_sum(r: &mut impl Rng, n: usize, terms: usize) -> PauliSum {
    let t: Vec<_> = (0..terms)
        .map(|_| {
            let mut p = PauliString::identity(n);
            for q in 0..n {
                if r.random_bool(0.5) {
                    p.set_letter(q, Letter::Z);
                }
            }
            (p, r.random_range(-1.0..1.0))
        })
        .collect();
    PauliSum::from_terms(n, t).unwrap()
}

pub fn random_hermitian(r: &mut impl Rng, d: usize) -> CMatrix {
    let a = CMatrix::from_fn(d, |_, _| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
    a.add(&a.dagger()).scale(c(0.5, 0.0))
}

/// `A A^dagger / tr` with a Gaussian-like `A`: a full-rank random state.
pub fn random_density(r: &mut impl Rng, n: usize) -> DensityMatrix {
    let d = 1 << n;
    let a = CMatrix::from_fn(d, |_, _| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
    let m = a.matmul(&a.dagger());
    let t = m.trace().re;
    DensityMatrix::from_matrix(n, m.scale(c(1.0 / t, 0.0))).unwrap()
}

/// Random diagonal density matrix.
pub fn random_diagonal_density(r: &mut impl Rng, n: usize) -> DensityMatrix {
    let d = 1 << n;
    let p: Vec<f64> = (0..d).map(|_| r.random_range(0.0..1.0)).collect();
    let s: f64 = p.iter().sum();
    let v: Vec<C64> = p.iter().map(|x| c(x / s, 0.0)).collect();
    DensityMatrix::from_matrix(n, CMatrix::diagonal(&v)).unwrap()
}

pub fn random_probs(r: &mut impl Rng, len: usize) -> Vec<f64> {
    let p: Vec<f64> = (0..len).map(|_| r.random_range(0.0..1.0)).collect();
    let s: f64 = p.iter().sum();
    p.into_iter().map(|x| x / s).collect()
}

/// Joint weights as the literal double sum over outcome pairs.
pub fn joint_weights_literal(p: &[f64], q: &[f64]) -> Vec<f64> {
    let n = p.len();
    (0..n)
        .map(|i| {
            let mut t = 2.0 * p[i] * q[i];
            for j in 0..n {
                if j < i {
                    t += p[i] * q[j] - q[i] * p[j];
                } else if j > i {
                    t += q[i] * p[j] - p[i] * q[j];
                }
            }
            0.5 * t
        })
        .collect()
}
