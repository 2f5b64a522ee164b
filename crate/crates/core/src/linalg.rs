//! Small dense complex matrices and Hermitian eigensolvers.

use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pauli::PauliSum;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            m.data[r * dim..(r + 1) * dim].copy_from_slice(row);
        }
        m
    }

    /// Fills row by row, so stateful closures see a fixed order.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = CMatrix::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * d..(k + 1) * d];
                let dst = &mut out.data[r * d..(r + 1) * d];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (a, b) = (self.dim, other.dim);
        let d = a * b;
        let mut out = CMatrix::zeros(d);
        for r1 in 0..a {
            for c1 in 0..a {
                let s = self.data[r1 * a + c1];
                if s == ZERO {
                    continue;
                }
                for r2 in 0..b {
                    for c2 in 0..b {
                        out.data[(r1 * b + r2) * d + c1 * b + c2] = s * other.data[r2 * b + c2];
                    }
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMatrix {
        let d = self.dim;
        CMatrix::from_fn(d, |r, c| self.data[c * d + r].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).collect()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> C64 {
        let d = self.dim;
        let mut acc = ZERO;
        for r in 0..d {
            for k in 0..d {
                acc += self.data[r * d + k] * other.data[k * d + r];
            }
        }
        acc
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim;
        (0..d).all(|r| (r..d).all(|c| (self.data[r * d + c] - self.data[c * d + r].conj()).norm() <= tol))
    }

    /// `M v`.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim;
        (0..d)
            .map(|r| self.data[r * d..(r + 1) * d].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Left-multiplies by a 2x2 operator acting on the bit at `pos`
    /// (bit position in the row index, LSB = 0).
    pub(crate) fn left_1q(&mut self, u: &[[C64; 2]; 2], pos: usize) {
        let d = self.dim;
        let stride = 1usize << pos;
        for r0 in 0..d {
            if r0 & stride != 0 {
                continue;
            }
            let r1 = r0 | stride;
            for c in 0..d {
                let a = self.data[r0 * d + c];
                let b = self.data[r1 * d + c];
                self.data[r0 * d + c] = u[0][0] * a + u[0][1] * b;
                self.data[r1 * d + c] = u[1][0] * a + u[1][1] * b;
            }
        }
    }

    /// Right-multiplies by the adjoint of a 2x2 operator on bit `pos`.
    pub(crate) fn right_1q_dagger(&mut self, u: &[[C64; 2]; 2], pos: usize) {
        let d = self.dim;
        let stride = 1usize << pos;
        for r in 0..d {
            let row = &mut self.data[r * d..(r + 1) * d];
            for c0 in 0..d {
                if c0 & stride != 0 {
                    continue;
                }
                let c1 = c0 | stride;
                let a = row[c0];
                let b = row[c1];
                row[c0] = a * u[0][0].conj() + b * u[0][1].conj();
                row[c1] = a * u[1][0].conj() + b * u[1][1].conj();
            }
        }
    }

    /// `U M U^dagger` for a 2x2 `U` on bit `pos`.
    pub(crate) fn conjugate_1q(&mut self, u: &[[C64; 2]; 2], pos: usize) {
        self.left_1q(u, pos);
        self.right_1q_dagger(u, pos);
    }

    /// Left-multiplies by a 4x4 operator on bits `(pa, pb)`; local index is `(bit_a << 1) | bit_b`.
    pub(crate) fn left_2q(&mut self, u: &[[C64; 4]; 4], pa: usize, pb: usize) {
        let d = self.dim;
        let (sa, sb) = (1usize << pa, 1usize << pb);
        for base in 0..d {
            if base & (sa | sb) != 0 {
                continue;
            }
            let idx = [base, base | sb, base | sa, base | sa | sb];
            for c in 0..d {
                let v: [C64; 4] = std::array::from_fn(|k| self.data[idx[k] * d + c]);
                for (i, &ri) in idx.iter().enumerate() {
                    self.data[ri * d + c] = (0..4).map(|k| u[i][k] * v[k]).sum();
                }
            }
        }
    }

    pub(crate) fn right_2q_dagger(&mut self, u: &[[C64; 4]; 4], pa: usize, pb: usize) {
        let d = self.dim;
        let (sa, sb) = (1usize << pa, 1usize << pb);
        for r in 0..d {
            let row = &mut self.data[r * d..(r + 1) * d];
            for base in 0..d {
                if base & (sa | sb) != 0 {
                    continue;
                }
                let idx = [base, base | sb, base | sa, base | sa | sb];
                let v: [C64; 4] = std::array::from_fn(|k| row[idx[k]]);
                for (i, &ci) in idx.iter().enumerate() {
                    row[ci] = (0..4).map(|k| v[k] * u[i][k].conj()).sum();
                }
            }
        }
    }

    /// `P M` for a Pauli sum `P` (matrix-free).
    pub fn left_pauli_sum(&self, p: &PauliSum) -> CMatrix {
        let d = self.dim;
        let mut out = CMatrix::zeros(d);
        for (s, w) in p.terms() {
            let (xm, zm) = s.dense_masks();
            for r in 0..d {
                let (c, r2) = s.apply_with_masks(r as u64, xm, zm);
                let coef = c * w;
                let (src, dst) = (r * d, r2 as usize * d);
                for k in 0..d {
                    out.data[dst + k] += coef * self.data[src + k];
                }
            }
        }
        out
    }

    /// `M P` for a Pauli sum `P` (matrix-free).
    pub fn right_pauli_sum(&self, p: &PauliSum) -> CMatrix {
        let d = self.dim;
        let mut out = CMatrix::zeros(d);
        for (s, w) in p.terms() {
            let (xm, zm) = s.dense_masks();
            for c in 0..d {
                // P|c> = coef |c ^ xm>, so (M P)[r][c] = M[r][c ^ xm] * coef.
                let (coef, c2) = s.apply_with_masks(c as u64, xm, zm);
                let coef = coef * w;
                for r in 0..d {
                    out.data[r * d + c] += self.data[r * d + c2 as usize] * coef;
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Column `k` of the returned vectors pairs with `values[k]`.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, Vec<Vec<C64>>) {
    let d = m.dim();
    let a = DMatrix::from_fn(d, d, |r, c| {
        // Symmetrize to keep rounding noise from breaking Hermiticity.
        (m[(r, c)] + m[(c, r)].conj()) * 0.5
    });
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Lowest eigenpair of a Pauli sum by restarted Lanczos.
///
/// Each cycle runs a short Krylov recursion from the current Ritz vector and
/// regenerates the basis on a second pass, so memory stays at a handful of
/// vectors. Stops when `||H v - E v|| <= tol`.
pub fn lanczos_ground(h: &PauliSum, tol: f64, max_cycles: usize) -> (f64, Vec<C64>, f64) {
    let dim = 1usize << h.num_qubits();
    let krylov = dim.min(40);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_05);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);

    let mut energy = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut w = vec![ZERO; dim];
    for _ in 0..max_cycles {
        // First pass: tridiagonal coefficients.
        let mut alphas = Vec::with_capacity(krylov);
        let mut betas: Vec<f64> = Vec::with_capacity(krylov);
        let mut prev = vec![ZERO; dim];
        let mut cur = v.clone();
        for j in 0..krylov {
            h.apply_into(&cur, &mut w);
            let a = dot(&cur, &w).re;
            let b_prev = if j > 0 { betas[j - 1] } else { 0.0 };
            for i in 0..dim {
                w[i] -= cur[i] * a + prev[i] * b_prev;
            }
            // One step of local reorthogonalization against the current vector.
            let corr = dot(&cur, &w);
            for i in 0..dim {
                w[i] -= cur[i] * corr;
            }
            alphas.push(a);
            let b = norm(&w);
            if j + 1 == krylov || b < 1e-13 {
                break;
            }
            betas.push(b);
            prev = std::mem::replace(&mut cur, w.iter().map(|x| x / b).collect());
        }
        let k = alphas.len();
        let t = DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                alphas[r]
            } else if r + 1 == c {
                betas[r]
            } else if c + 1 == r {
                betas[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        let coeffs: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();

        // Second pass: rebuild the Ritz vector.
        let mut ritz = vec![ZERO; dim];
        let mut prev = vec![ZERO; dim];
        let mut cur = v.clone();
        for j in 0..k {
            for i in 0..dim {
                ritz[i] += cur[i] * coeffs[j];
            }
            if j + 1 == k {
                break;
            }
            h.apply_into(&cur, &mut w);
            let b_prev = if j > 0 { betas[j - 1] } else { 0.0 };
            for i in 0..dim {
                w[i] -= cur[i] * alphas[j] + prev[i] * b_prev;
            }
            let corr = dot(&cur, &w);
            for i in 0..dim {
                w[i] -= cur[i] * corr;
            }
            let b = betas[j];
            prev = std::mem::replace(&mut cur, w.iter().map(|x| x / b).collect());
        }
        let nr = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= nr);
        h.apply_into(&ritz, &mut w);
        let e = dot(&ritz, &w).re;
        residual = w
            .iter()
            .zip(&ritz)
            .map(|(a, b)| (a - b * e).norm_sqr())
            .sum::<f64>()
            .sqrt();
        energy = e;
        v = ritz;
        if residual <= tol {
            break;
        }
    }
    (energy, v, residual)
}
