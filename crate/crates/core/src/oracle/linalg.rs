//! Dense complex matrices and a self-contained Hermitian eigensolver.
//!
//! The eigensolver reduces to real symmetric tridiagonal form with Householder
//! reflections, rotates the complex off-diagonal phases away, and finishes
//! with implicit-shift QL iterations.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `‖M − M†‖_max` for [`DenseHermitian`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        CMatrix { data: self.data.iter().map(|z| z * s).collect(), ..*self }
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &CMatrix, s: f64) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix { data: self.data.iter().zip(&other.data).map(|(a, b)| a + b * s).collect(), ..*self }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot_plain(self.row(i), v)).collect()
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `‖M − M†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `Tr(A B)`.
    pub fn trace_product(&self, other: &CMatrix) -> C64 {
        assert_eq!((self.cols, self.rows), (other.rows, other.cols));
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self[(i, j)] * other[(j, i)];
            }
        }
        acc
    }

    /// Adds `s |x⟩⟨y|`.
    pub fn add_outer(&mut self, s: f64, x: &[C64], y: &[C64]) {
        for (i, &xi) in x.iter().enumerate() {
            let xs = xi * s;
            if xs.re == 0.0 && xs.im == 0.0 {
                continue;
            }
            for (m, &yj) in self.row_mut(i).iter_mut().zip(y) {
                *m += xs * yj.conj();
            }
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `⟨x|y⟩`, conjugate-linear in the first argument.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn dot_plain(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += a x`.
pub fn axpy(a: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn kron_vec(x: &[C64], y: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        out.extend(y.iter().map(|b| a * b));
    }
    out
}

/// A complex Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseHermitian(CMatrix);

impl DenseHermitian {
    /// Wraps `m`, checking shape and `‖M − M†‖_max ≤ 1e-12`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Domain(format!("{}x{} matrix is not square", m.rows, m.cols)));
        }
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOLERANCE {
            return Err(Error::Domain(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(DenseHermitian(m))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn kron(&self, other: &DenseHermitian) -> DenseHermitian {
        DenseHermitian(self.0.kron(&other.0))
    }

    pub fn scale(&self, s: f64) -> DenseHermitian {
        DenseHermitian(self.0.scale(s))
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &DenseHermitian, s: f64) -> DenseHermitian {
        DenseHermitian(self.0.add_scaled(&other.0, s))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl Eigen {
    /// `max_i ‖M v_i − λ_i v_i‖`.
    pub fn max_residual(&self, m: &CMatrix) -> f64 {
        self.values
            .iter()
            .zip(&self.vectors)
            .map(|(&l, v)| {
                let mv = m.mul_vec(v);
                mv.iter().zip(v).map(|(a, b)| (a - b * l).norm_sqr()).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |⟨v_i|v_j⟩ − δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, vi) in self.vectors.iter().enumerate() {
            for (j, vj) in self.vectors.iter().enumerate().skip(i) {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(vi, vj) - expect).norm());
            }
        }
        worst
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let mut m = CMatrix::zeros(n, n);
        for (&l, v) in self.values.iter().zip(&self.vectors) {
            m.add_outer(l, v, v);
        }
        m
    }
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[i]` couples `i` and `i + 1`; the final entry is zero.
    off: Vec<f64>,
    /// Phases `D` with `T = D S D†`, `S` real.
    phases: Vec<C64>,
    /// Householder vectors and the index they start at.
    reflectors: Vec<(usize, Vec<C64>)>,
}

fn tridiagonalize(m: &CMatrix) -> Tridiagonal {
    let n = m.rows;
    let mut a = m.clone();
    let mut sub = vec![C64::new(0.0, 0.0); n];
    let mut reflectors = Vec::new();

    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let x: Vec<C64> = (start..n).map(|i| a[(i, k)]).collect();
        let tail_sq: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail_sq == 0.0 {
            sub[k] = x[0];
            continue;
        }
        let x_norm = (x[0].norm_sqr() + tail_sq).sqrt();
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let alpha = -phase * x_norm;
        let mut v = x;
        v[0] -= alpha;
        let v_norm = norm(&v);
        v.iter_mut().for_each(|z| *z /= v_norm);

        // A22 ← H A22 H with H = I − 2vv†: p = A22 v, w = p − (v†p) v,
        // A22 −= 2(v w† + w v†).
        let len = n - start;
        let p: Vec<C64> = (0..len).map(|i| dot_plain(&a.row(start + i)[start..], &v)).collect();
        let beta = dot(&v, &p).re;
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * beta).collect();
        for i in 0..len {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a.row_mut(start + i)[start..];
            for j in 0..len {
                row[j] -= (vi * w[j].conj() + wi * v[j].conj()) * 2.0;
            }
        }
        sub[k] = alpha;
        reflectors.push((start, v));
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1, n - 2)];
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut phases = vec![C64::new(1.0, 0.0); n];
    let mut off = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let r = sub[i].norm();
        off[i] = r;
        phases[i + 1] = if r > 0.0 { phases[i] * (sub[i] / r) } else { phases[i] };
    }
    Tridiagonal { diag, off, phases, reflectors }
}

/// Implicit QL on a real symmetric tridiagonal matrix. When `vectors` is
/// given, its rows are rotated along (row `i` ends as eigenvector `i`).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut vectors: Option<&mut [Vec<f64>]>) -> Result<()> {
    let n = d.len();
    let eps = f64::EPSILON;
    let max_iterations = 60 * n.max(1);
    let mut iterations = 0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                iterations += 1;
                if iterations > max_iterations {
                    return Err(Error::NoConvergence { dim: n, iterations });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = vectors.as_deref_mut() {
                        let (lo, hi) = v.split_at_mut(i + 1);
                        let (vi, vi1) = (&mut lo[i], &mut hi[0]);
                        for (a, b) in vi.iter_mut().zip(vi1.iter_mut()) {
                            let h = *b;
                            *b = s * *a + c * h;
                            *a = c * *a - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &DenseHermitian) -> Result<Vec<f64>> {
    let t = tridiagonalize(m.matrix());
    let (mut d, mut e) = (t.diag, t.off);
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Full eigendecomposition, eigenvalues ascending.
pub fn hermitian_eig(m: &DenseHermitian) -> Result<Eigen> {
    let n = m.dim();
    let t = tridiagonalize(m.matrix());
    let (mut d, mut e) = (t.diag, t.off);
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect();
    tridiagonal_ql(&mut d, &mut e, Some(&mut z))?;

    // Eigenvector i of A: H_0 ⋯ H_last (D z_i).
    let mut vectors: Vec<Vec<C64>> =
        z.iter().map(|zi| zi.iter().zip(&t.phases).map(|(&x, &ph)| ph * x).collect()).collect();
    for (start, v) in t.reflectors.iter().rev() {
        for x in vectors.iter_mut() {
            let s = dot(v, &x[*start..]) * 2.0;
            axpy(-s, v, &mut x[*start..]);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    Ok(Eigen {
        values: order.iter().map(|&i| d[i]).collect(),
        vectors: order.into_iter().map(|i| std::mem::take(&mut vectors[i])).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> DenseHermitian {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        DenseHermitian::new(m).unwrap()
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(3);
        m[(0, 1)] = C64::new(0.0, 1.0);
        assert!(DenseHermitian::new(m).is_err());
        assert!(DenseHermitian::new(CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn diagonal_input() {
        let m = DenseHermitian::new(CMatrix::from_real_diagonal(&[3.0, -1.0, 2.0])).unwrap();
        let e = hermitian_eig(&m).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
        assert!((e.vectors[0][1].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[2][0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        m[(1, 0)] = C64::new(1.0, 0.0);
        let e = hermitian_eig(&DenseHermitian::new(m).unwrap()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trivial_sizes() {
        let e = hermitian_eig(&DenseHermitian::new(CMatrix::zeros(0, 0)).unwrap()).unwrap();
        assert!(e.values.is_empty());
        let e = hermitian_eig(&DenseHermitian::new(CMatrix::from_real_diagonal(&[4.0])).unwrap()).unwrap();
        assert_eq!(e.values, vec![4.0]);
    }

    #[test]
    fn random_fifty() {
        let m = random_hermitian(50, 7);
        let e = hermitian_eig(&m).unwrap();
        let scale = m.matrix().frobenius_norm();
        assert!(e.reconstruct().add_scaled(m.matrix(), -1.0).frobenius_norm() <= 1e-9 * scale);
        assert!(e.max_residual(m.matrix()) <= 1e-10 * scale);
        assert!(e.orthonormality_defect() <= 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let only = hermitian_eigenvalues(&m).unwrap();
        for (a, b) in only.iter().zip(&e.values) {
            assert!((a - b).abs() < 1e-12);
        }
        // trace is preserved
        let tr: f64 = e.values.iter().sum();
        assert!((tr - m.trace()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_projector() {
        // Rank-3 projector with a repeated eigenvalue and complex entries.
        let m = random_hermitian(12, 3);
        let basis = hermitian_eig(&m).unwrap().vectors;
        let mut p = CMatrix::zeros(12, 12);
        for v in &basis[..3] {
            p.add_outer(1.0, v, v);
        }
        let p = DenseHermitian::new(p).unwrap();
        let e = hermitian_eig(&p).unwrap();
        assert!(e.values[..9].iter().all(|v| v.abs() < 1e-13));
        assert!(e.values[9..].iter().all(|v| (v - 1.0).abs() < 1e-13));
        assert!(e.max_residual(p.matrix()) < 1e-12);
    }

    #[test]
    fn kron_and_products() {
        let a = random_hermitian(3, 1);
        let b = random_hermitian(2, 2);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        assert!((k.trace() - a.trace() * b.trace()).abs() < 1e-13);
        let ea = hermitian_eigenvalues(&a).unwrap();
        let eb = hermitian_eigenvalues(&b).unwrap();
        let mut prod: Vec<f64> = ea.iter().flat_map(|x| eb.iter().map(move |y| x * y)).collect();
        prod.sort_by(f64::total_cmp);
        for (x, y) in prod.iter().zip(hermitian_eigenvalues(&k).unwrap()) {
            assert!((x - y).abs() < 1e-13);
        }
        let sq = a.matrix().matmul(a.matrix());
        assert!((a.matrix().trace_product(a.matrix()) - sq.trace()).norm() < 1e-13);
    }
}
