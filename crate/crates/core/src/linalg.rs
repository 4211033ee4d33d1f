//! Dense complex matrices and self-contained Hermitian eigensolvers.
//!
//! Two eigensolvers are provided:
//!
//! - [`EigenMethod::Jacobi`]: cyclic complex Jacobi rotations. Each rotation
//!   first removes the phase of `a_pq`, then applies the real symmetric
//!   rotation that annihilates it.
//! - [`EigenMethod::Tridiagonal`]: Householder reduction to a real
//!   tridiagonal matrix followed by implicit QL with Wilkinson-style shifts.
//!   Roughly thirty times faster than Jacobi at dimension 441.
//!
//! [`singular_values`] is a one-sided (Hestenes) Jacobi SVD; it never forms
//! `A†A` and so keeps small singular values accurate.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm at which Jacobi stops, relative to `‖A‖_F`.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
const QL_MAX_ITER: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::default(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: (rows, cols), got: (data.len(), 1) });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::default() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A − A†|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    Jacobi,
    #[default]
    Tridiagonal,
}

/// Eigenvalues in ascending order; eigenvectors (if requested) as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Option<CMatrix>,
    /// Jacobi sweeps or total QL iterations.
    pub iterations: usize,
}

impl HermitianEigen {
    /// `V Λ V†`, or `None` without eigenvectors.
    pub fn reconstruct(&self) -> Option<CMatrix> {
        let v = self.vectors.as_ref()?;
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| v[(i, j)] * self.values[j]);
        Some(scaled.matmul(&v.adjoint()))
    }
}

/// Eigen-decomposition of a Hermitian matrix. Only the lower triangle and
/// diagonal are trusted by the tridiagonal path; Jacobi reads the whole matrix.
pub fn eigh(a: &CMatrix, method: EigenMethod, want_vectors: bool) -> Result<HermitianEigen> {
    assert_eq!(a.rows, a.cols, "eigh needs a square matrix");
    let mut eig = match method {
        EigenMethod::Jacobi => jacobi(a, want_vectors)?,
        EigenMethod::Tridiagonal => tridiagonal_ql(a, want_vectors)?,
    };
    sort_ascending(&mut eig);
    Ok(eig)
}

fn sort_ascending(eig: &mut HermitianEigen) {
    let n = eig.values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.values[i].total_cmp(&eig.values[j]));
    eig.values = order.iter().map(|&i| eig.values[i]).collect();
    if let Some(v) = &eig.vectors {
        eig.vectors = Some(CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    }
}

fn off_diagonal_norm(m: &[Complex64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn jacobi(a: &CMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    let n = a.rows;
    let mut m = a.data.clone();
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let skip_below = 1e-3 * JACOBI_TOL * scale / n.max(1) as f64;

    for sweep in 0..=JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&m, n);
        if off <= JACOBI_TOL * scale {
            let values = (0..n).map(|i| m[i * n + i].re).collect();
            return Ok(HermitianEigen { values, vectors: v, iterations: sweep });
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { iterations: sweep, off_norm: off });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let g = apq.norm();
                if g <= skip_below {
                    continue;
                }
                let phase = (apq / g).conj();
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[k * n + p];
                    let akq = m[k * n + q] * phase;
                    let new_kp = akp * c - akq * s;
                    let new_kq = akp * s + akq * c;
                    m[k * n + p] = new_kp;
                    m[p * n + k] = new_kp.conj();
                    m[k * n + q] = new_kq;
                    m[q * n + k] = new_kq.conj();
                }
                m[p * n + p] = Complex64::new(app - t * g, 0.0);
                m[q * n + q] = Complex64::new(aqq + t * g, 0.0);
                m[p * n + q] = Complex64::default();
                m[q * n + p] = Complex64::default();

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)] * phase;
                        v[(k, p)] = vkp * c - vkq * s;
                        v[(k, q)] = vkp * s + vkq * c;
                    }
                }
            }
        }
    }
    unreachable!("loop returns on the final sweep")
}

/// Householder tridiagonalization (`Q† A Q = T`, `T` real) then implicit QL.
fn tridiagonal_ql(a: &CMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    let n = a.rows;
    if n == 0 {
        return Ok(HermitianEigen { values: Vec::new(), vectors: want_vectors.then(|| CMatrix::zeros(0, 0)), iterations: 0 });
    }
    // Hermitian copy built from the lower triangle.
    let mut w = CMatrix::from_fn(n, n, |i, j| if i >= j { a[(i, j)] } else { a[(j, i)].conj() });
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut taus = vec![Complex64::default(); n.saturating_sub(1)];
    let mut y = vec![Complex64::default(); n];

    for k in 0..n.saturating_sub(1) {
        diag[k] = w[(k, k)].re;
        let alpha = w[(k + 1, k)];
        let xnorm = ((k + 2)..n).map(|i| w[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 && alpha.im == 0.0 {
            off[k] = alpha.re;
            continue;
        }
        let beta = -(alpha.norm().hypot(xnorm)).copysign(alpha.re);
        let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
        let scal = Complex64::new(1.0, 0.0) / (alpha - beta);
        for i in (k + 2)..n {
            w[(i, k)] *= scal;
        }
        w[(k + 1, k)] = Complex64::new(1.0, 0.0);
        off[k] = beta;
        taus[k] = tau;

        // trailing block B = w[k+1.., k+1..]; v = w[k+1.., k]
        let lo = k + 1;
        for i in lo..n {
            let mut acc = Complex64::default();
            for j in lo..n {
                acc += w[(i, j)] * w[(j, k)];
            }
            y[i] = acc * tau;
        }
        let mut wv = Complex64::default();
        for i in lo..n {
            wv += y[i].conj() * w[(i, k)];
        }
        let shift = tau * wv * -0.5;
        for i in lo..n {
            y[i] += shift * w[(i, k)];
        }
        for i in lo..n {
            let vi = w[(i, k)];
            let yi = y[i];
            for j in lo..n {
                let vj = w[(j, k)];
                let update = vi * y[j].conj() + yi * vj.conj();
                w[(i, j)] -= update;
            }
        }
        w[(k + 1, k)] = Complex64::new(beta, 0.0);
    }
    diag[n - 1] = w[(n - 1, n - 1)].re;
    off[n - 1] = 0.0;

    let mut z = if want_vectors {
        // Q = H(0) H(1) … H(n−2), accumulated backwards.
        let mut q = CMatrix::identity(n);
        for k in (0..n.saturating_sub(1)).rev() {
            let tau = taus[k];
            if tau == Complex64::default() {
                continue;
            }
            let lo = k + 1;
            let v = |i: usize| if i == lo { Complex64::new(1.0, 0.0) } else { w[(i, k)] };
            for col in lo..n {
                let mut dot = Complex64::default();
                for i in lo..n {
                    dot += v(i).conj() * q[(i, col)];
                }
                let scaled = dot * tau;
                for i in lo..n {
                    q[(i, col)] -= v(i) * scaled;
                }
            }
        }
        Some(q)
    } else {
        None
    };

    let iterations = implicit_ql(&mut diag, &mut off, z.as_mut())?;
    Ok(HermitianEigen { values: diag, vectors: z, iterations })
}

/// Implicit QL on a real symmetric tridiagonal matrix (`d` diagonal, `e[i]`
/// coupling `i` and `i+1`). Rotations are applied to the columns of `z`.
fn implicit_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut CMatrix>) -> Result<usize> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    let mut total = 0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                total += 1;
                if iter > QL_MAX_ITER {
                    return Err(Error::EigenNoConvergence { iterations: total, off_norm: e[l].abs() });
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
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
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
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zk1 = z[(k, i + 1)];
                            let zk = z[(k, i)];
                            z[(k, i + 1)] = zk * s + zk1 * c;
                            z[(k, i)] = zk * c - zk1 * s;
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
    Ok(total)
}

/// Singular values (descending) by one-sided Jacobi on the columns of `a`.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    if a.cols > a.rows {
        return singular_values(&a.adjoint());
    }
    let (rows, cols) = (a.rows, a.cols);
    // columns this small relative to ‖A‖ are round-off and left alone
    let floor = (f64::EPSILON * a.frobenius_norm()).powi(2);
    let mut columns: Vec<Vec<Complex64>> = (0..cols).map(|j| (0..rows).map(|i| a[(i, j)]).collect()).collect();
    const TOL: f64 = 1e-15;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { iterations: sweeps, off_norm: f64::NAN });
        }
        sweeps += 1;
        converged = true;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha: f64 = columns[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = columns[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = columns[i].iter().zip(&columns[j]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= TOL * (alpha * beta).sqrt() || alpha.min(beta) <= floor {
                    continue;
                }
                converged = false;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 { 1.0 } else { zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = columns.split_at_mut(j);
                for (x, y) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let yr = *y * phase;
                    let xi = *x;
                    *x = xi * c - yr * s;
                    *y = xi * s + yr * c;
                }
            }
        }
    }
    let mut sv: Vec<f64> = columns.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Reproducible random Hermitian matrix with entries in the unit box.
pub fn random_hermitian(n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(2.0 * rng.random::<f64>() - 1.0, 0.0);
        for j in 0..i {
            let z = Complex64::new(2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_analytic() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let m = CMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]).unwrap();
        for method in [EigenMethod::Jacobi, EigenMethod::Tridiagonal] {
            let eig = eigh(&m, method, true).unwrap();
            assert_abs_diff_eq!(eig.values[0], 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(eig.values[1], 2.0, epsilon = 1e-14);
            assert!(eig.reconstruct().unwrap().max_abs_diff(&m) < 1e-14);
        }
    }

    #[test]
    fn diagonal_and_trivial_sizes() {
        let d = CMatrix::from_fn(3, 3, |i, j| if i == j { c(3.0 - i as f64, 0.0) } else { c(0.0, 0.0) });
        for method in [EigenMethod::Jacobi, EigenMethod::Tridiagonal] {
            assert_eq!(eigh(&d, method, false).unwrap().values, vec![1.0, 2.0, 3.0]);
            let one = CMatrix::from_fn(1, 1, |_, _| c(-4.0, 0.0));
            assert_eq!(eigh(&one, method, true).unwrap().values, vec![-4.0]);
        }
        assert!(eigh(&CMatrix::zeros(0, 0), EigenMethod::Tridiagonal, true).unwrap().values.is_empty());
    }

    #[test]
    fn solvers_agree_and_reconstruct() {
        for (n, seed) in [(5, 1), (17, 2), (40, 3)] {
            let m = random_hermitian(n, seed);
            let jac = eigh(&m, EigenMethod::Jacobi, true).unwrap();
            let tri = eigh(&m, EigenMethod::Tridiagonal, true).unwrap();
            for (a, b) in jac.values.iter().zip(&tri.values) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-11);
            }
            assert!(jac.reconstruct().unwrap().max_abs_diff(&m) < 1e-10);
            assert!(tri.reconstruct().unwrap().max_abs_diff(&m) < 1e-10);
            let v = tri.vectors.unwrap();
            assert!(v.adjoint().matmul(&v).max_abs_diff(&CMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // rank-one projector: eigenvalues {0, …, 0, 1}
        let psi: Vec<Complex64> = (0..6).map(|k| Complex64::from_polar(1.0 / 6f64.sqrt(), k as f64)).collect();
        let m = CMatrix::from_fn(6, 6, |i, j| psi[i] * psi[j].conj());
        for method in [EigenMethod::Jacobi, EigenMethod::Tridiagonal] {
            let eig = eigh(&m, method, true).unwrap();
            assert_abs_diff_eq!(eig.values[5], 1.0, epsilon = 1e-14);
            assert!(eig.values[..5].iter().all(|v| v.abs() < 1e-14));
            assert!(eig.reconstruct().unwrap().max_abs_diff(&m) < 1e-14);
        }
    }

    #[test]
    fn singular_values_match_eigenvalues_of_gram() {
        let a = CMatrix::from_fn(4, 3, |i, j| c((i + 2 * j) as f64 * 0.3 - 0.7, (i * j) as f64 * 0.1));
        let sv = singular_values(&a).unwrap();
        let gram = a.adjoint().matmul(&a);
        let eig = eigh(&gram, EigenMethod::Jacobi, false).unwrap();
        for (s, l) in sv.iter().zip(eig.values.iter().rev()) {
            assert_abs_diff_eq!(s * s, *l, epsilon = 1e-12);
        }
        // a rank-one matrix keeps exactly one nonzero singular value
        let r = CMatrix::from_fn(3, 3, |i, j| c((i + 1) as f64 * (j + 1) as f64, 0.0));
        let sv = singular_values(&r).unwrap();
        assert_abs_diff_eq!(sv[0], 14.0, epsilon = 1e-12);
        assert!(sv[1] < 1e-12 && sv[2] < 1e-12);
    }

    #[test]
    fn matrix_helpers() {
        let m = random_hermitian(4, 9);
        assert!(m.hermiticity_defect() < 1e-16);
        assert_eq!(random_hermitian(4, 9), m);
        let id = CMatrix::identity(4);
        assert_eq!(id.matmul(&m), m);
        assert_eq!(id.trace(), c(4.0, 0.0));
        assert!(CMatrix::from_row_major(2, 2, vec![c(0.0, 0.0); 3]).is_err());
    }
}
