//! Small dense real kernels for the interior-point iteration.

use std::ops::{Index, IndexMut};

use crate::scalar::Real;

/// Square real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix<T: Real> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> RealMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, T::one())
    }

    pub fn scaled_identity(n: usize, s: T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)]) * half)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == T::zero() {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: T, other: &Self) {
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + s * b;
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `tr(self^T other)`; equals `tr(self other)` for symmetric arguments.
    pub fn dot(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a * b)
            .sum()
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, a| m.max(a.abs()))
    }

    /// Lower Cholesky factor, or `None` if not numerically positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) || !d.is_finite() {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(l)
    }

    /// Inverse of a lower-triangular matrix.
    pub fn lower_inverse(&self) -> Self {
        let n = self.n;
        let mut inv = Self::zeros(n);
        for j in 0..n {
            inv[(j, j)] = T::one() / self[(j, j)];
            for i in j + 1..n {
                let mut s = T::zero();
                for k in j..i {
                    s = s + self[(i, k)] * inv[(k, j)];
                }
                inv[(i, j)] = -s / self[(i, i)];
            }
        }
        inv
    }

    /// Inverse of a symmetric positive definite matrix.
    pub fn spd_inverse(&self) -> Option<Self> {
        let linv = self.cholesky()?.lower_inverse();
        Some(linv.transpose().matmul(&linv).symmetrized())
    }

    /// Eigenvalues of a symmetric matrix, ascending (cyclic Jacobi).
    pub fn sym_eigenvalues(&self) -> Vec<T> {
        let n = self.n;
        let mut a = self.symmetrized();
        let scale = T::one().max(a.frobenius_norm());
        let tol = T::floor_tol(1e-14, 4.0) * scale;
        for _ in 0..100 {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum::<T>()
                .sqrt();
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq.abs() <= T::min_positive_value() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (apq + apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    a[(p, q)] = T::zero();
                    a[(q, p)] = T::zero();
                }
            }
        }
        let mut ev: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        ev
    }
}

impl<T: Real> Index<(usize, usize)> for RealMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for RealMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Solves `m x = rhs` for symmetric `m`: Cholesky first, pivoted LU as fallback.
pub fn solve_symmetric<T: Real>(m: &RealMatrix<T>, rhs: &[T]) -> Option<Vec<T>> {
    if let Some(l) = m.cholesky() {
        let n = m.dim();
        let mut z = rhs.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s = s - l[(i, k)] * z[k];
            }
            z[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in i + 1..n {
                s = s - l[(k, i)] * z[k];
            }
            z[i] = s / l[(i, i)];
        }
        return Some(z);
    }
    solve_lu(m, rhs)
}

fn solve_lu<T: Real>(m: &RealMatrix<T>, rhs: &[T]) -> Option<Vec<T>> {
    let n = m.dim();
    let mut a = m.clone();
    let mut b = rhs.to_vec();
    let scale = a.max_abs();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[(i, col)]
                .abs()
                .partial_cmp(&a[(j, col)].abs())
                .expect("finite")
        })?;
        if a[(piv, col)].abs() <= T::min_positive_value() * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                let tmp = a[(col, k)];
                a[(col, k)] = a[(piv, k)];
                a[(piv, k)] = tmp;
            }
            b.swap(col, piv);
        }
        for i in col + 1..n {
            let f = a[(i, col)] / a[(col, col)];
            for k in col..n {
                a[(i, k)] = a[(i, k)] - f * a[(col, k)];
            }
            b[i] = b[i] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s = s - a[(i, k)] * x[k];
        }
        x[i] = s / a[(i, i)];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> RealMatrix<f64> {
        let b = RealMatrix::from_fn(n, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        b.transpose().matmul(&b).add(&RealMatrix::identity(n))
    }

    #[test]
    fn cholesky_and_inverse() {
        let a = spd(6);
        let l = a.cholesky().unwrap();
        assert!(l.matmul(&l.transpose()).sub(&a).max_abs() < 1e-12);
        let inv = a.spd_inverse().unwrap();
        assert!(inv.matmul(&a).sub(&RealMatrix::identity(6)).max_abs() < 1e-10);
        assert!(RealMatrix::<f64>::scaled_identity(3, -1.0).cholesky().is_none());
    }

    #[test]
    fn linear_solvers_agree() {
        let a = spd(5);
        let x = [1.0, -2.0, 0.5, 3.0, 0.0];
        let rhs: Vec<f64> = (0..5).map(|i| (0..5).map(|j| a[(i, j)] * x[j]).sum()).collect();
        for sol in [solve_symmetric(&a, &rhs).unwrap(), solve_lu(&a, &rhs).unwrap()] {
            for (s, e) in sol.iter().zip(x) {
                assert!((s - e).abs() < 1e-10);
            }
        }
        // indefinite: Cholesky fails, LU succeeds
        let ind = RealMatrix::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 });
        assert_eq!(solve_symmetric(&ind, &[2.0, 3.0]).unwrap(), vec![3.0, 2.0]);
    }

    #[test]
    fn jacobi_eigenvalues() {
        let m = RealMatrix::from_fn(3, |i, j| [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, -1.0]][i][j]);
        let ev: Vec<f64> = m.sym_eigenvalues();
        for (a, b) in ev.iter().zip([-1.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
