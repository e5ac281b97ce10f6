//! Cyclic Jacobi eigendecomposition for complex Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix: ascending `values`, matching orthonormal
/// columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> Eigen<T> {
    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.vectors.column(k)
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.values.len();
        let v = &self.vectors;
        let fl: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        Matrix::from_fn(n, n, |i, j| {
            (0..n).fold(C::zero(), |acc, k| acc + v[(i, k)] * v[(j, k)].conj() * fl[k])
        })
    }
}

/// Hermitian eigendecomposition.
///
/// Input must be Hermitian within `1e-10` relative to its largest entry; the
/// Hermitian part is decomposed. Eigenvectors are phase-fixed so their first
/// non-negligible component is real and positive.
pub fn eig_hermitian<T: Real>(h: &Matrix<T>) -> Result<Eigen<T>> {
    let n = h.require_square()?;
    let scale = T::one().max(h.max_abs());
    let deviation = h.hermitian_deviation();
    if deviation > T::floor_tol(1e-10, 64.0) * scale {
        return Err(Error::NotHermitian {
            deviation: deviation.as_f64(),
        });
    }
    let mut a = h.hermitian_part();
    let mut v = Matrix::<T>::identity(n);
    let tol = T::floor_tol(1e-12, 8.0) * scale.max(a.frobenius_norm());

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Matrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    fix_phases(&mut vectors);
    Ok(Eigen { values, vectors })
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation zeroing `a[p][q]`; `a <- U^dagger a U`, `v <- v U`.
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= T::min_positive_value() {
        return;
    }
    let n = a.rows();
    let phase = apq / r; // e^{i alpha}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (r + r);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;

    // U = diag(1, e^{-i alpha}) . [[c, s], [-s, c]] restricted to (p, q).
    let ph = phase.conj();
    let u_pp = Complex::new(cs, T::zero());
    let u_pq = Complex::new(sn, T::zero());
    let u_qp = ph * (-sn);
    let u_qq = ph * cs;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = C::zero();
    a[(q, p)] = C::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

fn fix_phases<T: Real>(v: &mut Matrix<T>) {
    let n = v.rows();
    let cutoff = T::floor_tol(1e-10, 1024.0);
    for k in 0..n {
        let Some(lead) = (0..n).map(|i| v[(i, k)]).find(|z| z.norm() > cutoff) else {
            continue;
        };
        let rot = lead.conj() / lead.norm();
        for i in 0..n {
            v[(i, k)] = v[(i, k)] * rot;
        }
        // first component exactly real after rotation
        if let Some(i) = (0..n).find(|&i| v[(i, k)].norm() > cutoff) {
            v[(i, k)] = Complex::new(v[(i, k)].norm(), T::zero());
        }
    }
}
