//! Dense complex matrices for small Hilbert spaces.
//!
//! Storage is row-major. Tensor products follow one fixed convention: the
//! basis ket `|i>_A (x) |j>_B` lives at flat index `i * dim_b + j`, so the
//! first Kronecker factor indexes the coarse blocks.

mod eigen;
mod random;

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{re, Real, C};

pub use eigen::{eig_hermitian, Eigen};
pub use random::{haar_random_pure, seeded_rng, standard_complex_gaussian, Rng64};
pub(crate) use random::haar_from_rng;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Matrix<T> {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::OutOfRange {
                name: "matrix dimension",
                value: 0.0,
                allowed: ">= 1",
            });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real matrix from row-major `f64` values.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            values.iter().map(|&v| re(T::lit(v))).collect(),
        )
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = re(d);
        }
        m
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[C<T>]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C<T>> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: C<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C<T> {
        let n = self.rows.min(self.cols);
        (0..n).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Real part of the trace.
    pub fn trace_re(&self) -> T {
        self.trace().re
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entrywise deviation `|h_ij - conj(h_ji)|`.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(h + h^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * half
        })
    }

    pub fn matvec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.cols, "matvec dimension");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(C::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `<v| self |v>`.
    pub fn expectation(&self, v: &[C<T>]) -> C<T> {
        let hv = self.matvec(v);
        v.iter()
            .zip(&hv)
            .fold(C::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "elementwise dimension"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.zip_with(other, |a, b| a - b).max_abs()
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|z| -z)
    }
}

/// Factor dimensions of a bipartite space `C^dim_a (x) C^dim_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteSpace {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteSpace {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::OutOfRange {
                name: "factor dimension",
                value: 0.0,
                allowed: ">= 1",
            });
        }
        Ok(Self { dim_a, dim_b })
    }

    /// `C^d (x) C^d`.
    pub fn symmetric(d: usize) -> Result<Self> {
        Self::new(d, d)
    }

    #[inline]
    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn check<T: Real>(&self, m: &Matrix<T>, context: &'static str) -> Result<()> {
        let n = m.require_square()?;
        if n != self.total() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.total(),
                found: n,
            });
        }
        Ok(())
    }
}

/// Which tensor factor an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Kronecker product `a (x) b`.
pub fn kron<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (br, bc) = (b.rows, b.cols);
    Matrix::from_fn(a.rows * br, a.cols * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of state vectors.
pub fn kron_vec<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// Traces out `traced` and returns the operator on the remaining factor.
pub fn partial_trace<T: Real>(
    m: &Matrix<T>,
    space: BipartiteSpace,
    traced: Subsystem,
) -> Result<Matrix<T>> {
    space.check(m, "partial_trace")?;
    let (da, db) = (space.dim_a, space.dim_b);
    Ok(match traced {
        Subsystem::B => Matrix::from_fn(da, da, |i, k| {
            (0..db).fold(C::zero(), |acc, j| acc + m[(i * db + j, k * db + j)])
        }),
        Subsystem::A => Matrix::from_fn(db, db, |j, l| {
            (0..da).fold(C::zero(), |acc, i| acc + m[(i * db + j, i * db + l)])
        }),
    })
}

/// Transposes the indices of the `which` factor.
pub fn partial_transpose<T: Real>(
    m: &Matrix<T>,
    space: BipartiteSpace,
    which: Subsystem,
) -> Result<Matrix<T>> {
    space.check(m, "partial_transpose")?;
    let db = space.dim_b;
    let n = space.total();
    Ok(Matrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        match which {
            Subsystem::B => m[(i * db + l, k * db + j)],
            Subsystem::A => m[(k * db + j, i * db + l)],
        }
    }))
}

/// `tr(a^dagger b)`.
pub fn trace_inner<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<C<T>> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::DimensionMismatch {
            context: "trace_inner",
            expected: a.rows * a.cols,
            found: b.rows * b.cols,
        });
    }
    Ok(a.data
        .iter()
        .zip(&b.data)
        .fold(C::zero(), |acc, (x, y)| acc + x.conj() * y))
}

/// Reorders the tensor factors of a square operator on `C^dims[0] (x) C^dims[1] (x) ...`.
///
/// Output factor `k` is input factor `perm[k]`.
pub fn permute_subsystems<T: Real>(
    m: &Matrix<T>,
    dims: &[usize],
    perm: &[usize],
) -> Result<Matrix<T>> {
    let n = m.require_square()?;
    let total: usize = dims.iter().product();
    if n != total {
        return Err(Error::DimensionMismatch {
            context: "permute_subsystems",
            expected: total,
            found: n,
        });
    }
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::DimensionMismatch {
            context: "permutation length",
            expected: dims.len(),
            found: perm.len(),
        });
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let map: Vec<usize> = (0..n)
        .map(|new_flat| {
            let mut digits = vec![0usize; dims.len()];
            let mut rest = new_flat;
            for k in (0..dims.len()).rev() {
                digits[perm[k]] = rest % new_dims[k];
                rest /= new_dims[k];
            }
            digits.iter().zip(dims).fold(0, |acc, (&d, &dim)| acc * dim + d)
        })
        .collect();
    Ok(Matrix::from_fn(n, n, |r, c| m[(map[r], map[c])]))
}

/// Normalized pure state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T: Real> {
    amplitudes: Vec<C<T>>,
}

impl<T: Real> PureState<T> {
    pub fn new(amplitudes: Vec<C<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::OutOfRange {
                name: "state dimension",
                value: 0.0,
                allowed: ">= 1",
            });
        }
        let norm_sq: T = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - T::one()).abs() > T::floor_tol(1e-12, 64.0) {
            return Err(Error::Unnormalized {
                norm_sq: norm_sq.as_f64(),
            });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<C<T>>) -> Result<Self> {
        let norm: T = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) {
            return Err(Error::Unnormalized {
                norm_sq: norm.as_f64(),
            });
        }
        for z in &mut amplitudes {
            *z = *z / norm;
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis ket `|k>` of `C^dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![C::zero(); dim];
        amplitudes[k] = C::one();
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn projector(&self) -> Matrix<T> {
        Matrix::outer(&self.amplitudes)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }
}

/// `(1/sqrt d) sum_k |k,k>` on `C^d (x) C^d`.
pub fn max_entangled<T: Real>(d: usize) -> PureState<T> {
    let amp = T::one() / T::from_usize_lossy(d).sqrt();
    let mut amplitudes = vec![C::zero(); d * d];
    for k in 0..d {
        amplitudes[k * d + k] = Complex::new(amp, T::zero());
    }
    PureState { amplitudes }
}
