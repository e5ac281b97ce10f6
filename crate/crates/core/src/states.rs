//! Density matrices and the named state families used throughout the crate.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, haar_from_rng, kron, max_entangled, partial_transpose, seeded_rng,
    standard_complex_gaussian, BipartiteSpace, Matrix, Subsystem,
};
use crate::scalar::{re, Real, C};

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;

/// Hermitian, unit-trace, positive semidefinite operator on a bipartite space.
#[derive(Clone, Debug, PartialEq)]
pub struct Density<T: Real> {
    matrix: Matrix<T>,
    space: BipartiteSpace,
}

impl<T: Real> Density<T> {
    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_parts(matrix: Matrix<T>, space: BipartiteSpace) -> Self {
        debug_assert_eq!(matrix.rows(), space.total());
        Self { matrix, space }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn space(&self) -> BipartiteSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.total()
    }

    /// Partial transpose on the B factor.
    pub fn partial_transpose(&self) -> Matrix<T> {
        partial_transpose(&self.matrix, self.space, Subsystem::B).expect("space checked")
    }

    pub fn min_pt_eigenvalue(&self) -> T {
        eig_hermitian(&self.partial_transpose())
            .expect("partial transpose of a Hermitian matrix is Hermitian")
            .min()
    }

    pub fn is_ppt(&self, tol: T) -> bool {
        self.min_pt_eigenvalue() >= -tol
    }

    pub fn purity(&self) -> T {
        crate::linalg::trace_inner(&self.matrix, &self.matrix)
            .expect("same shape")
            .re
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Self, lambda: T) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                context: "mix",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let m = &self.matrix.scale(lambda) + &other.matrix.scale(T::one() - lambda);
        Ok(Self::from_parts(m, self.space))
    }

    /// Tensor product with the factors interleaved as `(A_self A_other) | (B_self B_other)`.
    pub fn kron_bipartite(&self, other: &Self) -> Self {
        let (a1, b1) = (self.space.dim_a, self.space.dim_b);
        let (a2, b2) = (other.space.dim_a, other.space.dim_b);
        let raw = kron(&self.matrix, &other.matrix);
        let m = crate::linalg::permute_subsystems(&raw, &[a1, b1, a2, b2], &[0, 2, 1, 3])
            .expect("consistent dims");
        Self::from_parts(m, BipartiteSpace { dim_a: a1 * a2, dim_b: b1 * b2 })
    }
}

/// Checks every density-matrix invariant and returns the typed state.
pub fn validate_density<T: Real>(m: Matrix<T>, space: BipartiteSpace) -> Result<Density<T>> {
    space.check(&m, "validate_density")?;
    let deviation = m.hermitian_deviation();
    if deviation > T::floor_tol(HERMITIAN_TOL, 64.0) {
        return Err(Error::NotHermitian {
            deviation: deviation.as_f64(),
        });
    }
    let m = m.hermitian_part();
    let trace = m.trace_re();
    if (trace - T::one()).abs() > T::floor_tol(TRACE_TOL, 64.0) {
        return Err(Error::TraceNotOne {
            trace: trace.as_f64(),
        });
    }
    let min = eig_hermitian(&m)?.min();
    if min < -T::floor_tol(PSD_TOL, 256.0) {
        return Err(Error::NegativeEigenvalue {
            min_eigenvalue: min.as_f64(),
        });
    }
    Ok(Density::from_parts(m, space))
}

/// Four-party split `A2 A3 | B2 B3` with `dim A2 = dim B2 = m`, `dim A3 = dim B3 = d`.
///
/// Operators are stored with factor order `A2, A3, B2, B3`, so the A|B
/// bipartition is `(m*d) | (m*d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FourPartySpace {
    pub m: usize,
    pub d: usize,
}

impl FourPartySpace {
    pub fn new(m: usize, d: usize) -> Result<Self> {
        if m == 0 || d == 0 {
            return Err(Error::OutOfRange {
                name: "four-party dimension",
                value: 0.0,
                allowed: ">= 1",
            });
        }
        Ok(Self { m, d })
    }

    pub fn bipartite(&self) -> BipartiteSpace {
        BipartiteSpace {
            dim_a: self.m * self.d,
            dim_b: self.m * self.d,
        }
    }

    pub fn total(&self) -> usize {
        (self.m * self.d).pow(2)
    }

    /// Factor dimensions in storage order `A2, A3, B2, B3`.
    pub fn factor_dims(&self) -> [usize; 4] {
        [self.m, self.d, self.m, self.d]
    }

    /// Embeds `x (x) z` with `x` on `A2B2` and `z` on `A3B3` into storage order.
    pub fn embed_pair<T: Real>(&self, x: &Matrix<T>, z: &Matrix<T>) -> Result<Matrix<T>> {
        let raw = kron(x, z); // A2 B2 A3 B3
        crate::linalg::permute_subsystems(&raw, &[self.m, self.m, self.d, self.d], &[0, 2, 1, 3])
    }

    /// Product `alpha (x) beta` of a state on `A2A3` and one on `B2B3`.
    pub fn local_product<T: Real>(&self, alpha: &Matrix<T>, beta: &Matrix<T>) -> Result<Density<T>> {
        let local = self.m * self.d;
        for x in [alpha, beta] {
            if x.rows() != local || !x.is_square() {
                return Err(Error::DimensionMismatch {
                    context: "local_product",
                    expected: local,
                    found: x.rows(),
                });
            }
        }
        validate_density(kron(alpha, beta), self.bipartite())
    }
}

/// `F phi_d + (1 - F)(I - phi_d)/(d^2 - 1)`.
pub fn isotropic<T: Real>(d: usize, fidelity: T) -> Result<Density<T>> {
    if !(fidelity >= T::zero() && fidelity <= T::one()) {
        return Err(Error::OutOfRange {
            name: "fidelity",
            value: fidelity.as_f64(),
            allowed: "[0, 1]",
        });
    }
    if d == 0 || (d == 1 && fidelity != T::one()) {
        return Err(Error::OutOfRange {
            name: "isotropic dimension",
            value: d as f64,
            allowed: "d >= 2, or d = 1 with fidelity 1",
        });
    }
    let space = BipartiteSpace::symmetric(d)?;
    let phi = max_entangled::<T>(d).projector();
    if d == 1 {
        return Ok(Density::from_parts(phi, space));
    }
    let n = d * d;
    let noise = (T::one() - fidelity) / T::from_usize_lossy(n - 1);
    let m = Matrix::from_fn(n, n, |i, j| {
        let id = if i == j { noise } else { T::zero() };
        phi[(i, j)] * (fidelity - noise) + re(id)
    });
    Ok(Density::from_parts(m, space))
}

/// Projector onto `sum_i a_i |ii>`.
pub fn pure_from_schmidt<T: Real>(amplitudes: &[T]) -> Result<Density<T>> {
    let k = amplitudes.len();
    if k == 0 {
        return Err(Error::OutOfRange {
            name: "Schmidt rank",
            value: 0.0,
            allowed: ">= 1",
        });
    }
    if let Some(&a) = amplitudes.iter().find(|a| !(**a >= T::zero())) {
        return Err(Error::OutOfRange {
            name: "Schmidt amplitude",
            value: a.as_f64(),
            allowed: ">= 0",
        });
    }
    let norm_sq: T = amplitudes.iter().map(|&a| a * a).sum();
    if (norm_sq - T::one()).abs() > T::floor_tol(1e-12, 64.0) {
        return Err(Error::Unnormalized {
            norm_sq: norm_sq.as_f64(),
        });
    }
    let mut v = vec![C::<T>::zero(); k * k];
    for (i, &a) in amplitudes.iter().enumerate() {
        v[i * k + i] = re(a);
    }
    Ok(Density::from_parts(Matrix::outer(&v), BipartiteSpace::symmetric(k)?))
}

/// Hilbert-Schmidt (Ginibre) random mixed state `G G^dagger / tr(G G^dagger)`.
pub fn random_density<T: Real>(space: BipartiteSpace, seed: u64) -> Density<T> {
    let n = space.total();
    let mut rng = seeded_rng(seed, 0);
    let g = Matrix::<T>::from_fn(n, n, |_, _| standard_complex_gaussian(&mut rng));
    let ggd = g.matmul(&g.adjoint());
    let tr = ggd.trace_re();
    Density::from_parts(ggd.scale(T::one() / tr).hermitian_part(), space)
}

/// `|a><a| (x) |b><b|` with Haar-random `a`, `b`.
pub fn random_product<T: Real>(space: BipartiteSpace, seed: u64) -> Density<T> {
    let mut rng = seeded_rng(seed, 0);
    let a = haar_from_rng::<T>(space.dim_a, &mut rng);
    let b = haar_from_rng::<T>(space.dim_b, &mut rng);
    Density::from_parts(a.kron(&b).projector(), space)
}

/// Maximally mixed state on `space`.
pub fn maximally_mixed<T: Real>(space: BipartiteSpace) -> Density<T> {
    let n = space.total();
    Density::from_parts(Matrix::identity(n).scale(T::one() / T::from_usize_lossy(n)), space)
}
