//! Robustness of entanglement under the PPT relaxation, and the optimal
//! entanglement witness read off the dual certificate.
//!
//! The robustness `R(sigma)` is the least `s >= 0` such that
//! `(sigma + s pi) / (1 + s)` is separable for some separable `pi`. With
//! separability replaced by positivity of the partial transpose it becomes
//!
//! ```text
//! minimize tr(P)  s.t.  P >= 0,  P^TB >= 0,  (sigma + P)^TB >= 0
//! ```
//!
//! with `s = tr(P)` and `pi = P / tr(P)`. The dual matrix `Z` of the last
//! constraint yields the witness `W = Z^TB`; the dual constraints give
//! `I - W = Z1 + Z2^TB`, hence `tr(W pi) <= 1` on every PPT state, and
//! `tr(W sigma) = -R(sigma)` at optimality.

use num_complex::Complex;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, partial_transpose, trace_inner, BipartiteSpace, Matrix, Subsystem};
use crate::scalar::{re, Real};
use crate::sdp::{self, Block, Problem, Solution, SolverOptions, Status};
use crate::seesaw::seesaw_max_product;
use crate::states::{maximally_mixed, Density};

/// Robustness values below this are reported as "no entanglement detected".
pub const ZERO_ROBUSTNESS: f64 = 1e-7;

/// Restarts used when spot-checking a witness by see-saw.
pub const WITNESS_RESTARTS: usize = 100;

/// How the PPT relaxation relates to the true separable set in this dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relaxation {
    /// PPT equals separable (`dA * dB <= 6`).
    PptExact,
    /// PPT strictly contains the separable set; the value is a lower bound.
    PptLowerBound,
}

impl Relaxation {
    pub fn for_space(space: BipartiteSpace) -> Self {
        if space.total() <= 6 {
            Relaxation::PptExact
        } else {
            Relaxation::PptLowerBound
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Relaxation::PptExact => "ppt-exact",
            Relaxation::PptLowerBound => "ppt-lower-bound",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RobustnessResult<T: Real> {
    pub value: T,
    pub optimal_noise: Density<T>,
    pub relaxation: Relaxation,
    pub solver_gap: T,
    pub status: Status,
    /// Full primal-dual certificate; blocks are `P`, `P^TB`, `(sigma + P)^TB`.
    pub certificate: Solution<T>,
}

impl<T: Real> RobustnessResult<T> {
    pub fn is_zero(&self) -> bool {
        self.value <= T::lit(ZERO_ROBUSTNESS)
    }

    /// `(sigma + s pi) / (1 + s)` for the optimal noise.
    pub fn washed_out(&self, sigma: &Density<T>) -> Density<T> {
        let s = self.value;
        let m = &sigma.matrix().scale(T::one() / (T::one() + s))
            + &self.optimal_noise.matrix().scale(s / (T::one() + s));
        Density::from_parts(m, sigma.space())
    }
}

#[derive(Clone, Debug)]
pub struct Witness<T: Real> {
    pub operator: Matrix<T>,
    /// Best see-saw value of `tr(W pi)` over product states.
    pub normalization_bound: T,
    /// `tr(W sigma)`.
    pub value_on_target: T,
}

/// Orthogonal basis of `n x n` Hermitian matrices: `E_kk`, then
/// `E_kl + E_lk` and `i(E_kl - E_lk)` for `k < l`.
pub(crate) fn hermitian_basis<T: Real>(n: usize) -> Vec<Matrix<T>> {
    let mut basis = Vec::with_capacity(n * n);
    for k in 0..n {
        let mut e = Matrix::zeros(n, n);
        e[(k, k)] = re(T::one());
        basis.push(e);
    }
    for k in 0..n {
        for l in k + 1..n {
            let mut s = Matrix::zeros(n, n);
            s[(k, l)] = re(T::one());
            s[(l, k)] = re(T::one());
            basis.push(s);
            let mut a = Matrix::zeros(n, n);
            a[(k, l)] = Complex::new(T::zero(), T::one());
            a[(l, k)] = Complex::new(T::zero(), -T::one());
            basis.push(a);
        }
    }
    basis
}

/// Hermitian matrix with coordinates `y` in [`hermitian_basis`].
fn from_coordinates<T: Real>(n: usize, y: &[T]) -> Matrix<T> {
    let mut m = Matrix::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = re(y[k]);
    }
    let mut idx = n;
    for k in 0..n {
        for l in k + 1..n {
            let z = Complex::new(y[idx], y[idx + 1]);
            m[(k, l)] = z;
            m[(l, k)] = z.conj();
            idx += 2;
        }
    }
    m
}

/// Builds the PPT robustness program for `sigma`.
pub fn robustness_problem<T: Real>(sigma: &Density<T>) -> Problem<T> {
    let space = sigma.space();
    let n = space.total();
    let basis = hermitian_basis::<T>(n);
    let pt = |m: &Matrix<T>| partial_transpose(m, space, Subsystem::B).expect("space matches");
    let basis_pt: Vec<Matrix<T>> = basis.iter().map(pt).collect();
    let objective: Vec<T> = (0..n * n).map(|i| if i < n { T::one() } else { T::zero() }).collect();
    let zero = Matrix::zeros(n, n);
    let blocks = vec![
        Block::new(zero.clone(), basis).expect("Hermitian basis"),
        Block::new(zero, basis_pt.clone()).expect("Hermitian basis"),
        Block::new(sigma.partial_transpose().hermitian_part(), basis_pt).expect("Hermitian basis"),
    ];
    Problem::new(objective, blocks).expect("consistent block sizes")
}

/// Robustness of entanglement with the separable set relaxed to PPT states.
pub fn robustness_ppt<T: Real>(sigma: &Density<T>) -> Result<RobustnessResult<T>> {
    robustness_ppt_with(sigma, &SolverOptions::default())
}

pub fn robustness_ppt_with<T: Real>(
    sigma: &Density<T>,
    opts: &SolverOptions<T>,
) -> Result<RobustnessResult<T>> {
    let space = sigma.space();
    let n = space.total();
    let problem = robustness_problem(sigma);
    let sol = sdp::solve_with(&problem, opts);
    if sol.status != Status::Optimal {
        return Err(Error::Solver(format!(
            "robustness SDP ended with {:?} after {} iterations (gap {:e}, residuals {:e}/{:e})",
            sol.status,
            sol.iterations,
            sol.gap.as_f64(),
            sol.primal_infeasibility.as_f64(),
            sol.dual_infeasibility.as_f64()
        )));
    }
    let value = sol.primal_value.max(T::zero());
    let optimal_noise = if value <= T::lit(ZERO_ROBUSTNESS) {
        maximally_mixed(space)
    } else {
        let p = from_coordinates(n, &sol.y);
        Density::from_parts(p.scale(T::one() / p.trace_re()).hermitian_part(), space)
    };
    Ok(RobustnessResult {
        value,
        optimal_noise,
        relaxation: Relaxation::for_space(space),
        solver_gap: sol.gap,
        status: sol.status,
        certificate: sol,
    })
}

/// Outcome of [`relative_robustness`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelativeRobustness<T: Real> {
    Finite(T),
    /// No finite amount of the given noise makes the mixture PPT.
    Unbounded,
}

impl<T: Real> RelativeRobustness<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            RelativeRobustness::Finite(s) => Some(s),
            RelativeRobustness::Unbounded => None,
        }
    }
}

/// Least `s >= 0` with `(sigma + s pi)^TB >= 0`.
pub fn relative_robustness<T: Real>(sigma: &Density<T>, pi: &Density<T>) -> Result<RelativeRobustness<T>> {
    if sigma.space() != pi.space() {
        return Err(Error::DimensionMismatch {
            context: "relative_robustness",
            expected: sigma.dim(),
            found: pi.dim(),
        });
    }
    let a = sigma.partial_transpose();
    let b = pi.partial_transpose();
    let psd_tol = T::floor_tol(1e-12, 64.0);
    let min_eig = |s: T| -> T {
        eig_hermitian(&(&a + &b.scale(s)))
            .expect("Hermitian")
            .min()
    };
    if min_eig(T::zero()) >= -psd_tol {
        return Ok(RelativeRobustness::Finite(T::zero()));
    }

    // Generalized eigenproblem A v = -s B v when B is positive definite.
    let eb = eig_hermitian(&b)?;
    if eb.min() > T::floor_tol(1e-9, 1024.0) {
        let b_inv_sqrt = eb.reconstruct_with(|l| T::one() / l.sqrt());
        let m = b_inv_sqrt.matmul(&a).matmul(&b_inv_sqrt).scale(-T::one());
        let s = eig_hermitian(&m.hermitian_part())?.max();
        return Ok(RelativeRobustness::Finite(s.max(T::zero())));
    }

    // Singular or indefinite B: lambda_min(A + sB) is concave in s, so the
    // feasible set is an interval; locate its left end.
    let (mut lo, mut hi) = (T::zero(), T::lit(1e12));
    let phi = T::lit(0.618_033_988_749_894_9);
    for _ in 0..200 {
        let m1 = hi - (hi - lo) * phi;
        let m2 = lo + (hi - lo) * phi;
        if min_eig(m1) < min_eig(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
        if hi - lo <= T::epsilon() * hi.max(T::one()) {
            break;
        }
    }
    let peak = (lo + hi) * T::lit(0.5);
    if min_eig(peak) < -psd_tol {
        return Ok(RelativeRobustness::Unbounded);
    }
    let (mut lo, mut hi) = (T::zero(), peak);
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if min_eig(mid) >= T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= T::epsilon() * hi.max(T::one()) {
            break;
        }
    }
    Ok(RelativeRobustness::Finite(hi))
}

/// Optimal witness from the dual certificate of [`robustness_ppt`].
pub fn witness_from_dual<T: Real>(sigma: &Density<T>, result: &RobustnessResult<T>) -> Result<Witness<T>> {
    witness_from_dual_with(sigma, result, WITNESS_RESTARTS, 0)
}

pub fn witness_from_dual_with<T: Real>(
    sigma: &Density<T>,
    result: &RobustnessResult<T>,
    restarts: usize,
    seed: u64,
) -> Result<Witness<T>> {
    let space = sigma.space();
    let n = space.total();
    if result.status != Status::Optimal {
        return Err(Error::Solver(format!(
            "witness requested from a {:?} certificate",
            result.status
        )));
    }
    if result.is_zero() {
        return Ok(Witness {
            operator: Matrix::zeros(n, n),
            normalization_bound: T::zero(),
            value_on_target: T::zero(),
        });
    }
    let z = &result.certificate.dual_matrices[2];
    let operator = partial_transpose(z, space, Subsystem::B)?.hermitian_part();
    let value_on_target = trace_inner(&operator, sigma.matrix())?.re;
    let normalization_bound = seesaw_max_product(&operator, space, restarts, seed)?.value;
    Ok(Witness {
        operator,
        normalization_bound,
        value_on_target,
    })
}

/// `tr(W rho)` for a witness operator.
pub fn witness_value<T: Real>(w: &Witness<T>, rho: &Density<T>) -> T {
    trace_inner(&w.operator, rho.matrix()).map(|z| z.re).unwrap_or_else(|_| T::nan())
}

#[cfg(test)]
mod tests;
