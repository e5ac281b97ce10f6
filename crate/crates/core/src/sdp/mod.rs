//! Dense primal-dual interior-point solver for linear matrix inequalities.
//!
//! The primal problem is
//!
//! ```text
//! minimize    c^T y
//! subject to  F0_k + sum_i y_i F_ik  >= 0      for every block k
//! ```
//!
//! with Hermitian blocks, and its dual is
//!
//! ```text
//! maximize    -sum_k tr(F0_k Z_k)
//! subject to  sum_k tr(F_ik Z_k) = c_i,   Z_k >= 0.
//! ```
//!
//! For any feasible pair the gap `c^T y + sum_k tr(F0_k Z_k)` equals
//! `sum_k tr(S_k Z_k) >= 0`, so an optimal solution with a small gap is a
//! certificate of optimality for both problems.
//!
//! Internally the iteration runs on real symmetric blocks: Hermitian blocks
//! with nonzero imaginary parts go through [`real_embedding`], and their
//! dual matrices are folded back into Hermitian form. The search direction
//! is HKM with a Mehrotra predictor-corrector step.

mod dense;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

pub use dense::RealMatrix;

const STEP_FRACTION: f64 = 0.95;
const INFEASIBILITY_BOUND: f64 = 1e8;

/// One affine constraint `F0 + sum_i y_i F_i >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Block<T: Real> {
    constant: Matrix<T>,
    coefficients: Vec<Matrix<T>>,
}

impl<T: Real> Block<T> {
    pub fn new(constant: Matrix<T>, coefficients: Vec<Matrix<T>>) -> Result<Self> {
        let n = constant.require_square()?;
        let tol = T::floor_tol(1e-10, 64.0);
        for m in std::iter::once(&constant).chain(&coefficients) {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch {
                    context: "SDP block",
                    expected: n,
                    found: m.rows(),
                });
            }
            let dev = m.hermitian_deviation();
            if dev > tol {
                return Err(Error::NotHermitian {
                    deviation: dev.as_f64(),
                });
            }
        }
        Ok(Self {
            constant,
            coefficients,
        })
    }

    pub fn dim(&self) -> usize {
        self.constant.rows()
    }

    pub fn constant(&self) -> &Matrix<T> {
        &self.constant
    }

    pub fn coefficients(&self) -> &[Matrix<T>] {
        &self.coefficients
    }

    /// `F0 + sum_i y_i F_i`.
    pub fn evaluate(&self, y: &[T]) -> Matrix<T> {
        let mut s = self.constant.clone();
        for (f, &yi) in self.coefficients.iter().zip(y) {
            if yi != T::zero() {
                s = &s + &f.scale(yi);
            }
        }
        s
    }

    fn is_real(&self) -> bool {
        std::iter::once(&self.constant)
            .chain(&self.coefficients)
            .all(|m| m.data().iter().all(|z| z.im == T::zero()))
    }
}

/// Block-structured semidefinite program in LMI form.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem<T: Real> {
    objective: Vec<T>,
    blocks: Vec<Block<T>>,
}

impl<T: Real> Problem<T> {
    pub fn new(objective: Vec<T>, blocks: Vec<Block<T>>) -> Result<Self> {
        if objective.is_empty() {
            return Err(Error::OutOfRange {
                name: "variable count",
                value: 0.0,
                allowed: ">= 1",
            });
        }
        for b in &blocks {
            if b.coefficients.len() != objective.len() {
                return Err(Error::DimensionMismatch {
                    context: "coefficients per block",
                    expected: objective.len(),
                    found: b.coefficients.len(),
                });
            }
        }
        Ok(Self { objective, blocks })
    }

    pub fn variable_dim(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn blocks(&self) -> &[Block<T>] {
        &self.blocks
    }

    /// Same constraints, objective multiplied by `alpha`.
    pub fn with_scaled_objective(&self, alpha: T) -> Self {
        Self {
            objective: self.objective.iter().map(|&c| c * alpha).collect(),
            blocks: self.blocks.clone(),
        }
    }

    fn max_abs_entry(&self) -> T {
        let obj = self.objective.iter().fold(T::zero(), |m, c| m.max(c.abs()));
        self.blocks
            .iter()
            .flat_map(|b| std::iter::once(&b.constant).chain(&b.coefficients))
            .fold(obj, |m, f| m.max(f.max_abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    NumericalFailure,
}

/// Primal-dual certificate returned by [`solve`].
#[derive(Clone, Debug)]
pub struct Solution<T: Real> {
    pub status: Status,
    /// `c^T y`.
    pub primal_value: T,
    /// `-sum_k tr(F0_k Z_k)`.
    pub dual_value: T,
    pub y: Vec<T>,
    /// `Z_k`, Hermitian and PSD.
    pub dual_matrices: Vec<Matrix<T>>,
    /// `S_k = F0_k + sum_i y_i F_ik` evaluated at the returned `y`.
    pub slack_matrices: Vec<Matrix<T>>,
    /// `primal_value - dual_value`.
    pub gap: T,
    /// `sum_k tr(S_k Z_k)` on the final iterate.
    pub complementarity: T,
    /// Relative residual of `sum_k tr(F_ik Z_k) = c_i`.
    pub dual_infeasibility: T,
    /// Relative residual of the slack identity on the final iterate.
    pub primal_infeasibility: T,
    pub iterations: usize,
    /// On `Infeasible`: trace-normalized `Z` with `tr(F_ik Z) ~ 0` and `-tr(F0 Z) > 0`.
    pub infeasibility_ray: Option<Vec<Matrix<T>>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions<T: Real> {
    pub tolerance: T,
    pub max_iterations: usize,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(1e-8),
            max_iterations: 200,
        }
    }
}

/// Real symmetric embedding `[[Re h, -Im h], [Im h, Re h]]` of a Hermitian matrix.
pub fn real_embedding<T: Real>(h: &Matrix<T>) -> Result<RealMatrix<T>> {
    let n = h.require_square()?;
    let dev = h.hermitian_deviation();
    if dev > T::floor_tol(1e-10, 64.0) {
        return Err(Error::NotHermitian {
            deviation: dev.as_f64(),
        });
    }
    Ok(embed(h, n))
}

fn embed<T: Real>(h: &Matrix<T>, n: usize) -> RealMatrix<T> {
    RealMatrix::from_fn(2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Folds a dual matrix of an embedded block back to Hermitian form so that
/// `tr(embed(F) z) = tr(F fold(z))` for every Hermitian `F`.
fn fold<T: Real>(z: &RealMatrix<T>, n: usize) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| {
        Complex::new(
            z[(i, j)] + z[(i + n, j + n)],
            z[(i + n, j)] - z[(i, j + n)],
        )
    })
}

fn realify<T: Real>(h: &Matrix<T>) -> RealMatrix<T> {
    RealMatrix::from_fn(h.rows(), |i, j| h[(i, j)].re)
}

fn complexify<T: Real>(z: &RealMatrix<T>) -> Matrix<T> {
    Matrix::from_fn(z.dim(), z.dim(), |i, j| Complex::new(z[(i, j)], T::zero()))
}

/// Real standard form: minimize `<C, X>` s.t. `<A_i, X> = b_i`, `X >= 0`,
/// paired with maximize `b^T y` s.t. `sum_i y_i A_i + S = C`, `S >= 0`.
/// The user's LMI is the second problem with `C = F0`, `A_i = -F_i`, `b = -c`.
struct StandardForm<T: Real> {
    c: Vec<RealMatrix<T>>,
    a: Vec<Vec<RealMatrix<T>>>,
    b: Vec<T>,
    embedded: Vec<bool>,
    dims: Vec<usize>,
}

impl<T: Real> StandardForm<T> {
    fn from_problem(p: &Problem<T>) -> Self {
        let mut c = Vec::new();
        let mut a = Vec::new();
        let mut embedded = Vec::new();
        let mut dims = Vec::new();
        for blk in &p.blocks {
            let n = blk.dim();
            let real = blk.is_real();
            let conv = |m: &Matrix<T>| if real { realify(m) } else { embed(m, n) };
            c.push(conv(&blk.constant));
            a.push(blk.coefficients.iter().map(|f| conv(f).scale(-T::one())).collect());
            embedded.push(!real);
            dims.push(n);
        }
        Self {
            c,
            a,
            b: p.objective.iter().map(|&v| -v).collect(),
            embedded,
            dims,
        }
    }

    fn vars(&self) -> usize {
        self.b.len()
    }

    fn apply_a(&self, x: &[RealMatrix<T>]) -> Vec<T> {
        (0..self.vars())
            .map(|i| {
                self.a
                    .iter()
                    .zip(x)
                    .map(|(ab, xb)| ab[i].dot(xb))
                    .sum()
            })
            .collect()
    }

    /// `C - sum_i y_i A_i`, per block.
    fn dual_slack(&self, y: &[T]) -> Vec<RealMatrix<T>> {
        self.c
            .iter()
            .zip(&self.a)
            .map(|(cb, ab)| {
                let mut s = cb.clone();
                for (ai, &yi) in ab.iter().zip(y) {
                    s.axpy(-yi, ai);
                }
                s
            })
            .collect()
    }

    fn to_user(&self, k: usize, z: &RealMatrix<T>) -> Matrix<T> {
        if self.embedded[k] {
            fold(z, self.dims[k])
        } else {
            complexify(z)
        }
    }
}

struct Iterate<T: Real> {
    x: Vec<RealMatrix<T>>,
    y: Vec<T>,
    s: Vec<RealMatrix<T>>,
}

struct Direction<T: Real> {
    dx: Vec<RealMatrix<T>>,
    dy: Vec<T>,
    ds: Vec<RealMatrix<T>>,
}

fn norm2<T: Real>(v: &[T]) -> T {
    v.iter().map(|&a| a * a).sum::<T>().sqrt()
}

/// Largest `alpha` with `x + alpha dx >= 0`, capped at `T::infinity()`.
fn max_step<T: Real>(x: &[RealMatrix<T>], dx: &[RealMatrix<T>]) -> Option<T> {
    let mut alpha = T::infinity();
    for (xb, dxb) in x.iter().zip(dx) {
        let li = xb.cholesky()?.lower_inverse();
        let m = li.matmul(dxb).matmul(&li.transpose());
        let lmin = m.sym_eigenvalues()[0];
        if lmin < T::zero() {
            alpha = alpha.min(-T::one() / lmin);
        }
    }
    Some(alpha)
}

/// HKM direction for the complementarity target `rc = sigma mu I - X S - correction`.
fn hkm_direction<T: Real>(
    sf: &StandardForm<T>,
    it: &Iterate<T>,
    s_inv: &[RealMatrix<T>],
    schur: &RealMatrix<T>,
    rp: &[T],
    rd: &[RealMatrix<T>],
    rc: &[RealMatrix<T>],
) -> Option<Direction<T>> {
    let m = sf.vars();
    // rhs_i = rp_i - <A_i, rc S^-1> + <A_i, X rd S^-1>
    let mut rhs = rp.to_vec();
    for (k, ab) in sf.a.iter().enumerate() {
        let rcs = rc[k].matmul(&s_inv[k]);
        let xrds = it.x[k].matmul(&rd[k]).matmul(&s_inv[k]);
        let g = xrds.sub(&rcs);
        for i in 0..m {
            rhs[i] = rhs[i] + ab[i].dot(&g.transpose());
        }
    }
    let dy = dense::solve_symmetric(schur, &rhs)?;
    if dy.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut ds = Vec::with_capacity(sf.a.len());
    let mut dx = Vec::with_capacity(sf.a.len());
    for (k, ab) in sf.a.iter().enumerate() {
        let mut dsk = rd[k].clone();
        for (ai, &dyi) in ab.iter().zip(&dy) {
            dsk.axpy(-dyi, ai);
        }
        let dxk = rc[k]
            .matmul(&s_inv[k])
            .sub(&it.x[k].matmul(&dsk).matmul(&s_inv[k]))
            .symmetrized();
        ds.push(dsk);
        dx.push(dxk);
    }
    Some(Direction { dx, dy, ds })
}

/// Solves `problem` to absolute duality gap `tolerance`.
pub fn solve<T: Real>(problem: &Problem<T>, tolerance: T, max_iterations: usize) -> Solution<T> {
    solve_with(
        problem,
        &SolverOptions {
            tolerance,
            max_iterations,
        },
    )
}

pub fn solve_with<T: Real>(problem: &Problem<T>, opts: &SolverOptions<T>) -> Solution<T> {
    let sf = StandardForm::from_problem(problem);
    let m = sf.vars();
    let tol = opts.tolerance;
    let mu0 = T::lit(10.0) * (T::one() + problem.max_abs_entry());
    let total_dim: usize = sf.c.iter().map(|c| c.dim()).sum();
    let nf = T::from_usize_lossy(total_dim.max(1));

    let mut it = Iterate {
        x: sf.c.iter().map(|c| RealMatrix::scaled_identity(c.dim(), mu0)).collect(),
        y: vec![T::zero(); m],
        s: sf.c.iter().map(|c| RealMatrix::scaled_identity(c.dim(), mu0)).collect(),
    };
    let b_norm = norm2(&sf.b);
    let c_norm = sf.c.iter().map(|c| c.frobenius_norm()).fold(T::zero(), T::max);

    let mut status = Status::NumericalFailure;
    let mut iterations = 0;
    let gamma = T::lit(STEP_FRACTION);

    for iter in 0..=opts.max_iterations {
        iterations = iter;
        let ax = sf.apply_a(&it.x);
        let rp: Vec<T> = sf.b.iter().zip(&ax).map(|(&b, &a)| b - a).collect();
        let slack_from_y = sf.dual_slack(&it.y);
        let rd: Vec<RealMatrix<T>> = slack_from_y.iter().zip(&it.s).map(|(a, s)| a.sub(s)).collect();
        let xs: T = it.x.iter().zip(&it.s).map(|(x, s)| x.dot(s)).sum();
        let mu = xs / nf;

        let pobj = -sf.b.iter().zip(&it.y).map(|(&b, &y)| b * y).sum::<T>();
        let dobj = -sf.c.iter().zip(&it.x).map(|(c, x)| c.dot(x)).sum::<T>();
        let pinf = norm2(&rp) / (T::one() + b_norm);
        let dinf = rd.iter().map(|r| r.frobenius_norm()).fold(T::zero(), T::max) / (T::one() + c_norm);

        if (pobj - dobj).abs() <= tol && pinf <= tol && dinf <= tol && xs <= T::lit(10.0) * tol {
            status = Status::Optimal;
            break;
        }
        // A diverging dual objective with a small residual per unit of trace is an improving ray.
        let x_trace: T = it.x.iter().map(|x| x.trace()).sum();
        if dobj > T::lit(INFEASIBILITY_BOUND) && norm2(&rp) <= tol * x_trace.max(T::one()) {
            status = Status::Infeasible;
            break;
        }
        if iter == opts.max_iterations {
            break;
        }

        let Some(s_inv) = it.s.iter().map(|s| s.spd_inverse()).collect::<Option<Vec<_>>>() else {
            break;
        };

        // Schur complement M_ij = sum_k <A_i, X A_j S^-1>.
        let mut schur = RealMatrix::zeros(m);
        for (k, ab) in sf.a.iter().enumerate() {
            let xa: Vec<RealMatrix<T>> = ab.iter().map(|aj| it.x[k].matmul(aj).matmul(&s_inv[k])).collect();
            for i in 0..m {
                for j in i..m {
                    let v = ab[i].dot(&xa[j].transpose());
                    schur[(i, j)] = schur[(i, j)] + v;
                }
            }
        }
        for i in 0..m {
            for j in 0..i {
                schur[(i, j)] = schur[(j, i)];
            }
        }

        // predictor
        let rc_aff: Vec<RealMatrix<T>> = it.x.iter().zip(&it.s).map(|(x, s)| x.matmul(s).scale(-T::one())).collect();
        let Some(aff) = hkm_direction(&sf, &it, &s_inv, &schur, &rp, &rd, &rc_aff) else {
            break;
        };
        let (Some(ap), Some(ad)) = (max_step(&it.x, &aff.dx), max_step(&it.s, &aff.ds)) else {
            break;
        };
        let ap = ap.min(T::one());
        let ad = ad.min(T::one());
        let mu_aff: T = it
            .x
            .iter()
            .zip(&aff.dx)
            .zip(it.s.iter().zip(&aff.ds))
            .map(|((x, dx), (s, ds))| {
                let mut xn = x.clone();
                xn.axpy(ap, dx);
                let mut sn = s.clone();
                sn.axpy(ad, ds);
                xn.dot(&sn)
            })
            .sum::<T>()
            / nf;
        let sigma = (mu_aff / mu).max(T::zero()).min(T::one()).powi(3);

        // corrector
        let rc: Vec<RealMatrix<T>> = (0..sf.c.len())
            .map(|k| {
                let n = it.x[k].dim();
                RealMatrix::scaled_identity(n, sigma * mu)
                    .sub(&it.x[k].matmul(&it.s[k]))
                    .sub(&aff.dx[k].matmul(&aff.ds[k]))
            })
            .collect();
        let Some(dir) = hkm_direction(&sf, &it, &s_inv, &schur, &rp, &rd, &rc) else {
            break;
        };
        let (Some(ap), Some(ad)) = (max_step(&it.x, &dir.dx), max_step(&it.s, &dir.ds)) else {
            break;
        };
        let ap = (gamma * ap).min(T::one());
        let ad = (gamma * ad).min(T::one());
        if !(ap > T::zero() && ad > T::zero()) {
            break;
        }
        for k in 0..it.x.len() {
            it.x[k].axpy(ap, &dir.dx[k]);
            it.x[k] = it.x[k].symmetrized();
            it.s[k].axpy(ad, &dir.ds[k]);
            it.s[k] = it.s[k].symmetrized();
        }
        for (y, dy) in it.y.iter_mut().zip(&dir.dy) {
            *y = *y + ad * *dy;
        }
    }

    finish(problem, &sf, &it, status, iterations)
}

fn finish<T: Real>(
    problem: &Problem<T>,
    sf: &StandardForm<T>,
    it: &Iterate<T>,
    status: Status,
    iterations: usize,
) -> Solution<T> {
    let dual_matrices: Vec<Matrix<T>> = it.x.iter().enumerate().map(|(k, x)| sf.to_user(k, x)).collect();
    let slack_matrices: Vec<Matrix<T>> = problem.blocks.iter().map(|b| b.evaluate(&it.y)).collect();
    let primal_value: T = problem.objective.iter().zip(&it.y).map(|(&c, &y)| c * y).sum();
    let dual_value: T = -problem
        .blocks
        .iter()
        .zip(&dual_matrices)
        .map(|(b, z)| trace_product(&b.constant, z))
        .sum::<T>();
    let complementarity = it.x.iter().zip(&it.s).map(|(x, s)| x.dot(s)).sum();
    let ax = sf.apply_a(&it.x);
    let rp: Vec<T> = sf.b.iter().zip(&ax).map(|(&b, &a)| b - a).collect();
    let dual_infeasibility = norm2(&rp) / (T::one() + norm2(&sf.b));
    let rd = sf.dual_slack(&it.y);
    let c_norm = sf.c.iter().map(|c| c.frobenius_norm()).fold(T::zero(), T::max);
    let primal_infeasibility = rd
        .iter()
        .zip(&it.s)
        .map(|(a, s)| a.sub(s).frobenius_norm())
        .fold(T::zero(), T::max)
        / (T::one() + c_norm);
    let infeasibility_ray = (status == Status::Infeasible).then(|| {
        let tr: T = dual_matrices.iter().map(|z| z.trace_re()).sum();
        dual_matrices.iter().map(|z| z.scale(T::one() / tr)).collect()
    });
    Solution {
        status,
        primal_value,
        dual_value,
        y: it.y.clone(),
        dual_matrices,
        slack_matrices,
        gap: primal_value - dual_value,
        complementarity,
        dual_infeasibility,
        primal_infeasibility,
        iterations,
        infeasibility_ray,
    }
}

/// `Re tr(a b)` for Hermitian arguments.
fn trace_product<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            s = s + (a[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

#[cfg(test)]
mod tests;
