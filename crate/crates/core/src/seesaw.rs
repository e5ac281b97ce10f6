//! Alternating maximization of `<a (x) b| h |a (x) b>` over product vectors.
//!
//! The maximum of a linear functional over separable states is attained on
//! pure product states, so this lower-bounds `max_{pi separable} tr(h pi)`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, haar_from_rng, seeded_rng, BipartiteSpace, Matrix, PureState};
use crate::scalar::{Real, C};
use crate::states::Density;

const MAX_ALTERNATIONS: usize = 500;

#[derive(Clone, Debug)]
pub struct SeesawResult<T: Real> {
    /// Best value found over all restarts.
    pub value: T,
    /// Product state attaining `value`.
    pub argmax: Density<T>,
    pub restarts: usize,
}

/// `<b| h |b>` contracted on the B factor, an operator on A.
fn contract_b<T: Real>(h: &Matrix<T>, space: BipartiteSpace, b: &[C<T>]) -> Matrix<T> {
    let db = space.dim_b;
    Matrix::from_fn(space.dim_a, space.dim_a, |i, k| {
        let mut s = C::zero();
        for j in 0..db {
            for l in 0..db {
                s = s + b[j].conj() * h[(i * db + j, k * db + l)] * b[l];
            }
        }
        s
    })
}

/// `<a| h |a>` contracted on the A factor, an operator on B.
fn contract_a<T: Real>(h: &Matrix<T>, space: BipartiteSpace, a: &[C<T>]) -> Matrix<T> {
    let db = space.dim_b;
    Matrix::from_fn(db, db, |j, l| {
        let mut s = C::zero();
        for i in 0..space.dim_a {
            for k in 0..space.dim_a {
                s = s + a[i].conj() * h[(i * db + j, k * db + l)] * a[k];
            }
        }
        s
    })
}

/// Top eigenpair; a degenerate top eigenvalue is resolved toward the
/// eigenvector with the largest first-component magnitude.
fn top_eigenvector<T: Real>(m: &Matrix<T>) -> (T, Vec<C<T>>) {
    let e = eig_hermitian(m).expect("contractions of a Hermitian operator are Hermitian");
    let top = e.max();
    let tie = T::floor_tol(1e-12, 64.0) * T::one().max(top.abs());
    let n = e.values.len();
    let mut best = n - 1;
    for k in (0..n).rev() {
        if top - e.values[k] > tie {
            break;
        }
        if e.vectors[(0, k)].norm() > e.vectors[(0, best)].norm() + tie {
            best = k;
        }
    }
    (top, e.vector(best))
}

/// Value with the `a` and `b` factors that attain it.
type Candidate<T> = (T, Vec<C<T>>, Vec<C<T>>);

/// Best product-state value of `h` over `restarts` seeded starting points.
///
/// Restart `r` draws its initial B vector from stream `r` of `seed`, so the
/// result is a running maximum: more restarts never lower it.
pub fn seesaw_max_product<T: Real>(
    h: &Matrix<T>,
    space: BipartiteSpace,
    restarts: usize,
    seed: u64,
) -> Result<SeesawResult<T>> {
    space.check(h, "seesaw_max_product")?;
    let dev = h.hermitian_deviation();
    if dev > T::floor_tol(1e-10, 64.0) * T::one().max(h.max_abs()) {
        return Err(Error::NotHermitian {
            deviation: dev.as_f64(),
        });
    }
    let h = h.hermitian_part();
    let restarts = restarts.max(1);
    let stop = T::floor_tol(1e-12, 16.0);

    let mut best: Option<Candidate<T>> = None;
    for r in 0..restarts {
        let mut rng = seeded_rng(seed, r as u64);
        let mut b = haar_from_rng::<T>(space.dim_b, &mut rng).amplitudes().to_vec();
        let (mut value, mut a) = top_eigenvector(&contract_b(&h, space, &b));
        for _ in 0..MAX_ALTERNATIONS {
            let (_, nb) = top_eigenvector(&contract_a(&h, space, &a));
            b = nb;
            let (v, na) = top_eigenvector(&contract_b(&h, space, &b));
            a = na;
            let improved = v - value;
            value = value.max(v);
            if improved < stop {
                break;
            }
        }
        if best.as_ref().is_none_or(|(bv, _, _)| value > *bv) {
            best = Some((value, a, b));
        }
    }
    let (value, a, b) = best.expect("at least one restart");
    let a = PureState::normalized(a)?;
    let b = PureState::normalized(b)?;
    Ok(SeesawResult {
        value,
        argmax: Density::from_parts(a.kron(&b).projector(), space),
        restarts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, max_entangled, standard_complex_gaussian, trace_inner};

    fn sp(a: usize, b: usize) -> BipartiteSpace {
        BipartiteSpace::new(a, b).unwrap()
    }

    fn random_hermitian(n: usize, seed: u64) -> Matrix<f64> {
        let mut rng = seeded_rng(seed, 9);
        Matrix::from_fn(n, n, |_, _| standard_complex_gaussian::<f64>(&mut rng)).hermitian_part()
    }

    #[test]
    fn identity_gives_one() {
        for restarts in [1, 5] {
            let r = seesaw_max_product(&Matrix::<f64>::identity(6), sp(2, 3), restarts, 1).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn max_entangled_projector_gives_one_over_d() {
        for d in [2, 3] {
            let h = max_entangled::<f64>(d).projector();
            let r = seesaw_max_product(&h, sp(d, d), 10, 3).unwrap();
            assert!((r.value - 1.0 / d as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn factorized_operator() {
        let a = Matrix::<f64>::from_real(2, 2, &[2.0, 1.0, 1.0, 1.0]).unwrap();
        let b = Matrix::<f64>::from_real(3, 3, &[1.0, 0.0, 0.0, 0.0, 3.0, 0.5, 0.0, 0.5, 1.0]).unwrap();
        let la = eig_hermitian(&a).unwrap().max();
        let lb = eig_hermitian(&b).unwrap().max();
        let r = seesaw_max_product(&kron(&a, &b), sp(2, 3), 5, 0).unwrap();
        assert!((r.value - la * lb).abs() < 1e-9);
    }

    #[test]
    fn argmax_reproduces_value_and_respects_bound() {
        for seed in 0..10 {
            let h = random_hermitian(6, seed);
            let r = seesaw_max_product(&h, sp(2, 3), 20, seed).unwrap();
            let at = trace_inner(&h, r.argmax.matrix()).unwrap().re;
            assert!((at - r.value).abs() < 1e-9);
            assert!(r.value <= eig_hermitian(&h).unwrap().max() + 1e-9);
            assert!((r.argmax.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn more_restarts_never_lower_the_result() {
        let h = random_hermitian(9, 42);
        let vals: Vec<f64> = [1, 10, 100]
            .iter()
            .map(|&r| seesaw_max_product(&h, sp(3, 3), r, 7).unwrap().value)
            .collect();
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
    }

    #[test]
    fn deterministic_for_seed() {
        let h = random_hermitian(4, 5);
        let a = seesaw_max_product(&h, sp(2, 2), 8, 11).unwrap();
        let b = seesaw_max_product(&h, sp(2, 2), 8, 11).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.argmax, b.argmax);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(seesaw_max_product(&Matrix::<f64>::identity(5), sp(2, 2), 1, 0).is_err());
        let nh = Matrix::<f64>::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(seesaw_max_product(&nh, sp(1, 2), 1, 0).is_err());
    }
}
