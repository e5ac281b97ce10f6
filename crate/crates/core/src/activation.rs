//! Activation of teleportation fidelity by an auxiliary entangled state.
//!
//! Alice holds `A1 A2 A3`, Bob holds `B1 B2 B3`. The helper `sigma` lives on
//! `A1B1` (`m x m`) and the resource `rho` on `A2A3B2B3` (stored in the
//! [`FourPartySpace`] order `A2, A3, B2, B3`). The fixed protocol projects
//! `A1A2` and `B1B2` onto `|phi_m>`; on success the state left on `A3B3` is
//!
//! ```text
//! out = (1/m^2) sum sigma[(i,j),(i',j')] rho[(i,a,j,b),(i',a',j',b')] |ab><a'b'|
//! ```
//!
//! and on failure both parties prepare `|00>`, whose overlap with `phi_d` is
//! `1/d`. The identity `tr(out Z) = (1/m^2) tr[rho (sigma^T (x) Z)]` turns every
//! figure of merit into a linear functional of `sigma`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{max_entangled, trace_inner, BipartiteSpace, Matrix, PureState};
use crate::scalar::{re, Real, C};
use crate::seesaw::seesaw_max_product;
use crate::states::{Density, FourPartySpace};
use crate::teleport::{classical_threshold, tele_fidelity_from_f};

/// Spreads at or below this make the activation ratio meaningless.
pub const DEGENERATE_SPREAD: f64 = 1e-10;

/// See-saw restarts used for the spread unless the caller overrides them.
pub const DEFAULT_RESTARTS: usize = 100;

fn check_inputs<T: Real>(rho: &Density<T>, fp: FourPartySpace, sigma: Option<&Density<T>>) -> Result<()> {
    if rho.space() != fp.bipartite() {
        return Err(Error::DimensionMismatch {
            context: "resource must live on A2A3|B2B3",
            expected: fp.total(),
            found: rho.dim(),
        });
    }
    if let Some(sigma) = sigma {
        let s = sigma.space();
        if s.dim_a != fp.m || s.dim_b != fp.m {
            return Err(Error::DimensionMismatch {
                context: "helper state must be m x m",
                expected: fp.m,
                found: if s.dim_a != fp.m { s.dim_a } else { s.dim_b },
            });
        }
    }
    Ok(())
}

/// Storage index of `|i, a, j, b>` on `A2 A3 B2 B3`.
#[inline]
fn idx4(fp: FourPartySpace, i: usize, a: usize, j: usize, b: usize) -> usize {
    ((i * fp.d + a) * fp.m + j) * fp.d + b
}

/// `I/d - phi_d`.
fn detection_kernel<T: Real>(d: usize) -> Matrix<T> {
    let phi = max_entangled::<T>(d).projector();
    &Matrix::identity(d * d).scale(T::one() / T::from_usize_lossy(d)) - &phi
}

/// State prepared by both parties when the projection fails.
pub fn failure_branch_state<T: Real>(d: usize) -> PureState<T> {
    PureState::basis(d * d, 0)
}

/// Unnormalized success-branch output on `A3B3` and its trace.
pub fn slocc_activation_apply<T: Real>(
    rho: &Density<T>,
    fp: FourPartySpace,
    sigma: &Density<T>,
) -> Result<(Matrix<T>, T)> {
    check_inputs(rho, fp, Some(sigma))?;
    let (m, d) = (fp.m, fp.d);
    let r = rho.matrix();
    let s = sigma.matrix();
    let w = T::one() / T::from_usize_lossy(m * m);
    let mut out = Matrix::zeros(d * d, d * d);
    for i in 0..m {
        for j in 0..m {
            for i2 in 0..m {
                for j2 in 0..m {
                    let sv = s[(i * m + j, i2 * m + j2)];
                    if sv.is_zero() {
                        continue;
                    }
                    for a in 0..d {
                        for b in 0..d {
                            let row = idx4(fp, i, a, j, b);
                            for a2 in 0..d {
                                for b2 in 0..d {
                                    let col = idx4(fp, i2, a2, j2, b2);
                                    out[(a * d + b, a2 * d + b2)] = out[(a * d + b, a2 * d + b2)] + sv * r[(row, col)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let out = out.scale(w);
    let p = out.trace_re();
    Ok((out, p))
}

/// Both sides of `tr(out Z) = c tr[rho (sigma^T (x) Z)]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransposeIdentity<T: Real> {
    pub lhs: T,
    pub rhs: T,
    /// `lhs / rhs`, absent when `rhs` vanishes.
    pub constant: Option<T>,
}

/// Evaluates the success-branch identity for a Hermitian test operator `z`.
pub fn verify_transpose_identity<T: Real>(
    rho: &Density<T>,
    fp: FourPartySpace,
    sigma: &Density<T>,
    z: &Matrix<T>,
) -> Result<TransposeIdentity<T>> {
    let d2 = fp.d * fp.d;
    if z.rows() != d2 || z.cols() != d2 {
        return Err(Error::DimensionMismatch {
            context: "test operator must act on A3B3",
            expected: d2,
            found: z.rows(),
        });
    }
    let (out, _) = slocc_activation_apply(rho, fp, sigma)?;
    let lhs = trace_inner(&out, z)?.re;
    let rhs = trace_inner(rho.matrix(), &fp.embed_pair(&sigma.matrix().transpose(), z)?)?.re;
    let constant = (rhs.abs() > T::floor_tol(1e-14, 16.0)).then(|| lhs / rhs);
    Ok(TransposeIdentity { lhs, rhs, constant })
}

/// Entanglement fidelity of the full trace-preserving map on `rho (x) sigma`.
pub fn locc_lambda_fidelity<T: Real>(rho: &Density<T>, fp: FourPartySpace, sigma: &Density<T>) -> Result<T> {
    let (out, p) = slocc_activation_apply(rho, fp, sigma)?;
    let phi = max_entangled::<T>(fp.d);
    let failure = failure_branch_state::<T>(fp.d);
    let overlap = trace_inner(&phi.projector(), &failure.projector())?.re;
    Ok(out.expectation(phi.amplitudes()).re + (T::one() - p) * overlap)
}

/// `tr[rho (sigma^T (x) (I/d - phi_d))]`; negative exactly when the map
/// lifts the entanglement fidelity above `1/d`.
pub fn detection_value<T: Real>(rho: &Density<T>, fp: FourPartySpace, sigma: &Density<T>) -> Result<T> {
    check_inputs(rho, fp, Some(sigma))?;
    let op = fp.embed_pair(&sigma.matrix().transpose(), &detection_kernel(fp.d))?;
    Ok(trace_inner(rho.matrix(), &op)?.re)
}

/// Operator `Y` on `A1B1` with `tr(Y sigma) = tr[rho (sigma^T (x) (I/d - phi_d))]`.
pub fn detection_operator<T: Real>(rho: &Density<T>, fp: FourPartySpace) -> Result<Matrix<T>> {
    check_inputs(rho, fp, None)?;
    let (m, d) = (fp.m, fp.d);
    let k = detection_kernel::<T>(d);
    let r = rho.matrix();
    let mut y = Matrix::zeros(m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            for i2 in 0..m {
                for j2 in 0..m {
                    let mut acc = C::zero();
                    for a in 0..d {
                        for b in 0..d {
                            let row = idx4(fp, i, a, j, b);
                            for a2 in 0..d {
                                for b2 in 0..d {
                                    let kv = k[(a2 * d + b2, a * d + b)];
                                    if !kv.is_zero() {
                                        acc = acc + r[(row, idx4(fp, i2, a2, j2, b2))] * kv;
                                    }
                                }
                            }
                        }
                    }
                    y[(i2 * m + j2, i * m + j)] = acc;
                }
            }
        }
    }
    Ok(y.hermitian_part())
}

/// `(d / ((d + 1) m^2))`: converts `tr(Y sigma)` into a fidelity deficit.
fn deficit_scale<T: Real>(fp: FourPartySpace) -> T {
    let d = T::from_usize_lossy(fp.d);
    d / ((d + T::one()) * T::from_usize_lossy(fp.m * fp.m))
}

#[derive(Clone, Debug)]
pub struct Spread<T: Real> {
    /// Best `f_class - f_d(rho (x) pi)` found over product `pi`.
    pub value: T,
    pub restarts: usize,
    /// Product state on `A1B1` attaining `value`.
    pub argmax: Density<T>,
}

impl<T: Real> Spread<T> {
    pub fn is_degenerate(&self) -> bool {
        self.value <= T::lit(DEGENERATE_SPREAD)
    }
}

/// How far below the classical threshold separable helpers can push the
/// fidelity, maximized by see-saw over product states of `A1B1`.
///
/// The see-saw only visits product states, so this is a lower bound on the
/// maximum over all separable helpers.
pub fn spread_gd<T: Real>(rho: &Density<T>, fp: FourPartySpace, restarts: usize, seed: u64) -> Result<Spread<T>> {
    let y = detection_operator(rho, fp)?;
    let best = seesaw_max_product(&y, BipartiteSpace::symmetric(fp.m)?, restarts, seed)?;
    Ok(Spread {
        value: deficit_scale::<T>(fp) * best.value,
        restarts: best.restarts,
        argmax: best.argmax,
    })
}

/// Fidelity-gain witness of the fixed protocol, acting on `A1B1`.
#[derive(Clone, Debug)]
pub struct ProtocolWitness<T: Real> {
    pub operator: Matrix<T>,
    pub gd: T,
}

impl<T: Real> ProtocolWitness<T> {
    pub fn value(&self, sigma: &Density<T>) -> Result<T> {
        Ok(trace_inner(&self.operator, sigma.matrix())?.re)
    }
}

/// Dense Kraus operator `K = <phi_m|_{A1A2} (x) <phi_m|_{B1B2} (x) I_{A3B3}` from
/// `A1 B1 A2 A3 B2 B3` to `A3 B3`.
fn success_kraus<T: Real>(fp: FourPartySpace) -> Matrix<T> {
    let (m, d) = (fp.m, fp.d);
    let n = m * m * fp.total();
    let w = re(T::one() / T::from_usize_lossy(m));
    let mut k = Matrix::zeros(d * d, n);
    for i in 0..m {
        for j in 0..m {
            for a in 0..d {
                for b in 0..d {
                    let col = (i * m + j) * fp.total() + idx4(fp, i, a, j, b);
                    k[(a * d + b, col)] = w;
                }
            }
        }
    }
    k
}

/// `W = (I - d Q) / ((d + 1) gd)` with `tr(Q sigma)` the entanglement fidelity
/// of the full map, `Q = tr_rho[(I (x) rho) Lambda^dagger(phi_d)]`.
///
/// Built from the explicit Kraus operators rather than the success-branch
/// contraction, so it cross-checks [`build_activation_report`].
pub fn protocol_witness<T: Real>(rho: &Density<T>, fp: FourPartySpace, gd: T) -> Result<ProtocolWitness<T>> {
    check_inputs(rho, fp, None)?;
    if !(gd > T::zero()) {
        return Err(Error::DegenerateSpread {
            value: gd.as_f64(),
            threshold: 0.0,
        });
    }
    let (m, d) = (fp.m, fp.d);
    let nr = fp.total();
    let n = m * m * nr;
    let k = success_kraus::<T>(fp);
    let phi = max_entangled::<T>(d);
    let failure = failure_branch_state::<T>(d);
    let fail_overlap = trace_inner(&phi.projector(), &failure.projector())?.re;

    // Lambda^dagger(phi) = K^dagger phi K + <f|phi|f> (I - K^dagger K)
    let kphi = k.adjoint().matvec(phi.amplitudes());
    let ktk = k.adjoint().matmul(&k);
    let dual = Matrix::from_fn(n, n, |p, q| {
        let id = if p == q { T::one() } else { T::zero() };
        kphi[p] * kphi[q].conj() + (re(id) - ktk[(p, q)]) * re(fail_overlap)
    });

    // Q[s, s'] = sum_{r, r'} rho[r, r'] dual[(s, r'), (s', r)]
    let r = rho.matrix();
    let q = Matrix::from_fn(m * m, m * m, |s, s2| {
        let mut acc = C::zero();
        for ra in 0..nr {
            for rb in 0..nr {
                let rv = r[(ra, rb)];
                if !rv.is_zero() {
                    acc = acc + rv * dual[(s * nr + rb, s2 * nr + ra)];
                }
            }
        }
        acc
    });
    let df = T::from_usize_lossy(d);
    let scale = T::one() / ((df + T::one()) * gd);
    let operator = (&Matrix::identity(m * m) - &q.scale(df)).scale(scale).hermitian_part();
    Ok(ProtocolWitness { operator, gd })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActivationReport<T: Real> {
    pub m: usize,
    pub d: usize,
    pub success_probability: T,
    /// Entanglement fidelity of the full trace-preserving map.
    pub fidelity_with_sigma: T,
    pub fidelity_failure_branch: T,
    /// `(d F + 1)/(d + 1)` for `fidelity_with_sigma`.
    pub teleport_fidelity: T,
    pub classical_threshold: T,
    pub gd: T,
    pub spread_restarts: usize,
    /// `(teleport_fidelity - classical_threshold) / gd`.
    pub activation_ratio: T,
    pub detection_value: T,
}

/// Assembles every figure of merit of the fixed protocol for `rho (x) sigma`.
pub fn build_activation_report<T: Real>(
    rho: &Density<T>,
    fp: FourPartySpace,
    sigma: &Density<T>,
    restarts: usize,
    seed: u64,
) -> Result<ActivationReport<T>> {
    let spread = spread_gd(rho, fp, restarts, seed)?;
    build_activation_report_with_spread(rho, fp, sigma, &spread)
}

/// As [`build_activation_report`], reusing a spread computed for `rho`.
pub fn build_activation_report_with_spread<T: Real>(
    rho: &Density<T>,
    fp: FourPartySpace,
    sigma: &Density<T>,
    spread: &Spread<T>,
) -> Result<ActivationReport<T>> {
    if spread.is_degenerate() {
        return Err(Error::DegenerateSpread {
            value: spread.value.as_f64(),
            threshold: DEGENERATE_SPREAD,
        });
    }
    let (_, p) = slocc_activation_apply(rho, fp, sigma)?;
    let f = locc_lambda_fidelity(rho, fp, sigma)?;
    let threshold = classical_threshold::<T>(fp.d)?;
    let teleport_fidelity = tele_fidelity_from_f(f.max(T::zero()).min(T::one()), fp.d)?;
    let failure = failure_branch_state::<T>(fp.d);
    let fidelity_failure_branch = max_entangled::<T>(fp.d)
        .projector()
        .expectation(failure.amplitudes())
        .re;
    Ok(ActivationReport {
        m: fp.m,
        d: fp.d,
        success_probability: p,
        fidelity_with_sigma: f,
        fidelity_failure_branch,
        teleport_fidelity,
        classical_threshold: threshold,
        gd: spread.value,
        spread_restarts: spread.restarts,
        activation_ratio: (teleport_fidelity - threshold) / spread.value,
        detection_value: detection_value(rho, fp, sigma)?,
    })
}

/// `phi_m` on `A2B2` with `phi_d` on `A3B3`: the entanglement-swapping resource.
pub fn swapping_resource<T: Real>(fp: FourPartySpace) -> Result<Density<T>> {
    let x = max_entangled::<T>(fp.m).projector();
    let z = max_entangled::<T>(fp.d).projector();
    Ok(Density::from_parts(fp.embed_pair(&x, &z)?, fp.bipartite()))
}

/// `phi_m` on `A2A3` and on `B2B3` (requires `m = d`). Separable across the
/// Alice|Bob cut, so no LOCC map can beat the classical threshold with it.
pub fn lab_local_resource<T: Real>(fp: FourPartySpace) -> Result<Density<T>> {
    if fp.m != fp.d {
        return Err(Error::DimensionMismatch {
            context: "lab-local resource needs m = d",
            expected: fp.m,
            found: fp.d,
        });
    }
    let local = max_entangled::<T>(fp.m).projector();
    fp.local_product(&local, &local)
}
