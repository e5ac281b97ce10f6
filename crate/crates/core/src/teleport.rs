//! Teleportation with a noisy resource: entanglement fidelity, the
//! isotropic twirl, the standard protocol with Weyl corrections, and a
//! Monte Carlo estimate of the Haar-averaged output fidelity.
//!
//! For a resource `rho` on `C^d (x) C^d` with `F = <phi_d| rho |phi_d>`, the
//! twirled standard protocol reaches average fidelity `f = (F d + 1)/(d + 1)`.
//! Separable resources satisfy `F <= 1/d`, hence `f <= 2/(d + 1)`.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{haar_from_rng, seeded_rng, BipartiteSpace, Matrix, PureState};
use crate::scalar::{Real, C};
use crate::states::{isotropic, Density};

/// Samples drawn from one seeded stream in [`mc_average_fidelity`].
pub const MC_CHUNK: usize = 4096;

/// Fewest samples accepted by the Monte Carlo estimators.
pub const MIN_SAMPLES: usize = 100;

fn check_dimension(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::OutOfRange {
            name: "teleportation dimension",
            value: d as f64,
            allowed: ">= 2",
        });
    }
    Ok(())
}

/// Local dimension of a `d x d` resource.
fn resource_dimension<T: Real>(rho: &Density<T>) -> Result<usize> {
    let space = rho.space();
    if space.dim_a != space.dim_b {
        return Err(Error::DimensionMismatch {
            context: "teleportation resource must be d x d",
            expected: space.dim_a,
            found: space.dim_b,
        });
    }
    check_dimension(space.dim_a)?;
    Ok(space.dim_a)
}

/// Best average fidelity reachable with a separable resource, `2/(d + 1)`.
pub fn classical_threshold<T: Real>(d: usize) -> Result<T> {
    check_dimension(d)?;
    Ok(T::lit(2.0) / T::from_usize_lossy(d + 1))
}

/// `<phi_d| rho |phi_d>`.
pub fn entanglement_fidelity<T: Real>(rho: &Density<T>) -> Result<T> {
    let d = resource_dimension(rho)?;
    let m = rho.matrix();
    let mut s = T::zero();
    for i in 0..d {
        for j in 0..d {
            s = s + m[(i * d + i, j * d + j)].re;
        }
    }
    Ok(s / T::from_usize_lossy(d))
}

/// Average teleportation fidelity `(F d + 1)/(d + 1)`.
pub fn tele_fidelity_from_f<T: Real>(f: T, d: usize) -> Result<T> {
    check_dimension(d)?;
    if !(f >= T::zero() && f <= T::one()) {
        return Err(Error::OutOfRange {
            name: "entanglement fidelity",
            value: f.as_f64(),
            allowed: "[0, 1]",
        });
    }
    let d = T::from_usize_lossy(d);
    Ok((f * d + T::one()) / (d + T::one()))
}

/// Projection onto the isotropic family with the same entanglement fidelity.
pub fn twirl_isotropic<T: Real>(rho: &Density<T>) -> Result<Density<T>> {
    let d = resource_dimension(rho)?;
    let f = entanglement_fidelity(rho)?.max(T::zero()).min(T::one());
    isotropic(d, f)
}

/// Weyl operator `X^a Z^b` with `X|k> = |k+1>` and `Z|k> = w^k |k>`.
pub fn weyl<T: Real>(d: usize, a: usize, b: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(d, d);
    for k in 0..d {
        let angle = T::lit(2.0 * std::f64::consts::PI) * T::from_usize_lossy((b * k) % d) / T::from_usize_lossy(d);
        m[((k + a) % d, k)] = Complex::new(angle.cos(), angle.sin());
    }
    m
}

/// The standard protocol as a linear map on Bob's side, stored through its
/// action on matrix units: `images[i * d + j] = Lambda(|i><j|)`.
#[derive(Clone, Debug)]
pub struct TeleportChannel<T: Real> {
    d: usize,
    images: Vec<Matrix<T>>,
}

impl<T: Real> TeleportChannel<T> {
    /// Bell measurement on (input, Alice) in the basis `(X^a Z^b (x) I)|phi_d>`,
    /// followed by `X^a Z^b` on Bob.
    pub fn new(resource: &Density<T>) -> Result<Self> {
        let d = resource_dimension(resource)?;
        let rho = resource.matrix();
        let norm = T::one() / T::from_usize_lossy(d);
        let mut images = vec![Matrix::zeros(d, d); d * d];
        for a in 0..d {
            for b in 0..d {
                // |phi_ab>[(c, x)] = U[c, x] / sqrt(d)
                let u = weyl::<T>(d, a, b);
                let mut branch = vec![Matrix::zeros(d, d); d * d];
                for i in 0..d {
                    for j in 0..d {
                        let out = &mut branch[i * d + j];
                        for x in 0..d {
                            let vi = u[(i, x)].conj();
                            if vi.is_zero() {
                                continue;
                            }
                            for y in 0..d {
                                let vj = u[(j, y)];
                                if vj.is_zero() {
                                    continue;
                                }
                                let w = vi * vj * norm;
                                for p in 0..d {
                                    for q in 0..d {
                                        out[(p, q)] = out[(p, q)] + w * rho[(x * d + p, y * d + q)];
                                    }
                                }
                            }
                        }
                    }
                }
                let ud = u.adjoint();
                for (img, br) in images.iter_mut().zip(&branch) {
                    *img = &*img + &u.matmul(br).matmul(&ud);
                }
            }
        }
        Ok(Self { d, images })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `Lambda(x)` for any `d x d` operator.
    pub fn apply(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        let d = self.d;
        if x.rows() != d || x.cols() != d {
            return Err(Error::DimensionMismatch {
                context: "teleportation input",
                expected: d,
                found: x.rows(),
            });
        }
        let mut out = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                if !x[(i, j)].is_zero() {
                    out = &out + &self.images[i * d + j].scale_complex(x[(i, j)]);
                }
            }
        }
        Ok(out)
    }

    /// `<psi| Lambda(|psi><psi|) |psi>`.
    pub fn output_fidelity(&self, psi: &[C<T>]) -> T {
        let d = self.d;
        let mut s = C::zero();
        for i in 0..d {
            for j in 0..d {
                let coef = psi[i] * psi[j].conj();
                if !coef.is_zero() {
                    s = s + coef * self.images[i * d + j].expectation(psi);
                }
            }
        }
        s.re
    }

    /// `<phi_d| (id (x) Lambda)(phi_d) |phi_d> = (1/d^2) sum_ij <i|Lambda(|i><j|)|j>`.
    pub fn entanglement_fidelity(&self) -> T {
        let d = self.d;
        let mut s = T::zero();
        for i in 0..d {
            for j in 0..d {
                s = s + self.images[i * d + j][(i, j)].re;
            }
        }
        s / T::from_usize_lossy(d * d)
    }
}

/// Output of the standard protocol for one input state.
pub fn standard_teleport_channel<T: Real>(resource: &Density<T>, input: &PureState<T>) -> Result<Density<T>> {
    let channel = TeleportChannel::new(resource)?;
    let out = channel.apply(&input.projector())?;
    Ok(Density::from_parts(out.hermitian_part(), BipartiteSpace::new(channel.dim(), 1)?))
}

/// Whether the resource is twirled before the standard protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Protocol {
    /// Isotropic twirl, then the standard protocol.
    #[default]
    Twirled,
    /// Standard protocol on the raw resource.
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarlo<T: Real> {
    pub mean: T,
    /// Sample standard deviation over `sqrt(samples)`.
    pub std_error: T,
    pub samples: usize,
}

impl<T: Real> MonteCarlo<T> {
    /// `|mean - exact| <= k * std_error + floor`.
    pub fn agrees_with(&self, exact: T, k: T, floor: T) -> bool {
        (self.mean - exact).abs() <= k * self.std_error + floor
    }
}

/// Running moments of one chunk, merged in chunk order.
#[derive(Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * o.n / n,
            m2: self.m2 + o.m2 + delta * delta * self.n * o.n / n,
        }
    }
}

/// Haar average of the output fidelity for the twirled standard protocol.
pub fn mc_average_fidelity<T: Real>(resource: &Density<T>, samples: usize, seed: u64) -> Result<MonteCarlo<T>> {
    mc_average_fidelity_with(resource, samples, seed, Protocol::Twirled)
}

/// Sample `k` is drawn from stream `k / MC_CHUNK` of `seed`, so the estimate
/// does not depend on the number of worker threads.
pub fn mc_average_fidelity_with<T: Real>(
    resource: &Density<T>,
    samples: usize,
    seed: u64,
    protocol: Protocol,
) -> Result<MonteCarlo<T>> {
    if samples < MIN_SAMPLES {
        return Err(Error::OutOfRange {
            name: "samples",
            value: samples as f64,
            allowed: ">= 100",
        });
    }
    let channel = match protocol {
        Protocol::Twirled => TeleportChannel::new(&twirl_isotropic(resource)?)?,
        Protocol::Direct => TeleportChannel::new(resource)?,
    };
    let d = channel.dim();
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seeded_rng(seed, c as u64);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut acc = Moments {
                n: 0.0,
                mean: 0.0,
                m2: 0.0,
            };
            for _ in 0..count {
                let psi = haar_from_rng::<T>(d, &mut rng);
                let x = channel.output_fidelity(psi.amplitudes()).as_f64();
                acc.n += 1.0;
                let delta = x - acc.mean;
                acc.mean += delta / acc.n;
                acc.m2 += delta * (x - acc.mean);
            }
            acc
        })
        .collect();
    let total = parts.into_iter().fold(
        Moments {
            n: 0.0,
            mean: 0.0,
            m2: 0.0,
        },
        Moments::merge,
    );
    let var = (total.m2 / (total.n - 1.0)).max(0.0);
    Ok(MonteCarlo {
        mean: T::lit(total.mean),
        std_error: T::lit((var / total.n).sqrt()),
        samples,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TeleportReport<T: Real> {
    pub d: usize,
    pub entanglement_fidelity: T,
    pub teleport_fidelity: T,
    pub classical_threshold: T,
    pub beats_classical: bool,
    pub monte_carlo: Option<MonteCarlo<T>>,
}

/// Closed-form fidelities, plus a Monte Carlo cross-check when `mc` is
/// `Some((samples, seed))`.
pub fn teleport_report<T: Real>(resource: &Density<T>, mc: Option<(usize, u64)>) -> Result<TeleportReport<T>> {
    let d = resource_dimension(resource)?;
    let f = entanglement_fidelity(resource)?.max(T::zero()).min(T::one());
    let teleport_fidelity = tele_fidelity_from_f(f, d)?;
    let threshold = classical_threshold(d)?;
    let monte_carlo = match mc {
        Some((samples, seed)) => Some(mc_average_fidelity(resource, samples, seed)?),
        None => None,
    };
    Ok(TeleportReport {
        d,
        entanglement_fidelity: f,
        teleport_fidelity,
        classical_threshold: threshold,
        beats_classical: teleport_fidelity > threshold + T::floor_tol(1e-12, 16.0),
        monte_carlo,
    })
}
