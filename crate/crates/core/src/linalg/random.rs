//! Seeded sampling: complex Gaussians and Haar-random pure states.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::PureState;
use crate::scalar::{Real, C};

/// Counter-based generator used for every random draw in the crate.
pub type Rng64 = ChaCha8Rng;

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> Rng64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Complex normal with independent unit-variance real and imaginary parts.
pub fn standard_complex_gaussian<T: Real>(rng: &mut impl Rng) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im))
}

pub(crate) fn haar_from_rng<T: Real>(d: usize, rng: &mut impl Rng) -> PureState<T> {
    loop {
        let v: Vec<C<T>> = (0..d).map(|_| standard_complex_gaussian(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Haar-distributed pure state on `C^d`, deterministic in `seed`.
pub fn haar_random_pure<T: Real>(d: usize, seed: u64) -> PureState<T> {
    assert!(d >= 1, "dimension must be positive");
    haar_from_rng(d, &mut seeded_rng(seed, 0))
}
