//! Seedable randomness for random inputs, optimizer restarts and tests.

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::state::PureState;

pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian vector (unnormalized).
pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Array1<C64> {
    Array1::from_shape_simple_fn(n, || {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Haar-random pure state on the full product space.
pub fn haar_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> PureState {
    let n = dims.iter().product();
    loop {
        let v = gaussian_vector(n, rng);
        if let Ok(s) = PureState::from_unnormalized(dims.to_vec(), v) {
            return s;
        }
    }
}

/// Product of independent Haar-random one-mode states.
pub fn haar_product_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> PureState {
    let mut it = dims.iter();
    let first = *it.next().expect("at least one mode");
    let mut s = haar_state(&[first], rng);
    for &d in it {
        s = s.tensor(&haar_state(&[d], rng));
    }
    s
}
