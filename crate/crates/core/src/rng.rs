//! Seeded randomness. Every stream is a ChaCha8 generator so a given seed
//! reproduces the same draws on every platform.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::StateVector;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Child seed for worker `index` of a parent stream (splitmix64 mix).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian(rng: &mut Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Uniformly distributed unit vector in `C^dim`.
pub fn unit_vector(dim: usize, rng: &mut Rng) -> StateVector {
    loop {
        let v = StateVector::from_iterator(dim, (0..dim).map(|_| complex_gaussian(rng)));
        let n = v.norm();
        if n > 1e-150 {
            return v / Complex64::new(n, 0.0);
        }
    }
}
