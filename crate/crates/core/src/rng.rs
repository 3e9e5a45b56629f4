//! Counter-based random substreams.
//!
//! Every random draw in the crate is addressed by `(seed, domain, index)`.
//! The same address always produces the same stream, independent of which
//! thread evaluates it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg;

/// Separates the streams used by different estimators sharing one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Sphere = 0x5350_4845,
    Plane = 0x504c_414e,
    Volume = 0x564f_4c55,
    Instance = 0x494e_5354,
    Restart = 0x5245_5354,
    Grid = 0x4752_4944,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed, e.g. for a campaign instance that runs its own
/// estimators.
pub fn derive_seed(seed: u64, domain: Domain, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ domain as u64) ^ splitmix64(index.wrapping_add(1)))
}

pub fn substream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ domain as u64));
    rng.set_stream(index);
    rng
}

pub fn gaussian_vector<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Uniform direction on `S^{n-1}` from a normalized isotropic Gaussian.
pub fn unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let g = gaussian_vector(rng, n);
        if let Some(u) = linalg::normalized(&g) {
            return u;
        }
    }
}
