//! Seeded randomness shared by the mixing operator, the subspace iteration
//! and the error estimator.
//!
//! All streams come from ChaCha8 keyed by a 64-bit seed, with independent
//! sub-streams selected through the ChaCha stream id. Given the same seed and
//! stream the draws are identical across runs and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::SmallDense;

/// Sub-stream ids; distinct consumers of one seed never share draws.
pub(crate) mod stream {
    pub const MIXING: u64 = 1;
    pub const GAUSSIAN_START: u64 = 2;
    pub const POWER_METHOD: u64 = 3;
}

/// Generator for `(seed, stream)`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Hashes `(seed, tag)` into a fresh seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed
        .wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniformly random permutation of `0..n` (Durstenfeld's in-place
/// Fisher-Yates shuffle).
pub fn fisher_yates<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Pair of independent standard normals by the Box-Muller transform.
fn box_muller<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // 1 - u lies in (0, 1], keeping the logarithm finite.
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}

/// `len` i.i.d. standard normal draws.
pub fn standard_normals<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(len + 1);
    while out.len() < len {
        let (a, b) = box_muller(rng);
        out.push(a);
        out.push(b);
    }
    out.truncate(len);
    out
}

/// `rows × cols` matrix of i.i.d. standard normals, filled column by column.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> SmallDense {
    let draws = standard_normals(rows * cols, rng);
    SmallDense::from_fn(rows, cols, |i, j| draws[j * rows + i])
}
