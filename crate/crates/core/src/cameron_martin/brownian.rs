//! Counter-keyed Brownian sampling: the stream for `(seed, sample_index)`
//! is a ChaCha8 generator seeded by `seed` on stream `sample_index`, read
//! in step order. No state is shared between samples, so any partition of
//! sample indices across workers yields the same paths.

use super::path::GridPath;
use crate::error::{Error, Result};
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn sample_rng(seed: u64, sample_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    rng
}

/// Standard normal increments `ξ_j ∈ R³`, `j = 1..=n`, for one sample.
pub fn normal_increments(n: usize, seed: u64, sample_index: u64) -> Vec<[f64; 3]> {
    let mut rng = sample_rng(seed, sample_index);
    (0..n)
        .map(|_| [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)])
        .collect()
}

/// `ω(t_j) = ω(t_{j−1}) + √(t/n)·ξ_j`.
pub fn sample_brownian<T: Real>(
    n: usize,
    t: T,
    seed: u64,
    sample_index: u64,
) -> Result<GridPath<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let sd = (t.to_f64_lossy() / n as f64).sqrt();
    let mut values = Vec::with_capacity(n + 1);
    let mut cur = [0.0f64; 3];
    values.push([T::zero(); 3]);
    for xi in normal_increments(n, seed, sample_index) {
        for i in 0..3 {
            cur[i] += sd * xi[i];
        }
        values.push([T::lit(cur[0]), T::lit(cur[1]), T::lit(cur[2])]);
    }
    GridPath::new(t, values)
}
