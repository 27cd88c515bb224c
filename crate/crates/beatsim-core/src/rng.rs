//! Reproducible RNG seeding for parallel ensembles.
//!
//! Every trajectory owns its own generator, seeded from the ensemble master
//! seed and the trajectory index through a fixed mixing function. Results
//! are therefore independent of scheduling order: trajectory `k` produces
//! the same record whether run serially, in parallel, or alone.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// Generator used by all stochastic code in this crate.
pub type TrajectoryRng = ChaCha8Rng;

/// SplitMix64 finalizer; full-avalanche 64-bit mix.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Seed for trajectory `index` of an ensemble with the given master seed.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ splitmix64(index.wrapping_add(1)))
}

/// Generator for a derived seed.
pub fn trajectory_rng(seed: u64) -> TrajectoryRng {
    TrajectoryRng::seed_from_u64(seed)
}
