//! Reproducible RNG streams.
//!
//! Every replication of an experiment gets its own stream so that
//! replication-level parallelism cannot change results. The scheme is fixed:
//!
//! ```text
//! stream_seed(i) = splitmix64(master_seed XOR i)
//! rng(i)         = ChaCha12Rng::seed_from_u64(stream_seed(i))
//! ```

use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;

/// One round of the SplitMix64 output function.
pub fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for replication `index` under `master_seed`.
pub fn stream_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ index)
}

/// RNG for replication `index` under `master_seed`.
pub fn stream_rng(master_seed: u64, index: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(stream_seed(master_seed, index))
}

/// RNG from a bare seed (CLI entry points).
pub fn seed_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}
