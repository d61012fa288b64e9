//! Seeding conventions.
//!
//! Every stochastic quantity is reproducible from `(seed, index)`: each sample
//! or trial draws from its own ChaCha stream, so results do not depend on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Prng = ChaCha8Rng;

pub fn from_seed(seed: u64) -> Prng {
    Prng::seed_from_u64(seed)
}

/// Independent generator for item `index` of a run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> Prng {
    let mut rng = Prng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derive a child seed for a named sub-run (cell, POM index, ...).
pub fn child_seed(seed: u64, tag: &[u64]) -> u64 {
    // splitmix64 over the tag words
    let mut z = seed;
    for &t in tag {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(t);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}
