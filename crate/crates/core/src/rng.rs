//! Seeded random streams.
//!
//! Every stochastic computation starts from one 64-bit master seed. Work is
//! split into fixed-size chunks and chunk `k` draws from the ChaCha8 stream
//! number `k` of that seed, so results do not depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn master(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
