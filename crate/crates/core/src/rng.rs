//! Seeded random streams.
//!
//! All randomness flows through [`SimRng`]. A run is reproducible from its
//! base seed: every consumer (environment, filter, planner, trap spawner)
//! draws from its own ChaCha stream derived from the episode seed, so adding
//! draws in one consumer never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Independent consumers of randomness inside one episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Environment = 1,
    Filter = 2,
    Planner = 3,
    Traps = 4,
    Initial = 5,
}

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn stream(seed: u64, stream: Stream) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Derives a child seed from a parent seed and an index (splitmix64 mix).
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    let mut z = parent
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
