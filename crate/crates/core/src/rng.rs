//! Seeded randomness shared by the quality battery and the simulator.
//!
//! Every random stream is ChaCha8 keyed with `seed_from_u64(seed)` and
//! positioned on ChaCha stream `stream`. ChaCha output is specified
//! bit-for-bit, so reports are identical across machines.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Default seed when neither `--seed` nor `INTERMITHASH_SEED` is given.
pub const DEFAULT_SEED: u64 = 0;

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives the seed of child `index` from `seed`.
pub fn split(seed: u64, index: u64) -> u64 {
    stream(seed, index.wrapping_add(1)).next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_deterministic_and_distinct() {
        assert_eq!(split(5, 3), split(5, 3));
        let children: std::collections::HashSet<u64> = (0..1000).map(|i| split(5, i)).collect();
        assert_eq!(children.len(), 1000);
        assert_ne!(split(5, 0), split(6, 0));
    }

    #[test]
    fn streams_differ() {
        let a = stream(1, 0).next_u64();
        let b = stream(1, 1).next_u64();
        assert_ne!(a, b);
        assert_eq!(a, stream(1, 0).next_u64());
    }
}
