//! Differential collisions: random pairs of keys that differ in exactly a
//! chosen set of bit positions.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::HashFunction;
use crate::quality::keyset::for_each_combination;
use crate::rng;

pub const DEFAULT_PAIRS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialReport {
    pub key_bytes: usize,
    pub n_bits: usize,
    /// Pairs hashed in total, over all subsets.
    pub pairs: u64,
    pub collisions: u64,
}

/// For every `n_bits`-subset of the bit positions of a `key_bytes` key,
/// hashes `pairs_per_subset` random pairs differing exactly in that subset
/// and counts pairs with equal digests.
pub fn differential_test(
    hash: &dyn HashFunction,
    key_bytes: usize,
    n_bits: usize,
    pairs_per_subset: usize,
    seed: u64,
) -> Result<DifferentialReport> {
    let bits = key_bytes * 8;
    if n_bits == 0 || n_bits > bits {
        return Err(Error::InvalidArgument(format!(
            "differential needs 1..={bits} flipped bits, got {n_bits}"
        )));
    }
    if n_bits > 3 {
        return Err(Error::Capacity(format!("differential with {n_bits} bits is too large")));
    }
    let mut rng = rng::stream(seed, 0);
    let mut key = vec![0u8; key_bytes];
    let mut flipped = vec![0u8; key_bytes];
    let mut pairs = 0u64;
    let mut collisions = 0u64;
    for_each_combination(bits, n_bits, &mut |subset| {
        for _ in 0..pairs_per_subset {
            rng.fill_bytes(&mut key);
            flipped.copy_from_slice(&key);
            for &b in subset {
                flipped[b / 8] ^= 1 << (b % 8);
            }
            if hash.digest(&key) == hash.digest(&flipped) {
                collisions += 1;
            }
            pairs += 1;
        }
    });
    Ok(DifferentialReport { key_bytes, n_bits, pairs, collisions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::HashAlgorithm;
    use crate::quality::stubs::{ConstantHash, XorFoldHash};

    #[test]
    fn xor_fold_collides_on_aligned_pairs() {
        // A 2-byte fold of an 8-byte key: flipping bits b1 and b2 cancels iff
        // they land on the same fold position.
        let h = XorFoldHash(2);
        let r = differential_test(&h, 8, 2, 10, 5).unwrap();
        let mut aligned = 0;
        for a in 0..64 {
            for b in a + 1..64 {
                if a % 16 == b % 16 {
                    aligned += 1;
                }
            }
        }
        assert_eq!(aligned, 16 * 6);
        assert_eq!(r.pairs, 2016 * 10);
        assert_eq!(r.collisions, aligned * 10);
        assert_eq!(differential_test(&h, 8, 1, 10, 5).unwrap().collisions, 0);
    }

    #[test]
    fn constant_always_collides() {
        let r = differential_test(&ConstantHash(16), 2, 1, 7, 0).unwrap();
        assert_eq!((r.pairs, r.collisions), (16 * 7, 16 * 7));
    }

    #[test]
    fn real_hashes_do_not_collide() {
        for h in [HashAlgorithm::Md5, HashAlgorithm::DmSpeck128] {
            let r = differential_test(&h, 8, 1, 100, 0).unwrap();
            assert_eq!(r.pairs, 6400);
            assert_eq!(r.collisions, 0);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = differential_test(&XorFoldHash(1), 4, 2, 50, 11).unwrap();
        let b = differential_test(&XorFoldHash(1), 4, 2, 50, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_bit_counts() {
        assert!(differential_test(&ConstantHash(4), 1, 0, 1, 0).is_err());
        assert!(differential_test(&ConstantHash(4), 1, 9, 1, 0).is_err());
    }
}
