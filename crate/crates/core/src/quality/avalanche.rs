//! Strict avalanche: how often flipping one input bit flips each output bit.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::hashing::HashFunction;
use crate::rng;

pub const MIN_AVALANCHE_SAMPLES: usize = 10_000;

/// Flip counts for every (input bit, output bit) pair.
#[derive(Debug, Clone)]
pub struct AvalancheMatrix {
    pub input_bits: usize,
    pub output_bits: usize,
    pub samples: u64,
    /// Row-major `[input_bit][output_bit]`.
    pub flips: Vec<u64>,
}

impl AvalancheMatrix {
    pub fn probability(&self, input_bit: usize, output_bit: usize) -> f64 {
        self.flips[input_bit * self.output_bits + output_bit] as f64 / self.samples as f64
    }

    /// `max_ij |2 p_ij - 1| * 100`.
    pub fn bias_pct(&self) -> f64 {
        let n = self.samples as f64;
        self.flips
            .iter()
            .map(|&c| (2.0 * c as f64 / n - 1.0).abs() * 100.0)
            .fold(0.0, f64::max)
    }
}

/// Hashes `samples` random `msg_len`-byte messages and each of their
/// single-bit neighbours.
pub fn avalanche_matrix(hash: &dyn HashFunction, msg_len: usize, samples: usize, seed: u64) -> Result<AvalancheMatrix> {
    if samples < MIN_AVALANCHE_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "avalanche needs at least {MIN_AVALANCHE_SAMPLES} samples, got {samples}"
        )));
    }
    if msg_len == 0 {
        return Err(Error::InvalidArgument("avalanche needs a nonempty message".into()));
    }
    let input_bits = msg_len * 8;
    let out_bytes = hash.digest_bytes();
    // hist[(i * out_bytes + j) * 256 + v]: times output byte j changed by xor v
    // when input bit i flipped.
    let mut hist = vec![0u32; input_bits * out_bytes * 256];
    let mut rng = rng::stream(seed, 0);
    let mut msg = vec![0u8; msg_len];
    for _ in 0..samples {
        rng.fill_bytes(&mut msg);
        let base = hash.digest(&msg);
        for i in 0..input_bits {
            msg[i / 8] ^= 1 << (i % 8);
            let d = hash.digest(&msg);
            msg[i / 8] ^= 1 << (i % 8);
            let row = &mut hist[i * out_bytes * 256..(i + 1) * out_bytes * 256];
            for (j, (a, b)) in base.as_bytes().iter().zip(d.as_bytes()).enumerate() {
                row[j * 256 + (a ^ b) as usize] += 1;
            }
        }
    }

    let output_bits = out_bytes * 8;
    let mut flips = vec![0u64; input_bits * output_bits];
    for i in 0..input_bits {
        for j in 0..out_bytes {
            let h = &hist[(i * out_bytes + j) * 256..(i * out_bytes + j + 1) * 256];
            for (v, &n) in h.iter().enumerate() {
                for bit in 0..8 {
                    if v >> bit & 1 == 1 {
                        flips[i * output_bits + j * 8 + bit] += n as u64;
                    }
                }
            }
        }
    }
    Ok(AvalancheMatrix { input_bits, output_bits, samples: samples as u64, flips })
}

/// Worst-case avalanche bias in percent.
pub fn avalanche_bias(hash: &dyn HashFunction, msg_len: usize, samples: usize, seed: u64) -> Result<f64> {
    Ok(avalanche_matrix(hash, msg_len, samples, seed)?.bias_pct())
}
