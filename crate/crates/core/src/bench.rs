//! Throughput measurement with deterministic work counters.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::{HashAlgorithm, StreamHasher};
use crate::rng;

pub const DEFAULT_REPETITIONS: usize = 30;
pub const DEFAULT_WARMUP: usize = 5;
/// Bytes hashed per timed batch, so short messages are not timed one by one.
const BATCH_BYTES: usize = 64 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MsgClass {
    Short,
    Long,
}

impl MsgClass {
    pub const ALL: [MsgClass; 2] = [MsgClass::Short, MsgClass::Long];

    pub fn bytes(self) -> usize {
        match self {
            MsgClass::Short => 10,
            MsgClass::Long => 1280,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MsgClass::Short => "short",
            MsgClass::Long => "long",
        }
    }
}

impl fmt::Display for MsgClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MsgClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "short" => Ok(MsgClass::Short),
            "long" => Ok(MsgClass::Long),
            _ => Err(Error::InvalidArgument(format!("unknown message class `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub hash: String,
    pub class: MsgClass,
    pub ns_per_byte: f64,
    pub compressions: u64,
    pub cipher_calls: u64,
    pub state_bytes: u64,
}

/// The message hashed for `(hash, class, seed)`.
pub fn bench_message(hash: HashAlgorithm, class: MsgClass, seed: u64) -> Vec<u8> {
    let mut msg = vec![0u8; class.bytes()];
    let stream = hash as u64 * 2 + class as u64;
    rng::stream(seed, stream).fill_bytes(&mut msg);
    msg
}

/// Median time per byte over `repetitions` batches, after `warmup`
/// untimed batches.
pub fn bench_hash(hash: HashAlgorithm, class: MsgClass, repetitions: usize, warmup: usize, seed: u64) -> Result<BenchResult> {
    if repetitions == 0 {
        return Err(Error::InvalidArgument("need at least one repetition".into()));
    }
    let msg = bench_message(hash, class, seed);

    let mut h = hash.hasher();
    h.update(&msg);
    let state_bytes = h.state_bytes() as u64;
    let (_, counts) = h.finalize_counted();

    let per_batch = (BATCH_BYTES / msg.len()).max(1);
    let run_batch = || {
        for _ in 0..per_batch {
            let mut h = hash.hasher();
            h.update(black_box(&msg));
            black_box(h.finalize());
        }
    };
    for _ in 0..warmup {
        run_batch();
    }
    let mut times: Vec<f64> = (0..repetitions)
        .map(|_| {
            let t0 = Instant::now();
            run_batch();
            t0.elapsed().as_nanos() as f64
        })
        .collect();
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    let median = if times.len() % 2 == 1 { times[mid] } else { (times[mid - 1] + times[mid]) / 2.0 };
    let ns_per_byte = (median / (per_batch * msg.len()) as f64).max(f64::MIN_POSITIVE);

    Ok(BenchResult {
        hash: hash.name().to_string(),
        class,
        ns_per_byte,
        compressions: counts.compressions,
        cipher_calls: counts.cipher_calls,
        state_bytes,
    })
}

pub fn bench_named(name: &str, class: MsgClass, repetitions: usize, warmup: usize, seed: u64) -> Result<BenchResult> {
    bench_hash(HashAlgorithm::from_name(name)?, class, repetitions, warmup, seed)
}
