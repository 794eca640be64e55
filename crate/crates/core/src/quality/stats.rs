//! Collision counting and per-bit distribution bias over a keyset.

use crate::error::{Error, Result};
use crate::hashing::{Digest, HashFunction};
use crate::quality::keyset::{KeysetKind, KeysetSpec};

/// Default ceiling on digest storage for one collision group.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

/// Digests stored compactly for sorting.
enum DigestSink {
    Narrow(Vec<u128>),
    Wide(Vec<[u8; 32]>),
}

impl DigestSink {
    fn new(digest_bytes: usize, capacity: usize) -> Self {
        if digest_bytes <= 16 {
            DigestSink::Narrow(Vec::with_capacity(capacity))
        } else {
            DigestSink::Wide(Vec::with_capacity(capacity))
        }
    }

    #[inline]
    fn push(&mut self, d: &Digest) {
        match self {
            DigestSink::Narrow(v) => {
                let mut b = [0u8; 16];
                b[..d.len()].copy_from_slice(d.as_bytes());
                v.push(u128::from_le_bytes(b));
            }
            DigestSink::Wide(v) => {
                let mut b = [0u8; 32];
                b[..d.len()].copy_from_slice(d.as_bytes());
                v.push(b);
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            DigestSink::Narrow(v) => v.len(),
            DigestSink::Wide(v) => v.len(),
        }
    }

    /// Samples minus distinct values; empties the sink.
    fn drain_collisions(&mut self) -> u64 {
        fn dup<T: Ord>(v: &mut Vec<T>) -> u64 {
            let n = v.len();
            v.sort_unstable();
            v.dedup();
            let c = (n - v.len()) as u64;
            v.clear();
            c
        }
        match self {
            DigestSink::Narrow(v) => dup(v),
            DigestSink::Wide(v) => dup(v),
        }
    }
}

/// Per-bit set counts, accumulated per byte value to keep the inner loop short.
#[derive(Clone)]
pub(crate) struct BitBalance {
    byte_hist: Vec<[u64; 256]>,
    samples: u64,
}

impl BitBalance {
    pub(crate) fn new(digest_bytes: usize) -> Self {
        BitBalance { byte_hist: vec![[0; 256]; digest_bytes], samples: 0 }
    }

    #[inline]
    pub(crate) fn add(&mut self, d: &Digest) {
        for (h, &b) in self.byte_hist.iter_mut().zip(d.as_bytes()) {
            h[b as usize] += 1;
        }
        self.samples += 1;
    }

    pub(crate) fn ones(&self) -> Vec<u64> {
        let mut ones = vec![0u64; self.byte_hist.len() * 8];
        for (i, hist) in self.byte_hist.iter().enumerate() {
            for (v, &n) in hist.iter().enumerate() {
                for bit in 0..8 {
                    if v >> bit & 1 == 1 {
                        ones[i * 8 + bit] += n;
                    }
                }
            }
        }
        ones
    }

    /// `max_j |2 p_j - 1| * 100`.
    pub(crate) fn bias_pct(&self) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        let n = self.samples as f64;
        self.ones()
            .into_iter()
            .map(|c| (2.0 * c as f64 / n - 1.0).abs() * 100.0)
            .fold(0.0, f64::max)
    }
}

/// Result of running one keyset through one hash.
#[derive(Debug, Clone, PartialEq)]
pub struct KeysetStats {
    pub sample_count: u64,
    pub collisions: u64,
    pub distribution_bias_pct: f64,
}

/// Hashes every message of `keyset` once, counting collisions within each
/// group and accumulating per-bit balance over all digests.
pub fn analyze(hash: &dyn HashFunction, keyset: &KeysetSpec, memory_budget: u64) -> Result<KeysetStats> {
    let group_len = keyset.max_group_len()?;
    let digest_bytes = hash.digest_bytes();
    let need = group_len.saturating_mul(digest_bytes.next_power_of_two().max(16) as u64);
    if need > memory_budget {
        return Err(Error::Capacity(format!(
            "{} keyset needs {need} bytes of digests, budget is {memory_budget}",
            keyset.name()
        )));
    }
    let mut balance = BitBalance::new(digest_bytes);

    if let KeysetKind::Zeros { max_len } = keyset.kind {
        // Zeros(L) is the prefix family of L-1 zero bytes.
        if max_len == 0 {
            return Ok(KeysetStats { sample_count: 0, collisions: 0, distribution_bias_pct: 0.0 });
        }
        let digests = hash.prefix_digests(&vec![0u8; max_len - 1]);
        let mut sink = DigestSink::new(digest_bytes, digests.len());
        for d in &digests {
            sink.push(d);
            balance.add(d);
        }
        return Ok(KeysetStats {
            sample_count: digests.len() as u64,
            collisions: sink.drain_collisions(),
            distribution_bias_pct: balance.bias_pct(),
        });
    }

    let mut sink = DigestSink::new(digest_bytes, group_len as usize);
    let mut group = 0;
    let mut collisions = 0u64;
    let mut samples = 0u64;
    keyset.visit(&mut |g, msg| {
        if g != group {
            collisions += sink.drain_collisions();
            group = g;
        }
        let d = hash.digest(msg);
        sink.push(&d);
        balance.add(&d);
        samples += 1;
    })?;
    if sink.len() > 0 {
        collisions += sink.drain_collisions();
    }
    Ok(KeysetStats { sample_count: samples, collisions, distribution_bias_pct: balance.bias_pct() })
}

/// `sample_count - distinct digests`, summed over groups.
pub fn count_collisions(hash: &dyn HashFunction, keyset: &KeysetSpec) -> Result<u64> {
    Ok(analyze(hash, keyset, DEFAULT_MEMORY_BUDGET)?.collisions)
}

/// Worst per-bit imbalance of the digests, in percent.
pub fn distribution_bias(hash: &dyn HashFunction, keyset: &KeysetSpec) -> Result<f64> {
    let n = keyset.count()?;
    if n < 1000 {
        return Err(Error::InvalidArgument(format!(
            "distribution needs at least 1000 samples, keyset has {n}"
        )));
    }
    Ok(analyze(hash, keyset, DEFAULT_MEMORY_BUDGET)?.distribution_bias_pct)
}
