//! Keyset generators.
//!
//! Every keyset is a finite, deterministic sequence of messages. Windowed
//! keysets are split into groups (one per window position); collisions are
//! only counted within a group, since the same key legitimately recurs at
//! several positions.

use rand::RngCore;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rng;

/// Largest keyset that will be enumerated.
pub const MAX_KEYSET: u64 = 1 << 34;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeysetKind {
    /// `samples` random `pattern_bytes`-long patterns, each repeated `repeats` times.
    Cyclic { pattern_bytes: usize, repeats: usize, samples: usize },
    /// Every message of length `1..=max_len` with one or two nonzero bytes.
    TwoBytes { max_len: usize },
    /// Every `msg_bits`-bit message with at most `max_set_bits` bits set.
    Sparse { msg_bits: usize, max_set_bits: usize },
    /// Every ordered arrangement of `1..=max_blocks` distinct blocks.
    Permutation { blocks: Vec<Vec<u8>>, max_blocks: usize },
    /// For each rotation of a `window_bits` window inside a `key_bits` key,
    /// every value of the window.
    Window { key_bits: usize, window_bits: usize },
    /// All-zero messages of every length `0..max_len`.
    Zeros { max_len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeysetSpec {
    pub kind: KeysetKind,
    /// Only randomized kinds use it.
    pub seed: u64,
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

fn capacity(what: &str) -> Error {
    Error::Capacity(format!("{what} keyset exceeds {MAX_KEYSET} messages"))
}

impl KeysetSpec {
    pub fn new(kind: KeysetKind, seed: u64) -> Self {
        KeysetSpec { kind, seed }
    }

    pub fn zeros(max_len: usize) -> Self {
        Self::new(KeysetKind::Zeros { max_len }, 0)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            KeysetKind::Cyclic { .. } => "cyclic",
            KeysetKind::TwoBytes { .. } => "twobytes",
            KeysetKind::Sparse { .. } => "sparse",
            KeysetKind::Permutation { .. } => "permutation",
            KeysetKind::Window { .. } => "window",
            KeysetKind::Zeros { .. } => "zeros",
        }
    }

    /// Parameters as a JSON object, for reports.
    pub fn params(&self) -> Value {
        match &self.kind {
            KeysetKind::Cyclic { pattern_bytes, repeats, samples } => json!({
                "pattern_bytes": pattern_bytes, "repeats": repeats,
                "samples": samples, "seed": self.seed,
            }),
            KeysetKind::TwoBytes { max_len } => json!({ "max_len": max_len }),
            KeysetKind::Sparse { msg_bits, max_set_bits } => {
                json!({ "msg_bits": msg_bits, "max_set_bits": max_set_bits })
            }
            KeysetKind::Permutation { blocks, max_blocks } => json!({
                "blocks": blocks.iter().map(hex::encode).collect::<Vec<_>>(),
                "max_blocks": max_blocks,
            }),
            KeysetKind::Window { key_bits, window_bits } => {
                json!({ "key_bits": key_bits, "window_bits": window_bits })
            }
            KeysetKind::Zeros { max_len } => json!({ "max_len": max_len }),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("{} keyset: {m}", self.name())));
        match &self.kind {
            KeysetKind::Cyclic { pattern_bytes, repeats, .. } if *pattern_bytes == 0 || *repeats == 0 => {
                bad("pattern and repeat counts must be positive")
            }
            KeysetKind::Sparse { msg_bits, .. } if msg_bits % 8 != 0 || *msg_bits == 0 => {
                bad("message bits must be a positive multiple of 8")
            }
            KeysetKind::Permutation { blocks, max_blocks } if *max_blocks > blocks.len() => {
                bad("more blocks per message than distinct blocks")
            }
            KeysetKind::Window { key_bits, window_bits }
                if key_bits % 8 != 0 || *key_bits == 0 || *key_bits > 128 || *window_bits > *key_bits =>
            {
                bad("key bits must be a multiple of 8 in 8..=128 and hold the window")
            }
            _ => Ok(()),
        }
    }

    /// Number of messages, rejecting keysets larger than [`MAX_KEYSET`].
    pub fn count(&self) -> Result<u64> {
        self.validate()?;
        let n = match &self.kind {
            KeysetKind::Cyclic { samples, .. } => Some(*samples as u64),
            KeysetKind::Zeros { max_len } => Some(*max_len as u64),
            KeysetKind::TwoBytes { max_len } => (1..=*max_len as u64).try_fold(0u64, |acc, l| {
                let pairs = binomial(l, 2)?.checked_mul(255 * 255)?;
                acc.checked_add(255 * l)?.checked_add(pairs)
            }),
            KeysetKind::Sparse { msg_bits, max_set_bits } => {
                (0..=*max_set_bits as u64).try_fold(0u64, |acc, k| acc.checked_add(binomial(*msg_bits as u64, k)?))
            }
            KeysetKind::Permutation { blocks, max_blocks } => {
                let n = blocks.len() as u64;
                let mut total = 0u64;
                let mut arrangements = 1u64;
                let mut ok = true;
                for k in 0..*max_blocks as u64 {
                    match arrangements.checked_mul(n - k) {
                        Some(a) => arrangements = a,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                    total = match total.checked_add(arrangements) {
                        Some(t) => t,
                        None => {
                            ok = false;
                            break;
                        }
                    };
                }
                ok.then_some(total)
            }
            KeysetKind::Window { key_bits, window_bits } => 1u64
                .checked_shl(*window_bits as u32)
                .filter(|_| *window_bits < 64)
                .and_then(|w| w.checked_mul(*key_bits as u64)),
        };
        match n {
            Some(n) if n <= MAX_KEYSET => Ok(n),
            _ => Err(capacity(self.name())),
        }
    }

    /// Number of collision groups.
    pub fn groups(&self) -> usize {
        match self.kind {
            KeysetKind::Window { key_bits, .. } => key_bits,
            _ => 1,
        }
    }

    /// Largest group size.
    pub fn max_group_len(&self) -> Result<u64> {
        Ok(self.count()? / self.groups() as u64)
    }

    /// Calls `f(group, message)` for every message, in a fixed order.
    pub fn visit(&self, f: &mut dyn FnMut(usize, &[u8])) -> Result<()> {
        self.count()?;
        match &self.kind {
            KeysetKind::Cyclic { pattern_bytes, repeats, samples } => {
                let mut rng = rng::stream(self.seed, 0);
                let mut pattern = vec![0u8; *pattern_bytes];
                let mut msg = vec![0u8; pattern_bytes * repeats];
                for _ in 0..*samples {
                    rng.fill_bytes(&mut pattern);
                    for chunk in msg.chunks_exact_mut(*pattern_bytes) {
                        chunk.copy_from_slice(&pattern);
                    }
                    f(0, &msg);
                }
            }
            KeysetKind::TwoBytes { max_len } => {
                for len in 1..=*max_len {
                    let mut msg = vec![0u8; len];
                    for i in 0..len {
                        for a in 1..=255u8 {
                            msg[i] = a;
                            f(0, &msg);
                        }
                        msg[i] = 0;
                    }
                    for i in 0..len {
                        for j in i + 1..len {
                            for a in 1..=255u8 {
                                msg[i] = a;
                                for b in 1..=255u8 {
                                    msg[j] = b;
                                    f(0, &msg);
                                }
                            }
                            msg[i] = 0;
                            msg[j] = 0;
                        }
                    }
                }
            }
            KeysetKind::Sparse { msg_bits, max_set_bits } => {
                let mut msg = vec![0u8; msg_bits / 8];
                for k in 0..=*max_set_bits {
                    for_each_combination(*msg_bits, k, &mut |bits| {
                        for &b in bits {
                            msg[b / 8] ^= 1 << (b % 8);
                        }
                        f(0, &msg);
                        for &b in bits {
                            msg[b / 8] ^= 1 << (b % 8);
                        }
                    });
                }
            }
            KeysetKind::Permutation { blocks, max_blocks } => {
                let mut msg = Vec::new();
                for k in 1..=*max_blocks {
                    for_each_arrangement(blocks.len(), k, &mut |idx| {
                        msg.clear();
                        for &i in idx {
                            msg.extend_from_slice(&blocks[i]);
                        }
                        f(0, &msg);
                    });
                }
            }
            KeysetKind::Window { key_bits, window_bits } => {
                let bytes = key_bits / 8;
                let mask = if *key_bits == 128 { u128::MAX } else { (1u128 << key_bits) - 1 };
                for pos in 0..*key_bits {
                    for v in 0..1u128 << window_bits {
                        let key = if pos == 0 {
                            v
                        } else {
                            ((v << pos) | (v >> (key_bits - pos))) & mask
                        };
                        f(pos, &key.to_le_bytes()[..bytes]);
                    }
                }
            }
            KeysetKind::Zeros { max_len } => {
                let zeros = vec![0u8; *max_len];
                for len in 0..*max_len {
                    f(0, &zeros[..len]);
                }
            }
        }
        Ok(())
    }

    /// Collects every message. Intended for small keysets.
    pub fn messages(&self) -> Result<Vec<Vec<u8>>> {
        let mut out = Vec::with_capacity(self.count()? as usize);
        self.visit(&mut |_, m| out.push(m.to_vec()))?;
        Ok(out)
    }
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Visits every ordered `k`-arrangement of distinct elements of `0..n`.
fn for_each_arrangement(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(n: usize, k: usize, used: &mut [bool], cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(n, k, used, cur, f);
                cur.pop();
                used[i] = false;
            }
        }
    }
    go(n, k, &mut vec![false; n], &mut Vec::with_capacity(k), f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn zeros_enumerates_lengths() {
        let msgs = KeysetSpec::zeros(65536).messages().unwrap();
        assert_eq!(msgs.len(), 65536);
        for (i, m) in msgs.iter().enumerate() {
            assert_eq!(m.len(), i);
            assert!(m.iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn twobytes_count_matches_closed_form_and_exhaustive_search() {
        // Exhaustive over every string of length 1..=3.
        let mut brute = 0u64;
        for len in 1..=3u32 {
            for v in 0..256u32.pow(len) {
                let nz = (0..len).filter(|i| (v >> (8 * i)) & 0xff != 0).count();
                if nz == 1 || nz == 2 {
                    brute += 1;
                }
            }
        }
        let spec = KeysetSpec::new(KeysetKind::TwoBytes { max_len: 3 }, 0);
        assert_eq!(spec.count().unwrap(), brute);
        let msgs = spec.messages().unwrap();
        assert_eq!(msgs.len() as u64, brute);
        assert_eq!(msgs.iter().collect::<HashSet<_>>().len() as u64, brute);

        let four = KeysetSpec::new(KeysetKind::TwoBytes { max_len: 4 }, 0);
        // 255 * (1+2+3+4) + 255^2 * (0+1+3+6)
        assert_eq!(four.count().unwrap(), 652_800);
        let msgs = four.messages().unwrap();
        assert_eq!(msgs.len(), 652_800);
        assert!(msgs.iter().all(|m| {
            let nz = m.iter().filter(|&&b| b != 0).count();
            (1..=4).contains(&m.len()) && (nz == 1 || nz == 2)
        }));
    }

    #[test]
    fn sparse_count() {
        let spec = KeysetSpec::new(KeysetKind::Sparse { msg_bits: 32, max_set_bits: 2 }, 0);
        assert_eq!(spec.count().unwrap(), 529);
        let msgs = spec.messages().unwrap();
        let distinct: HashSet<_> = msgs.iter().collect();
        assert_eq!(distinct.len(), 529);
        // Brute force over all 32-bit values would be 2^32; check the popcount instead.
        assert!(msgs.iter().all(|m| m.iter().map(|b| b.count_ones()).sum::<u32>() <= 2));
        let desk = KeysetSpec::new(KeysetKind::Sparse { msg_bits: 512, max_set_bits: 3 }, 0);
        assert_eq!(desk.count().unwrap(), 1 + 512 + 130_816 + 22_238_720);
    }

    #[test]
    fn permutation_count() {
        let blocks: Vec<Vec<u8>> = (0..8u32).map(|v| v.to_le_bytes().to_vec()).collect();
        let spec = KeysetSpec::new(KeysetKind::Permutation { blocks, max_blocks: 8 }, 0);
        assert_eq!(spec.count().unwrap(), 109_600);
        let msgs = spec.messages().unwrap();
        assert_eq!(msgs.iter().collect::<HashSet<_>>().len(), 109_600);
        assert_eq!(msgs.iter().filter(|m| m.len() == 32).count(), 40_320);
    }

    #[test]
    fn window_groups() {
        let spec = KeysetSpec::new(KeysetKind::Window { key_bits: 16, window_bits: 4 }, 0);
        assert_eq!(spec.count().unwrap(), 16 * 16);
        let mut per_group = vec![HashSet::new(); 16];
        spec.visit(&mut |g, m| {
            assert_eq!(m.len(), 2);
            per_group[g].insert(m.to_vec());
        })
        .unwrap();
        assert!(per_group.iter().all(|s| s.len() == 16));
        // Position 14 wraps: value 0b1111 occupies bits 14, 15, 0, 1.
        assert!(per_group[14].contains(&vec![0b0000_0011, 0b1100_0000]));
    }

    #[test]
    fn cyclic_is_seeded() {
        let spec = |seed| KeysetSpec::new(KeysetKind::Cyclic { pattern_bytes: 4, repeats: 3, samples: 50 }, seed);
        let a = spec(1).messages().unwrap();
        assert_eq!(a, spec(1).messages().unwrap());
        assert_ne!(a, spec(2).messages().unwrap());
        assert!(a.iter().all(|m| m.len() == 12 && m[..4] == m[4..8] && m[4..8] == m[8..]));
    }

    #[test]
    fn oversized_keysets_are_rejected() {
        let huge = KeysetSpec::new(KeysetKind::Sparse { msg_bits: 4096, max_set_bits: 6 }, 0);
        assert!(matches!(huge.count(), Err(Error::Capacity(_))));
        let win = KeysetSpec::new(KeysetKind::Window { key_bits: 128, window_bits: 40 }, 0);
        assert!(matches!(win.count(), Err(Error::Capacity(_))));
        let bad = KeysetSpec::new(KeysetKind::Sparse { msg_bits: 12, max_set_bits: 1 }, 0);
        assert!(matches!(bad.count(), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn combinations_in_order() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, &mut |c| seen.push(c.to_vec()));
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut n = 0;
        for_each_combination(5, 0, &mut |c| {
            assert!(c.is_empty());
            n += 1
        });
        assert_eq!(n, 1);
    }
}
