//! The SPECK block cipher family, forward direction only.
//!
//! Two variants are provided: Speck64/128 (32-bit words, 27 rounds) and
//! Speck128/128 (64-bit words, 32 rounds). Words are packed little-endian
//! and a block is serialized as `y ∥ x`, key as `k0 ∥ l0 ∥ l1 ∥ ...`, which
//! is the byte convention of the designers' reference code. Under that
//! convention the published test vectors apply bit-exactly.

use crate::error::{Error, Result};

/// Largest block (and key) size supported, in bytes.
pub const MAX_BLOCK_BYTES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpeckVariant {
    /// 64-bit block, 128-bit key, 27 rounds.
    Speck64_128,
    /// 128-bit block, 128-bit key, 32 rounds.
    Speck128_128,
}

impl SpeckVariant {
    pub const fn block_bits(self) -> usize {
        match self {
            SpeckVariant::Speck64_128 => 64,
            SpeckVariant::Speck128_128 => 128,
        }
    }

    pub const fn key_bits(self) -> usize {
        128
    }

    pub const fn word_bits(self) -> usize {
        self.block_bits() / 2
    }

    pub const fn rounds(self) -> usize {
        match self {
            SpeckVariant::Speck64_128 => 27,
            SpeckVariant::Speck128_128 => 32,
        }
    }

    pub const fn block_bytes(self) -> usize {
        self.block_bits() / 8
    }

    pub const fn key_bytes(self) -> usize {
        self.key_bits() / 8
    }

    pub fn name(self) -> &'static str {
        match self {
            SpeckVariant::Speck64_128 => "speck64/128",
            SpeckVariant::Speck128_128 => "speck128/128",
        }
    }
}

/// A key of exactly `key_bits / 8` bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherKey {
    variant: SpeckVariant,
    bytes: [u8; 16],
}

impl CipherKey {
    pub fn new(variant: SpeckVariant, bytes: &[u8]) -> Result<Self> {
        check_len("key", bytes.len(), variant.key_bytes())?;
        let mut buf = [0u8; 16];
        buf.copy_from_slice(bytes);
        Ok(CipherKey { variant, bytes: buf })
    }

    pub fn variant(&self) -> SpeckVariant {
        self.variant
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes[..self.variant.key_bytes()]
    }
}

/// One cipher block of exactly `block_bits / 8` bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    bytes: [u8; MAX_BLOCK_BYTES],
    len: u8,
}

impl Block {
    pub fn new(variant: SpeckVariant, bytes: &[u8]) -> Result<Self> {
        check_len("block", bytes.len(), variant.block_bytes())?;
        Ok(Self::from_slice(bytes))
    }

    pub fn zero(variant: SpeckVariant) -> Self {
        Block { bytes: [0; MAX_BLOCK_BYTES], len: variant.block_bytes() as u8 }
    }

    /// Builds a block from the little-endian words `(x, y)`.
    pub fn from_words(variant: SpeckVariant, x: u64, y: u64) -> Self {
        let mut b = Self::zero(variant);
        match variant {
            SpeckVariant::Speck64_128 => {
                b.bytes[..4].copy_from_slice(&(y as u32).to_le_bytes());
                b.bytes[4..8].copy_from_slice(&(x as u32).to_le_bytes());
            }
            SpeckVariant::Speck128_128 => {
                b.bytes[..8].copy_from_slice(&y.to_le_bytes());
                b.bytes[8..16].copy_from_slice(&x.to_le_bytes());
            }
        }
        b
    }

    /// Returns the block's `(x, y)` words.
    pub fn words(&self) -> (u64, u64) {
        let half = self.len as usize / 2;
        let word = |s: &[u8]| {
            let mut w = [0u8; 8];
            w[..s.len()].copy_from_slice(s);
            u64::from_le_bytes(w)
        };
        (word(&self.bytes[half..2 * half]), word(&self.bytes[..half]))
    }

    pub(crate) fn from_slice(bytes: &[u8]) -> Self {
        let mut buf = [0u8; MAX_BLOCK_BYTES];
        buf[..bytes.len()].copy_from_slice(bytes);
        Block { bytes: buf, len: bytes.len() as u8 }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes[..self.len as usize]
    }

    pub(crate) fn as_bytes_mut(&mut self) -> &mut [u8] {
        &mut self.bytes[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::InvalidArgument(format!(
            "{what} is {got} bytes, expected {want}"
        )));
    }
    Ok(())
}

/// Round keys produced by the key schedule, one per round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundKeys {
    W32(Vec<u32>),
    W64(Vec<u64>),
}

impl RoundKeys {
    pub fn len(&self) -> usize {
        match self {
            RoundKeys::W32(k) => k.len(),
            RoundKeys::W64(k) => k.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Round key `i` widened to 64 bits.
    pub fn get(&self, i: usize) -> Option<u64> {
        match self {
            RoundKeys::W32(k) => k.get(i).map(|&w| w as u64),
            RoundKeys::W64(k) => k.get(i).copied(),
        }
    }
}

#[inline(always)]
fn round32(x: &mut u32, y: &mut u32, k: u32) {
    *x = x.rotate_right(8).wrapping_add(*y) ^ k;
    *y = y.rotate_left(3) ^ *x;
}

#[inline(always)]
fn round64(x: &mut u64, y: &mut u64, k: u64) {
    *x = x.rotate_right(8).wrapping_add(*y) ^ k;
    *y = y.rotate_left(3) ^ *x;
}

fn key_words32(key: &[u8]) -> [u32; 4] {
    let mut w = [0u32; 4];
    for (i, c) in key.chunks_exact(4).enumerate() {
        w[i] = u32::from_le_bytes(c.try_into().unwrap());
    }
    w
}

fn key_words64(key: &[u8]) -> [u64; 2] {
    [
        u64::from_le_bytes(key[..8].try_into().unwrap()),
        u64::from_le_bytes(key[8..16].try_into().unwrap()),
    ]
}

/// Expands `key` into the per-round keys of `variant`.
pub fn speck_key_schedule(variant: SpeckVariant, key: &CipherKey) -> Result<RoundKeys> {
    check_len("key", key.as_bytes().len(), variant.key_bytes())?;
    let rounds = variant.rounds();
    Ok(match variant {
        SpeckVariant::Speck64_128 => {
            let [mut k, l0, l1, l2] = key_words32(key.as_bytes());
            let mut l = [l0, l1, l2];
            let mut out = Vec::with_capacity(rounds);
            for i in 0..rounds {
                out.push(k);
                round32(&mut l[i % 3], &mut k, i as u32);
            }
            RoundKeys::W32(out)
        }
        SpeckVariant::Speck128_128 => {
            let [mut k, mut l] = key_words64(key.as_bytes());
            let mut out = Vec::with_capacity(rounds);
            for i in 0..rounds {
                out.push(k);
                round64(&mut l, &mut k, i as u64);
            }
            RoundKeys::W64(out)
        }
    })
}

/// Encrypts one block under `key`.
pub fn speck_encrypt(variant: SpeckVariant, key: &CipherKey, plaintext: &Block) -> Result<Block> {
    check_len("key", key.as_bytes().len(), variant.key_bytes())?;
    check_len("block", plaintext.len(), variant.block_bytes())?;
    let mut out = *plaintext;
    encrypt_in_place(variant, key.as_bytes(), out.as_bytes_mut());
    Ok(out)
}

/// Encrypts `block` in place, computing round keys on the fly.
///
/// Lengths must already match the variant.
#[inline]
pub(crate) fn encrypt_in_place(variant: SpeckVariant, key: &[u8], block: &mut [u8]) {
    debug_assert_eq!(key.len(), variant.key_bytes());
    debug_assert_eq!(block.len(), variant.block_bytes());
    match variant {
        SpeckVariant::Speck64_128 => {
            let [mut k, l0, l1, l2] = key_words32(key);
            let mut l = [l0, l1, l2];
            let mut y = u32::from_le_bytes(block[..4].try_into().unwrap());
            let mut x = u32::from_le_bytes(block[4..8].try_into().unwrap());
            for i in 0..27 {
                round32(&mut x, &mut y, k);
                round32(&mut l[i % 3], &mut k, i as u32);
            }
            block[..4].copy_from_slice(&y.to_le_bytes());
            block[4..8].copy_from_slice(&x.to_le_bytes());
        }
        SpeckVariant::Speck128_128 => {
            let [mut k, mut l] = key_words64(key);
            let mut y = u64::from_le_bytes(block[..8].try_into().unwrap());
            let mut x = u64::from_le_bytes(block[8..16].try_into().unwrap());
            for i in 0..32 {
                round64(&mut x, &mut y, k);
                round64(&mut l, &mut k, i);
            }
            block[..8].copy_from_slice(&y.to_le_bytes());
            block[8..16].copy_from_slice(&x.to_le_bytes());
        }
    }
}

/// A block cipher usable as the `E` of a compression function.
pub trait BlockCipher: Clone + Send + Sync {
    fn block_bytes(&self) -> usize;
    fn key_bytes(&self) -> usize;
    fn name(&self) -> String;
    /// Encrypts `block` under `key` in place. Lengths are checked by callers.
    fn encrypt_block(&self, key: &[u8], block: &mut [u8]);
}

/// SPECK bound to one variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Speck(pub SpeckVariant);

impl BlockCipher for Speck {
    fn block_bytes(&self) -> usize {
        self.0.block_bytes()
    }

    fn key_bytes(&self) -> usize {
        self.0.key_bytes()
    }

    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[inline]
    fn encrypt_block(&self, key: &[u8], block: &mut [u8]) {
        encrypt_in_place(self.0, key, block)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn key64() -> CipherKey {
        let bytes: Vec<u8> = (0u8..16).map(|i| (i / 4) * 8 + i % 4).collect();
        CipherKey::new(SpeckVariant::Speck64_128, &bytes).unwrap()
    }

    fn key128() -> CipherKey {
        CipherKey::new(SpeckVariant::Speck128_128, &(0u8..16).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn speck64_128_vector() {
        let v = SpeckVariant::Speck64_128;
        let pt = Block::from_words(v, 0x3b726574, 0x7475432d);
        let ct = speck_encrypt(v, &key64(), &pt).unwrap();
        assert_eq!(ct.words(), (0x8c6fa548, 0x454e028b));
        // The key words are k0 = 0x03020100 ... l2 = 0x1b1a1918.
        assert_eq!(pt.as_bytes(), b"-Cutter;");
    }

    #[test]
    fn speck128_128_vector() {
        let v = SpeckVariant::Speck128_128;
        let pt = Block::from_words(v, 0x6c61766975716520, 0x7469206564616d20);
        let ct = speck_encrypt(v, &key128(), &pt).unwrap();
        assert_eq!(ct.words(), (0xa65d985179783265, 0x7860fedf5c570d18));
        assert_eq!(pt.as_bytes(), b" made it equival");
    }

    #[test]
    fn round_key_zero_is_low_key_word() {
        for v in [SpeckVariant::Speck64_128, SpeckVariant::Speck128_128] {
            let key = CipherKey::new(v, &[0xa5, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]).unwrap();
            let rk = speck_key_schedule(v, &key).unwrap();
            assert_eq!(rk.len(), v.rounds());
            let low = match v {
                SpeckVariant::Speck64_128 => 0x030201a5,
                SpeckVariant::Speck128_128 => 0x07060504030201a5,
            };
            assert_eq!(rk.get(0), Some(low));
        }
    }

    /// Straight transcription of the schedule recurrence
    /// l[i+m-1] = (k[i] + (l[i] >>> 8)) ^ i, k[i+1] = (k[i] <<< 3) ^ l[i+m-1].
    fn schedule_oracle(words: &[u64], word_bits: u32, rounds: usize) -> Vec<u64> {
        let mask = if word_bits == 64 { u64::MAX } else { (1u64 << word_bits) - 1 };
        let rotr = |v: u64, r: u32| ((v >> r) | (v << (word_bits - r))) & mask;
        let rotl = |v: u64, r: u32| ((v << r) | (v >> (word_bits - r))) & mask;
        let m = words.len();
        let mut k = vec![words[0]];
        let mut l: Vec<u64> = words[1..].to_vec();
        for i in 0..rounds - 1 {
            let li = (k[i].wrapping_add(rotr(l[i], 8)) & mask) ^ i as u64;
            l.push(li);
            k.push(rotl(k[i], 3) ^ l[i + m - 1]);
        }
        k
    }

    #[test]
    fn schedule_matches_oracle() {
        for v in [SpeckVariant::Speck64_128, SpeckVariant::Speck128_128] {
            for key in [[0u8; 16], [0xff; 16], core::array::from_fn(|i| (i * 37 + 11) as u8)] {
                let words: Vec<u64> = match v {
                    SpeckVariant::Speck64_128 => key
                        .chunks(4)
                        .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as u64)
                        .collect(),
                    SpeckVariant::Speck128_128 => key
                        .chunks(8)
                        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
                        .collect(),
                };
                let expect = schedule_oracle(&words, v.word_bits() as u32, v.rounds());
                let got = speck_key_schedule(v, &CipherKey::new(v, &key).unwrap()).unwrap();
                let got: Vec<u64> = (0..got.len()).map(|i| got.get(i).unwrap()).collect();
                assert_eq!(got, expect, "{}", v.name());
            }
        }
    }

    #[test]
    fn encrypt_with_stored_schedule_matches_on_the_fly() {
        let v = SpeckVariant::Speck128_128;
        let key = key128();
        let rk = speck_key_schedule(v, &key).unwrap();
        let (mut x, mut y) = (0x6c61766975716520u64, 0x7469206564616d20u64);
        for i in 0..rk.len() {
            round64(&mut x, &mut y, rk.get(i).unwrap());
        }
        assert_eq!((x, y), (0xa65d985179783265, 0x7860fedf5c570d18));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(matches!(
            CipherKey::new(SpeckVariant::Speck128_128, &[0; 15]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(Block::new(SpeckVariant::Speck64_128, &[0; 16]).is_err());
        let small = Block::zero(SpeckVariant::Speck64_128);
        assert!(speck_encrypt(SpeckVariant::Speck128_128, &key128(), &small).is_err());
    }

    #[test]
    fn single_bit_flip_changes_ciphertext() {
        let v = SpeckVariant::Speck128_128;
        let pt = Block::zero(v);
        let base = speck_encrypt(v, &key128(), &pt).unwrap();
        for bit in 0..128 {
            let mut p = pt;
            p.as_bytes_mut()[bit / 8] ^= 1 << (bit % 8);
            assert_ne!(speck_encrypt(v, &key128(), &p).unwrap(), base);
        }
    }

    #[test]
    fn injective_over_random_plaintexts() {
        use rand::{Rng, SeedableRng};
        for v in [SpeckVariant::Speck64_128, SpeckVariant::Speck128_128] {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            let key = CipherKey::new(v, &[0x42; 16]).unwrap();
            let mut pts = HashSet::new();
            let mut cts = HashSet::new();
            while pts.len() < 100_000 {
                let mut buf = [0u8; 16];
                rng.fill(&mut buf[..]);
                let pt = Block::new(v, &buf[..v.block_bytes()]).unwrap();
                if pts.insert(pt) {
                    cts.insert(speck_encrypt(v, &key, &pt).unwrap());
                }
            }
            assert_eq!(cts.len(), pts.len());
        }
    }

    proptest! {
        #[test]
        fn block_bytes_round_trip(bytes in proptest::array::uniform16(any::<u8>()), wide in any::<bool>()) {
            let v = if wide { SpeckVariant::Speck128_128 } else { SpeckVariant::Speck64_128 };
            let b = Block::new(v, &bytes[..v.block_bytes()]).unwrap();
            let (x, y) = b.words();
            let back = Block::from_words(v, x, y);
            prop_assert_eq!(back, b);
            prop_assert_eq!(Block::new(v, back.as_bytes()).unwrap(), b);
        }
    }
}
