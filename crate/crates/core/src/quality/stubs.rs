//! Degenerate and idealised hashes with known test outcomes, used to
//! calibrate the battery itself.

use crate::hashing::{Digest, HashFunction};
use crate::speck::{BlockCipher, Speck, SpeckVariant};

/// Every message maps to the all-zero digest of the given width.
#[derive(Debug, Clone, Copy)]
pub struct ConstantHash(pub usize);

impl HashFunction for ConstantHash {
    fn name(&self) -> String {
        "constant".into()
    }
    fn digest_bytes(&self) -> usize {
        self.0
    }
    fn digest(&self, _message: &[u8]) -> Digest {
        Digest::from_slice(&vec![0; self.0])
    }
}

/// The first 16 message bytes, zero-filled if shorter.
#[derive(Debug, Clone, Copy)]
pub struct TruncationHash;

impl HashFunction for TruncationHash {
    fn name(&self) -> String {
        "truncation".into()
    }
    fn digest_bytes(&self) -> usize {
        16
    }
    fn digest(&self, message: &[u8]) -> Digest {
        let mut out = [0u8; 16];
        let n = message.len().min(16);
        out[..n].copy_from_slice(&message[..n]);
        Digest::from_slice(&out)
    }
}

/// XOR of all `width`-byte chunks of the message (last chunk zero-filled).
#[derive(Debug, Clone, Copy)]
pub struct XorFoldHash(pub usize);

impl HashFunction for XorFoldHash {
    fn name(&self) -> String {
        format!("xorfold{}", self.0 * 8)
    }
    fn digest_bytes(&self) -> usize {
        self.0
    }
    fn digest(&self, message: &[u8]) -> Digest {
        let mut out = vec![0u8; self.0];
        for chunk in message.chunks(self.0) {
            for (o, b) in out.iter_mut().zip(chunk) {
                *o ^= b;
            }
        }
        Digest::from_slice(&out)
    }
}

/// Speck128/128 under a fixed key applied to the message as a counter
/// block (first 16 bytes, zero-filled). A pseudorandom permutation, so its
/// outputs on distinct short inputs are as balanced as random ones.
#[derive(Debug, Clone, Copy)]
pub struct CounterCipherHash;

impl HashFunction for CounterCipherHash {
    fn name(&self) -> String {
        "speck-counter".into()
    }
    fn digest_bytes(&self) -> usize {
        16
    }
    fn digest(&self, message: &[u8]) -> Digest {
        let mut block = [0u8; 16];
        let n = message.len().min(16);
        block[..n].copy_from_slice(&message[..n]);
        Speck(SpeckVariant::Speck128_128).encrypt_block(b"fixed stub key!!", &mut block);
        Digest::from_slice(&block)
    }
}
