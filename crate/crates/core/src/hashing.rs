//! The hashing interface shared by every hash in the crate.

use std::fmt;

use crate::construct::{Construction, ConstructionHasher, ConstructionKind};
use crate::error::{Error, Result};
use crate::refhash::{Blake2s, Md5};
use crate::speck::Speck;

/// Longest digest produced by any hash here (BLAKE2s-256).
pub const MAX_DIGEST_BYTES: usize = 32;

/// A fixed-length hash output.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest {
    bytes: [u8; MAX_DIGEST_BYTES],
    len: u8,
}

impl Digest {
    /// Panics if `bytes` is longer than [`MAX_DIGEST_BYTES`].
    pub fn from_slice(bytes: &[u8]) -> Self {
        assert!(bytes.len() <= MAX_DIGEST_BYTES, "digest too long");
        let mut buf = [0u8; MAX_DIGEST_BYTES];
        buf[..bytes.len()].copy_from_slice(bytes);
        Digest { bytes: buf, len: bytes.len() as u8 }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> usize {
        self.len() * 8
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bytes[i / 8] >> (i % 8) & 1 == 1
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.as_bytes())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Work counters that do not depend on timing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CallCounts {
    pub compressions: u64,
    pub cipher_calls: u64,
}

/// An incremental hash. States are plain values: clone one to fork it.
pub trait StreamHasher: Clone {
    fn update(&mut self, data: &[u8]);

    fn finalize_counted(self) -> (Digest, CallCounts);

    fn finalize(self) -> Digest
    where
        Self: Sized,
    {
        self.finalize_counted().0
    }

    /// Bytes of working state held by the hasher.
    fn state_bytes(&self) -> usize {
        std::mem::size_of_val(self)
    }
}

/// A one-shot hash, object safe so stubs and real hashes mix freely.
pub trait HashFunction: Sync {
    fn name(&self) -> String;

    fn digest_bytes(&self) -> usize;

    fn digest(&self, message: &[u8]) -> Digest;

    /// Digests of `message[..i]` for every `i` in `0..=message.len()`.
    fn prefix_digests(&self, message: &[u8]) -> Vec<Digest> {
        (0..=message.len()).map(|i| self.digest(&message[..i])).collect()
    }
}

/// The hashes selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HashAlgorithm {
    Md5,
    Blake2s,
    DmSpeck128,
    MmoSpeck128,
    MpSpeck128,
}

impl HashAlgorithm {
    pub const ALL: [HashAlgorithm; 5] = [
        HashAlgorithm::Md5,
        HashAlgorithm::Blake2s,
        HashAlgorithm::DmSpeck128,
        HashAlgorithm::MmoSpeck128,
        HashAlgorithm::MpSpeck128,
    ];

    pub const SPECK: [HashAlgorithm; 3] = [
        HashAlgorithm::DmSpeck128,
        HashAlgorithm::MmoSpeck128,
        HashAlgorithm::MpSpeck128,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HashAlgorithm::Md5 => "md5",
            HashAlgorithm::Blake2s => "blake2s",
            HashAlgorithm::DmSpeck128 => "dm-speck128",
            HashAlgorithm::MmoSpeck128 => "mmo-speck128",
            HashAlgorithm::MpSpeck128 => "mp-speck128",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|h| h.name() == name)
            .ok_or_else(|| Error::UnknownHash(name.to_string()))
    }

    /// The SPECK construction behind this name, if any.
    pub fn construction(self) -> Option<Construction<Speck>> {
        let kind = match self {
            HashAlgorithm::DmSpeck128 => ConstructionKind::DaviesMeyer,
            HashAlgorithm::MmoSpeck128 => ConstructionKind::MatyasMeyerOseas,
            HashAlgorithm::MpSpeck128 => ConstructionKind::MiyaguchiPreneel,
            _ => return None,
        };
        Some(Construction::speck128(kind))
    }

    /// Width of one compression-function input, in bytes.
    pub fn fragment_bytes(self) -> usize {
        match self {
            HashAlgorithm::Md5 | HashAlgorithm::Blake2s => 64,
            _ => self.construction().unwrap().fragment_bytes(),
        }
    }

    pub fn hasher(self) -> AnyHasher {
        match self {
            HashAlgorithm::Md5 => AnyHasher::Md5(Md5::new()),
            HashAlgorithm::Blake2s => AnyHasher::Blake2s(Blake2s::new()),
            _ => AnyHasher::Speck(self.construction().unwrap().hasher()),
        }
    }
}

impl fmt::Display for HashAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(HashAlgorithm::name(*self))
    }
}

impl HashFunction for HashAlgorithm {
    fn name(&self) -> String {
        HashAlgorithm::name(*self).to_string()
    }

    fn digest_bytes(&self) -> usize {
        match self {
            HashAlgorithm::Md5 => 16,
            HashAlgorithm::Blake2s => 32,
            _ => self.construction().unwrap().digest_bytes(),
        }
    }

    fn digest(&self, message: &[u8]) -> Digest {
        let mut h = self.hasher();
        h.update(message);
        h.finalize()
    }

    fn prefix_digests(&self, message: &[u8]) -> Vec<Digest> {
        let mut h = self.hasher();
        let mut out = Vec::with_capacity(message.len() + 1);
        out.push(h.clone().finalize());
        for b in message.chunks(1) {
            h.update(b);
            out.push(h.clone().finalize());
        }
        out
    }
}

/// A streaming state for any [`HashAlgorithm`].
#[derive(Clone)]
pub enum AnyHasher {
    Md5(Md5),
    Blake2s(Blake2s),
    Speck(ConstructionHasher<Speck>),
}

impl StreamHasher for AnyHasher {
    fn update(&mut self, data: &[u8]) {
        match self {
            AnyHasher::Md5(h) => h.update(data),
            AnyHasher::Blake2s(h) => h.update(data),
            AnyHasher::Speck(h) => h.update(data),
        }
    }

    fn finalize_counted(self) -> (Digest, CallCounts) {
        match self {
            AnyHasher::Md5(h) => h.finalize_counted(),
            AnyHasher::Blake2s(h) => h.finalize_counted(),
            AnyHasher::Speck(h) => h.finalize_counted(),
        }
    }

    fn state_bytes(&self) -> usize {
        match self {
            AnyHasher::Md5(h) => h.state_bytes(),
            AnyHasher::Blake2s(h) => h.state_bytes(),
            AnyHasher::Speck(h) => h.state_bytes(),
        }
    }
}
