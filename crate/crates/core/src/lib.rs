//! Lightweight hashing for intermittently powered devices.
//!
//! The crate bundles four pieces that are usually studied together:
//!
//! * [`speck`] and [`construct`]: block-cipher-based hash functions built
//!   from SPECK in Davies-Meyer, Matyas-Meyer-Oseas and Miyaguchi-Preneel
//!   mode over a plain Merkle-Damgård chain;
//! * [`refhash`]: MD5 and BLAKE2s-256 as baselines;
//! * [`quality`]: an SMHasher-style statistical battery (avalanche,
//!   differential and keyset tests) and the birthday-bound estimate;
//! * [`energy`]: a simulator for an energy-harvesting device whose
//!   reservoir capacitor cycles between a turn-on and a brownout voltage,
//!   with continuous and checkpoint-and-sleep execution policies.
//!
//! [`bench`] and [`report`] back the `intermithash` command-line tool.

pub mod bench;
pub mod construct;
pub mod energy;
pub mod error;
pub mod hashing;
pub mod quality;
pub mod refhash;
pub mod report;
pub mod rng;
pub mod speck;

pub use error::{Error, Result};
pub use hashing::{CallCounts, Digest, HashAlgorithm, HashFunction, StreamHasher};
