//! Baseline hashes: MD5 (RFC 1321) and unkeyed BLAKE2s-256 (RFC 7693).
//!
//! Both count compression-function calls so benchmark reports can carry
//! timing-independent work figures.

mod blake2s;
mod md5;

pub use blake2s::{blake2s, Blake2s};
pub use md5::{md5, Md5};
