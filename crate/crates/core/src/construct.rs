//! Merkle-Damgård hashing over single-block-length compression functions.
//!
//! A message is cut into fragments, zero-padded at the end, and folded
//! through one of three compression functions starting from a fixed IV:
//!
//! | kind | fragment width | `H_i` |
//! |------|----------------|-------|
//! | Davies-Meyer | key | `E_{m_i}(H_{i-1}) ^ H_{i-1}` |
//! | Matyas-Meyer-Oseas | block | `E_{g(H_{i-1})}(m_i) ^ m_i` |
//! | Miyaguchi-Preneel | block | `E_{g(H_{i-1})}(m_i) ^ m_i ^ H_{i-1}` |
//!
//! `g` widens or narrows the chaining value to the key width.
//!
//! There is no length block. Zero padding alone means `m` and `m ∥ 0x00`
//! collide whenever `m` does not fill its last fragment; the all-zero
//! keyset exposes exactly this. The IV defaults to the zero block.

use crate::error::{Error, Result};
use crate::hashing::{CallCounts, Digest, HashFunction, StreamHasher};
use crate::speck::{Block, BlockCipher, Speck, SpeckVariant, MAX_BLOCK_BYTES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstructionKind {
    DaviesMeyer,
    MatyasMeyerOseas,
    MiyaguchiPreneel,
}

impl ConstructionKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ConstructionKind::DaviesMeyer => "dm",
            ConstructionKind::MatyasMeyerOseas => "mmo",
            ConstructionKind::MiyaguchiPreneel => "mp",
        }
    }
}

/// How `g` adapts a chaining value to the cipher's key width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GMode {
    /// Append zero bits, or truncate.
    #[default]
    ZeroPad,
    /// Repeat the value end to end, then truncate.
    Duplicate,
}

/// Maps `value` to exactly `target_bits` bits.
///
/// The result is `ceil(target_bits / 8)` bytes; bits past `target_bits` in
/// the final byte are zero.
pub fn g_map(value: &[u8], target_bits: usize, mode: GMode) -> Vec<u8> {
    let mut out = vec![0u8; target_bits.div_ceil(8)];
    g_into(value, &mut out, mode);
    if !target_bits.is_multiple_of(8) {
        let last = out.len() - 1;
        out[last] &= (1u8 << (target_bits % 8)) - 1;
    }
    out
}

#[inline]
fn g_into(value: &[u8], out: &mut [u8], mode: GMode) {
    if value.len() >= out.len() {
        out.copy_from_slice(&value[..out.len()]);
        return;
    }
    match mode {
        GMode::ZeroPad => {
            out[..value.len()].copy_from_slice(value);
            out[value.len()..].fill(0);
        }
        GMode::Duplicate => {
            for chunk in out.chunks_mut(value.len()) {
                chunk.copy_from_slice(&value[..chunk.len()]);
            }
        }
    }
}

/// The message cut into equal fragments, last one zero-padded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedMessage {
    pub blocks: Vec<Vec<u8>>,
    pub original_len_bytes: usize,
}

/// Splits `message` into `fragment_bytes`-wide fragments, zero-padding the
/// last. The empty message becomes a single all-zero fragment.
pub fn pad_message(message: &[u8], fragment_bytes: usize) -> PaddedMessage {
    assert!(fragment_bytes > 0, "fragment width must be positive");
    let mut blocks: Vec<Vec<u8>> = message
        .chunks(fragment_bytes)
        .map(|c| {
            let mut b = c.to_vec();
            b.resize(fragment_bytes, 0);
            b
        })
        .collect();
    if blocks.is_empty() {
        blocks.push(vec![0; fragment_bytes]);
    }
    PaddedMessage { blocks, original_len_bytes: message.len() }
}

/// Chaining value `H_i` plus the number of fragments folded in so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainState {
    pub h: Block,
    pub blocks_consumed: u64,
}

impl ChainState {
    pub fn new(iv: Block) -> Self {
        ChainState { h: iv, blocks_consumed: 0 }
    }
}

fn check_width(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::InvalidArgument(format!(
            "{what} fragment is {got} bytes, expected {want}"
        )));
    }
    Ok(())
}

fn xor_into(dst: &mut [u8], src: &[u8]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Davies-Meyer: `H_i = E_{m_i}(H_{i-1}) ^ H_{i-1}`.
pub fn compress_dm<C: BlockCipher>(cipher: &C, state: ChainState, m_i: &[u8]) -> Result<ChainState> {
    check_width("DM", m_i.len(), cipher.key_bytes())?;
    check_width("chain", state.h.len(), cipher.block_bytes())?;
    Ok(dm_step(cipher, state, m_i))
}

/// Matyas-Meyer-Oseas: `H_i = E_{g(H_{i-1})}(m_i) ^ m_i`.
pub fn compress_mmo<C: BlockCipher>(
    cipher: &C,
    state: ChainState,
    m_i: &[u8],
    g_mode: GMode,
) -> Result<ChainState> {
    check_width("MMO", m_i.len(), cipher.block_bytes())?;
    check_width("chain", state.h.len(), cipher.block_bytes())?;
    Ok(mmo_step(cipher, state, m_i, g_mode, false))
}

/// Miyaguchi-Preneel: `H_i = E_{g(H_{i-1})}(m_i) ^ m_i ^ H_{i-1}`.
pub fn compress_mp<C: BlockCipher>(
    cipher: &C,
    state: ChainState,
    m_i: &[u8],
    g_mode: GMode,
) -> Result<ChainState> {
    check_width("MP", m_i.len(), cipher.block_bytes())?;
    check_width("chain", state.h.len(), cipher.block_bytes())?;
    Ok(mmo_step(cipher, state, m_i, g_mode, true))
}

#[inline]
fn dm_step<C: BlockCipher>(cipher: &C, state: ChainState, m_i: &[u8]) -> ChainState {
    let mut h = state.h;
    cipher.encrypt_block(m_i, h.as_bytes_mut());
    xor_into(h.as_bytes_mut(), state.h.as_bytes());
    ChainState { h, blocks_consumed: state.blocks_consumed + 1 }
}

#[inline]
fn mmo_step<C: BlockCipher>(
    cipher: &C,
    state: ChainState,
    m_i: &[u8],
    g_mode: GMode,
    chain_xor: bool,
) -> ChainState {
    let mut key = [0u8; MAX_BLOCK_BYTES];
    let key = &mut key[..cipher.key_bytes()];
    g_into(state.h.as_bytes(), key, g_mode);
    let mut h = Block::from_slice(m_i);
    cipher.encrypt_block(key, h.as_bytes_mut());
    xor_into(h.as_bytes_mut(), m_i);
    if chain_xor {
        xor_into(h.as_bytes_mut(), state.h.as_bytes());
    }
    ChainState { h, blocks_consumed: state.blocks_consumed + 1 }
}

/// A hash built from `kind`, a block cipher, a `g` mode and an IV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Construction<C: BlockCipher = Speck> {
    kind: ConstructionKind,
    cipher: C,
    g_mode: GMode,
    iv: Block,
}

impl Construction<Speck> {
    /// `kind` over Speck128/128 with a zero IV and zero-pad `g`.
    pub fn speck128(kind: ConstructionKind) -> Self {
        let v = SpeckVariant::Speck128_128;
        Construction { kind, cipher: Speck(v), g_mode: GMode::ZeroPad, iv: Block::zero(v) }
    }
}

impl<C: BlockCipher> Construction<C> {
    pub fn new(kind: ConstructionKind, cipher: C, g_mode: GMode, iv: &[u8]) -> Result<Self> {
        if cipher.key_bytes() > MAX_BLOCK_BYTES || cipher.block_bytes() > MAX_BLOCK_BYTES {
            return Err(Error::InvalidArgument("cipher widths above 128 bits".into()));
        }
        check_width("IV", iv.len(), cipher.block_bytes())?;
        Ok(Construction { kind, cipher, g_mode, iv: Block::from_slice(iv) })
    }

    pub fn kind(&self) -> ConstructionKind {
        self.kind
    }

    pub fn g_mode(&self) -> GMode {
        self.g_mode
    }

    pub fn iv(&self) -> &Block {
        &self.iv
    }

    pub fn cipher(&self) -> &C {
        &self.cipher
    }

    /// DM keys the cipher with the message; MMO and MP feed it as plaintext.
    pub fn fragment_bytes(&self) -> usize {
        match self.kind {
            ConstructionKind::DaviesMeyer => self.cipher.key_bytes(),
            _ => self.cipher.block_bytes(),
        }
    }

    pub fn digest_bytes(&self) -> usize {
        self.cipher.block_bytes()
    }

    pub fn compress(&self, state: ChainState, fragment: &[u8]) -> Result<ChainState> {
        match self.kind {
            ConstructionKind::DaviesMeyer => compress_dm(&self.cipher, state, fragment),
            ConstructionKind::MatyasMeyerOseas => {
                compress_mmo(&self.cipher, state, fragment, self.g_mode)
            }
            ConstructionKind::MiyaguchiPreneel => {
                compress_mp(&self.cipher, state, fragment, self.g_mode)
            }
        }
    }

    #[inline]
    fn step(&self, state: ChainState, fragment: &[u8]) -> ChainState {
        match self.kind {
            ConstructionKind::DaviesMeyer => dm_step(&self.cipher, state, fragment),
            ConstructionKind::MatyasMeyerOseas => {
                mmo_step(&self.cipher, state, fragment, self.g_mode, false)
            }
            ConstructionKind::MiyaguchiPreneel => {
                mmo_step(&self.cipher, state, fragment, self.g_mode, true)
            }
        }
    }

    pub fn hasher(&self) -> ConstructionHasher<C> {
        ConstructionHasher {
            construction: self.clone(),
            state: ChainState::new(self.iv),
            buf: [0; MAX_BLOCK_BYTES],
            buf_len: 0,
            total_len: 0,
        }
    }

    pub fn hash(&self, message: &[u8]) -> Digest {
        let mut h = self.hasher();
        h.update(message);
        h.finalize()
    }
}

impl<C: BlockCipher> HashFunction for Construction<C> {
    fn name(&self) -> String {
        format!("{}-{}", self.kind.short_name(), self.cipher.name())
    }

    fn digest_bytes(&self) -> usize {
        Construction::digest_bytes(self)
    }

    fn digest(&self, message: &[u8]) -> Digest {
        self.hash(message)
    }
}

/// Streaming state of a [`Construction`].
#[derive(Debug, Clone)]
pub struct ConstructionHasher<C: BlockCipher = Speck> {
    construction: Construction<C>,
    state: ChainState,
    buf: [u8; MAX_BLOCK_BYTES],
    buf_len: usize,
    total_len: u64,
}

impl<C: BlockCipher> ConstructionHasher<C> {
    pub fn chain_state(&self) -> &ChainState {
        &self.state
    }
}

impl<C: BlockCipher> StreamHasher for ConstructionHasher<C> {
    fn update(&mut self, mut data: &[u8]) {
        let width = self.construction.fragment_bytes();
        self.total_len += data.len() as u64;
        if self.buf_len > 0 {
            let n = (width - self.buf_len).min(data.len());
            self.buf[self.buf_len..self.buf_len + n].copy_from_slice(&data[..n]);
            self.buf_len += n;
            data = &data[n..];
            if self.buf_len < width {
                return;
            }
            let frag = self.buf;
            self.state = self.construction.step(self.state, &frag[..width]);
            self.buf_len = 0;
        }
        let mut chunks = data.chunks_exact(width);
        for frag in &mut chunks {
            self.state = self.construction.step(self.state, frag);
        }
        let rest = chunks.remainder();
        self.buf[..rest.len()].copy_from_slice(rest);
        self.buf_len = rest.len();
    }

    fn finalize_counted(mut self) -> (Digest, CallCounts) {
        let width = self.construction.fragment_bytes();
        if self.buf_len > 0 || self.total_len == 0 {
            self.buf[self.buf_len..width].fill(0);
            let frag = self.buf;
            self.state = self.construction.step(self.state, &frag[..width]);
        }
        let n = self.state.blocks_consumed;
        (
            Digest::from_slice(self.state.h.as_bytes()),
            CallCounts { compressions: n, cipher_calls: n },
        )
    }
}
