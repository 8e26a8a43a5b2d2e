//! Signature frame layout.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "NBL1"
//! 4       4     k, signature length in bits (big-endian)
//! 8       8     n, string length in bits (big-endian)
//! 16      ⌈k/8⌉ signature, MSB first, +1 -> 1, -1 -> 0, zero padded
//! ```

use crate::error::{NblError, Result};

use super::Signature;

pub const MAGIC: [u8; 4] = *b"NBL1";
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub n: u64,
    pub signature: Signature,
}

/// Payload size in bytes for a `k`-bit signature.
pub fn payload_len(k: usize) -> usize {
    k.div_ceil(8)
}

pub fn frame_len(k: usize) -> usize {
    HEADER_LEN + payload_len(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub k: u32,
    pub n: u64,
}

pub fn encode_header(k: u32, n: u64) -> [u8; HEADER_LEN] {
    let mut h = [0u8; HEADER_LEN];
    h[..4].copy_from_slice(&MAGIC);
    h[4..8].copy_from_slice(&k.to_be_bytes());
    h[8..].copy_from_slice(&n.to_be_bytes());
    h
}

pub fn decode_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < HEADER_LEN {
        return Err(NblError::MalformedFrame(format!(
            "header needs {HEADER_LEN} bytes, got {}",
            bytes.len()
        )));
    }
    if bytes[..4] != MAGIC {
        return Err(NblError::MalformedFrame(format!(
            "bad magic {:02x?}",
            &bytes[..4]
        )));
    }
    let k = u32::from_be_bytes(bytes[4..8].try_into().expect("4 bytes"));
    let n = u64::from_be_bytes(bytes[8..16].try_into().expect("8 bytes"));
    if k == 0 {
        return Err(NblError::MalformedFrame("zero-length signature".into()));
    }
    Ok(Header { k, n })
}

/// Packs `signature` behind a header announcing its length and `n`.
pub fn encode_frame(signature: &Signature, n: u64) -> Result<Vec<u8>> {
    let k = u32::try_from(signature.len())
        .map_err(|_| NblError::InvalidParameter("signature longer than 2^32 bits".into()))?;
    let mut out = Vec::with_capacity(frame_len(signature.len()));
    out.extend_from_slice(&encode_header(k, n));
    out.extend_from_slice(&signature.packed());
    Ok(out)
}

pub fn decode_frame(bytes: &[u8]) -> Result<Frame> {
    let header = decode_header(bytes)?;
    let k = header.k as usize;
    let expected = frame_len(k);
    if bytes.len() != expected {
        return Err(NblError::MalformedFrame(format!(
            "frame for k = {k} must be {expected} bytes, got {}",
            bytes.len()
        )));
    }
    let signature = Signature::unpack(&bytes[HEADER_LEN..], k)?;
    Ok(Frame {
        n: header.n,
        signature,
    })
}
