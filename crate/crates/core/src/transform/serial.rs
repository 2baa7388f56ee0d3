//! `DTCB` codebook container.
//!
//! ```text
//! "DTCB" | version u8 = 1 | mode u8 | levels u32 | fit seed u64 | levels × f64 | crc32 u32
//! ```
//! All integers and reals are little-endian; the CRC covers every prior byte.

use alloc::vec::Vec;

use super::{FitMode, TransformCodebook, MAX_LEVELS, MIN_LEVELS};
use crate::error::{Error, Result};

pub const CODEBOOK_MAGIC: [u8; 4] = *b"DTCB";
pub const CODEBOOK_VERSION: u8 = 1;

const FIXED_LEN: usize = 4 + 1 + 1 + 4 + 8;

pub fn serialize_codebook(cb: &TransformCodebook) -> Vec<u8> {
    let mut out = Vec::with_capacity(FIXED_LEN + 8 * cb.centers().len() + 4);
    out.extend_from_slice(&CODEBOOK_MAGIC);
    out.push(CODEBOOK_VERSION);
    out.push(cb.mode().code());
    out.extend_from_slice(&cb.levels().to_le_bytes());
    out.extend_from_slice(&cb.fit_seed().to_le_bytes());
    for c in cb.centers() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// Serialized length of a codebook with `levels` centers.
pub(crate) fn serialized_len(levels: u32) -> usize {
    FIXED_LEN + 8 * levels as usize + 4
}

pub fn deserialize_codebook(bytes: &[u8]) -> Result<TransformCodebook> {
    if bytes.len() < FIXED_LEN + 4 {
        return Err(Error::format("codebook block truncated"));
    }
    if bytes[..4] != CODEBOOK_MAGIC {
        return Err(Error::format("bad codebook magic"));
    }
    if bytes[4] != CODEBOOK_VERSION {
        return Err(Error::format(alloc::format!("unsupported codebook version {}", bytes[4])));
    }
    let levels = u32::from_le_bytes(bytes[6..10].try_into().expect("4 bytes"));
    if !(MIN_LEVELS..=MAX_LEVELS).contains(&levels) {
        return Err(Error::format(alloc::format!("codebook level count {levels} out of range")));
    }
    let expected = serialized_len(levels);
    if bytes.len() != expected {
        return Err(Error::format(alloc::format!(
            "codebook block is {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let body = &bytes[..expected - 4];
    let stored = u32::from_le_bytes(bytes[expected - 4..].try_into().expect("4 bytes"));
    if crc32fast::hash(body) != stored {
        return Err(Error::format("codebook CRC mismatch"));
    }
    let mode = FitMode::from_code(bytes[5])
        .ok_or_else(|| Error::format(alloc::format!("unknown fit mode code {}", bytes[5])))?;
    let fit_seed = u64::from_le_bytes(bytes[10..18].try_into().expect("8 bytes"));
    let centers: Vec<f64> = body[FIXED_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if centers.iter().any(|c| !c.is_finite()) {
        return Err(Error::format("codebook contains non-finite centers"));
    }
    if centers.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::format("codebook centers are not strictly increasing"));
    }
    TransformCodebook::new(centers, mode, fit_seed, "")
}
