//! Lossless entropy coding of symbol planes into self-describing `DTFC`
//! streams.
//!
//! Stream layout, little-endian throughout:
//!
//! ```text
//! "DTFC" | version u8 = 1 | coder id u8 = 0 | rank u8 | rank × u32 shape
//!        | levels u32 | codebook length u32 | DTCB block
//!        | payload length u32 | payload | crc32 u32
//! ```
//!
//! The payload is an adaptive order-0 range coding of the symbols followed by
//! a sentinel symbol (index `levels`); an empty plane has an empty payload.

use alloc::vec::Vec;

mod model;
mod range;

pub use model::{AdaptiveModel, COUNT_INCREMENT, RESCALE_THRESHOLD};
pub use range::{RangeDecoder, RangeEncoder};

use crate::error::{Error, Result};
use crate::tensor::{checked_product, SymbolPlane};
use crate::transform::{deserialize_codebook, serialize_codebook, TransformCodebook};

pub const STREAM_MAGIC: [u8; 4] = *b"DTFC";
pub const STREAM_VERSION: u8 = 1;
pub const CODER_ORDER0_RANGE: u8 = 0;

/// An encoded stream. Construction from raw bytes does not validate; use
/// [`decode`] or [`Bitstream::header`] for that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitstream {
    bytes: Vec<u8>,
}

/// Parsed fixed fields of a stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamHeader {
    pub shape: Vec<usize>,
    pub levels: u32,
    pub codebook: core::ops::Range<usize>,
    pub payload: core::ops::Range<usize>,
}

impl StreamHeader {
    pub fn element_count(&self) -> usize {
        self.shape.iter().product()
    }
}

impl Bitstream {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Self { bytes }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn total_bits(&self) -> u64 {
        8 * self.bytes.len() as u64
    }

    pub fn payload_bits(&self) -> Result<u64> {
        Ok(8 * self.header()?.payload.len() as u64)
    }

    /// Everything except the range-coded payload, in bits.
    pub fn header_bits(&self) -> Result<u64> {
        Ok(self.total_bits() - self.payload_bits()?)
    }

    /// Parses and checks the container framing and CRC.
    pub fn header(&self) -> Result<StreamHeader> {
        let b = &self.bytes;
        let mut cur = Cursor { bytes: b, pos: 0 };
        if cur.take(4)? != STREAM_MAGIC {
            return Err(Error::format("bad stream magic"));
        }
        let version = cur.u8()?;
        if version != STREAM_VERSION {
            return Err(Error::format(alloc::format!("unsupported stream version {version}")));
        }
        let coder = cur.u8()?;
        if coder != CODER_ORDER0_RANGE {
            return Err(Error::format(alloc::format!("unknown coder id {coder}")));
        }
        let rank = cur.u8()? as usize;
        if rank == 0 {
            return Err(Error::format("stream rank must be >= 1"));
        }
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(cur.u32()? as usize);
        }
        let levels = cur.u32()?;
        let cb_len = cur.u32()? as usize;
        let cb_start = cur.pos;
        cur.take(cb_len)?;
        let codebook = cb_start..cur.pos;
        let payload_len = cur.u32()? as usize;
        let payload_start = cur.pos;
        let needed = payload_start
            .checked_add(payload_len)
            .and_then(|v| v.checked_add(4))
            .ok_or_else(|| Error::format("payload length overflows"))?;
        if b.len() < needed {
            return Err(Error::corrupt(alloc::format!(
                "stream truncated: payload needs {needed} bytes, have {}",
                b.len()
            )));
        }
        if b.len() > needed {
            return Err(Error::format("trailing bytes after stream CRC"));
        }
        let stored = u32::from_le_bytes(b[needed - 4..].try_into().expect("4 bytes"));
        if crc32fast::hash(&b[..needed - 4]) != stored {
            return Err(Error::format("stream CRC mismatch"));
        }
        if checked_product(&shape).is_none() {
            return Err(Error::format("stream shape overflows"));
        }
        Ok(StreamHeader { shape, levels, codebook, payload: payload_start..payload_start + payload_len })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::format("stream header truncated")),
        }
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

/// Range-codes the symbols of `plane` alone, terminated by the sentinel.
pub fn encode_payload(plane: &SymbolPlane) -> Vec<u8> {
    if plane.is_empty() {
        return Vec::new();
    }
    let mut model = AdaptiveModel::new(plane.levels());
    let mut enc = RangeEncoder::new();
    for &s in plane.symbols() {
        let (low, freq) = model.range_of(s);
        enc.encode(low, freq, model.total());
        model.update(s);
    }
    let sentinel = model.sentinel();
    let (low, freq) = model.range_of(sentinel);
    enc.encode(low, freq, model.total());
    enc.finish()
}

/// Inverse of [`encode_payload`] for a known element count.
pub fn decode_payload(payload: &[u8], levels: u32, count: usize) -> Result<Vec<u32>> {
    if count == 0 {
        if !payload.is_empty() {
            return Err(Error::corrupt("non-empty payload for an empty plane"));
        }
        return Ok(Vec::new());
    }
    let mut model = AdaptiveModel::new(levels);
    let mut dec = RangeDecoder::new(payload)?;
    let mut symbols = Vec::with_capacity(count.min(payload.len().saturating_mul(64)));
    loop {
        let target = dec.target(model.total())?;
        let (s, low, freq) = model.find(target);
        dec.consume(low, freq)?;
        if s == model.sentinel() {
            break;
        }
        if symbols.len() == count {
            return Err(Error::corrupt("missing end-of-stream sentinel"));
        }
        symbols.push(s);
        model.update(s);
    }
    if symbols.len() != count {
        return Err(Error::corrupt(alloc::format!(
            "sentinel after {} symbols, expected {count}",
            symbols.len()
        )));
    }
    Ok(symbols)
}

pub fn encode(plane: &SymbolPlane, cb: &TransformCodebook) -> Result<Bitstream> {
    if plane.levels() != cb.levels() {
        return Err(Error::LevelMismatch { expected: cb.levels(), found: plane.levels() });
    }
    if plane.shape().len() > u8::MAX as usize {
        return Err(Error::param("rank above 255 cannot be encoded"));
    }
    if plane.shape().iter().any(|&d| d > u32::MAX as usize) {
        return Err(Error::param("dimension above u32::MAX cannot be encoded"));
    }
    let cb_bytes = serialize_codebook(cb);
    let payload = encode_payload(plane);
    if payload.len() > u32::MAX as usize {
        return Err(Error::param("payload exceeds 4 GiB"));
    }
    let mut out = Vec::with_capacity(32 + cb_bytes.len() + payload.len());
    out.extend_from_slice(&STREAM_MAGIC);
    out.push(STREAM_VERSION);
    out.push(CODER_ORDER0_RANGE);
    out.push(plane.shape().len() as u8);
    for &d in plane.shape() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    out.extend_from_slice(&plane.levels().to_le_bytes());
    out.extend_from_slice(&(cb_bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(&cb_bytes);
    out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    out.extend_from_slice(&payload);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(Bitstream { bytes: out })
}

pub fn decode(stream: &Bitstream) -> Result<(SymbolPlane, TransformCodebook)> {
    let header = stream.header()?;
    let bytes = stream.as_bytes();
    let cb = deserialize_codebook(&bytes[header.codebook.clone()])?;
    if cb.levels() != header.levels {
        return Err(Error::format(alloc::format!(
            "header declares {} levels but codebook has {}",
            header.levels,
            cb.levels()
        )));
    }
    let symbols = decode_payload(&bytes[header.payload.clone()], header.levels, header.element_count())?;
    let plane = SymbolPlane::new(header.shape, symbols, header.levels)?;
    Ok((plane, cb))
}

/// Bits per feature point: the whole stream, header included, per element.
pub fn bpfp(stream: &Bitstream, element_count: usize) -> Result<f64> {
    let header = stream.header()?;
    if element_count == 0 || element_count != header.element_count() {
        return Err(Error::param(alloc::format!(
            "element count {element_count} does not match encoded shape ({} elements)",
            header.element_count()
        )));
    }
    Ok(stream.total_bits() as f64 / element_count as f64)
}
