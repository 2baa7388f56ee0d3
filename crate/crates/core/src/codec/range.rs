//! 32-bit range coder with byte-wise renormalisation and carry propagation.
//!
//! The encoder keeps a 33-bit `low` so that a carry out of the top byte can be
//! pushed back into bytes already buffered. All arithmetic is integer-only.

use alloc::vec::Vec;

use crate::error::{Error, Result};

const TOP: u32 = 1 << 24;

pub struct RangeEncoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        Self { low: 0, range: u32::MAX, cache: 0, cache_size: 1, out: Vec::new() }
    }

    /// Narrows the range to `[low, low + freq) / total`.
    pub fn encode(&mut self, low: u32, freq: u32, total: u32) {
        debug_assert!(freq > 0 && low + freq <= total && total < TOP);
        let r = self.range / total;
        self.low += r as u64 * low as u64;
        self.range = r * freq;
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    fn shift_low(&mut self) {
        if (self.low as u32) < 0xFF00_0000 || (self.low >> 32) != 0 {
            let carry = (self.low >> 32) as u8;
            let mut byte = self.cache;
            loop {
                self.out.push(byte.wrapping_add(carry));
                byte = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    pub fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        self.out
    }
}

pub struct RangeDecoder<'a> {
    input: &'a [u8],
    pos: usize,
    code: u32,
    range: u32,
    pending: Option<(u32, u32)>,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(input: &'a [u8]) -> Result<Self> {
        if input.len() < 5 {
            return Err(Error::corrupt("range-coded payload shorter than 5 bytes"));
        }
        if input[0] != 0 {
            return Err(Error::corrupt("range-coded payload has a bad lead byte"));
        }
        let code = u32::from_be_bytes(input[1..5].try_into().expect("4 bytes"));
        Ok(Self { input, pos: 5, code, range: u32::MAX, pending: None })
    }

    /// Scaled target in `[0, total)` for the next symbol. Must be followed by
    /// [`RangeDecoder::consume`] with the interval that contains it.
    pub fn target(&mut self, total: u32) -> Result<u32> {
        let r = self.range / total;
        let v = self.code / r;
        if v >= total {
            return Err(Error::corrupt("range decoder desynchronised"));
        }
        self.pending = Some((r, total));
        Ok(v)
    }

    pub fn consume(&mut self, low: u32, freq: u32) -> Result<()> {
        let (r, _) = self.pending.take().expect("target() precedes consume()");
        self.code -= r * low;
        self.range = r * freq;
        while self.range < TOP {
            let byte = *self
                .input
                .get(self.pos)
                .ok_or_else(|| Error::corrupt("range-coded payload ended early"))?;
            self.pos += 1;
            self.code = (self.code << 8) | byte as u32;
            self.range <<= 8;
        }
        Ok(())
    }

    pub fn bytes_consumed(&self) -> usize {
        self.pos
    }
}
