//! NPY v1.0 files holding little-endian `f32` data in C order.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use featxform_core::FeatureTensor;
use npyz::{DType, NpyFile, Order, WriteOptions, WriterBuilder};

use crate::error::{Error, Result};
use crate::files::stem;

const MAGIC: &[u8; 6] = b"\x93NUMPY";
const MAX_RANK: usize = 4;
const DESCR: &str = "<f4";

pub fn load_npy(path: impl AsRef<Path>) -> Result<FeatureTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_npy(&bytes, stem(path))
}

pub fn save_npy(tensor: &FeatureTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_npy(tensor)).map_err(|e| Error::io(path, e))
}

pub fn decode_npy(bytes: &[u8], tag: impl Into<String>) -> Result<FeatureTensor> {
    if bytes.len() < 8 || &bytes[..6] != MAGIC {
        return Err(Error::Format("not an NPY file".into()));
    }
    if bytes[6..8] != [1, 0] {
        return Err(Error::Format(format!("unsupported NPY version {}.{}", bytes[6], bytes[7])));
    }
    let mut cursor = Cursor::new(bytes);
    let file = NpyFile::new(&mut cursor).map_err(|e| Error::Format(format!("bad NPY header: {e}")))?;
    match file.dtype() {
        DType::Plain(ts) if ts.to_string() == DESCR => {}
        other => return Err(Error::Format(format!("unsupported dtype {}, expected {DESCR}", other.descr()))),
    }
    if file.order() != Order::C {
        return Err(Error::Format("fortran-ordered arrays are not supported".into()));
    }
    let shape: Vec<usize> = file.shape().iter().map(|&d| d as usize).collect();
    if shape.is_empty() || shape.len() > MAX_RANK {
        return Err(Error::Format(format!("rank {} outside 1..={MAX_RANK}", shape.len())));
    }
    if shape.contains(&0) {
        return Err(Error::Format("zero-length dimension".into()));
    }
    let values: Vec<f32> = file.into_vec().map_err(|e| Error::Format(format!("truncated NPY data: {e}")))?;
    if cursor.position() != bytes.len() as u64 {
        return Err(Error::Format("trailing bytes after NPY data".into()));
    }
    Ok(FeatureTensor::new(shape, values, tag)?)
}

pub fn encode_npy(tensor: &FeatureTensor) -> Vec<u8> {
    let shape: Vec<u64> = tensor.shape().iter().map(|&d| d as u64).collect();
    let dtype = DType::Plain(DESCR.parse().expect("valid type string"));
    let mut out = Vec::with_capacity(128 + 4 * tensor.len());
    let mut w = WriteOptions::<f32>::new()
        .dtype(dtype)
        .shape(&shape)
        .writer(&mut out)
        .begin_nd()
        .expect("writing to memory");
    w.extend(tensor.values().iter().copied()).expect("writing to memory");
    w.finish().expect("writing to memory");
    out
}
