//! Reading and writing codebook (DTCB) and stream (DTFC) files.

use std::fs;
use std::path::Path;

use featxform_core::codec::Bitstream;
use featxform_core::transform::{deserialize_codebook, serialize_codebook};
use featxform_core::TransformCodebook;

use crate::error::{Error, Result};

pub fn read_bytes(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let path = path.as_ref();
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn write_bytes(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_codebook(path: impl AsRef<Path>) -> Result<TransformCodebook> {
    let path = path.as_ref();
    let cb = deserialize_codebook(&read_bytes(path)?)?;
    Ok(cb.with_tag(stem(path)))
}

pub fn save_codebook(cb: &TransformCodebook, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path, &serialize_codebook(cb))
}

pub fn load_stream(path: impl AsRef<Path>) -> Result<Bitstream> {
    Ok(Bitstream::from_bytes(read_bytes(path)?))
}

pub fn save_stream(stream: &Bitstream, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path, stream.as_bytes())
}

/// File name without directory or extension; used as a source tag.
pub fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}
