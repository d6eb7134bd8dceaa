//! `.label` files: one little-endian u32 class index per point.

use std::fs;
use std::path::Path;

use super::FormatError;

pub fn read_label_file(path: impl AsRef<Path>) -> Result<Vec<u32>, FormatError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| FormatError::io(path, e))?;
    if bytes.len() % 4 != 0 {
        return Err(FormatError::MalformedLabel {
            path: path.to_path_buf(),
            len: bytes.len() as u64,
        });
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
        .collect())
}

pub fn write_label_file(path: impl AsRef<Path>, labels: &[u32]) -> Result<(), FormatError> {
    let path = path.as_ref();
    let mut bytes = Vec::with_capacity(labels.len() * 4);
    for v in labels {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| FormatError::io(path, e))
}
