//! EMB1: one point cloud per file.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "EMB1"
//! 4       1     version = 1
//! 5       3     reserved, zero
//! 8       4     n_vectors, u32 little-endian
//! 12      4     dim, u32 little-endian
//! 16      4·n·d payload, f32 little-endian, row-major
//! ```

use std::fs;
use std::path::Path;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

pub const EMB1_MAGIC: &[u8; 4] = b"EMB1";
pub const EMB1_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;

/// Reads an EMB1 file; the cloud id is the path as given.
pub fn read_embeddings(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_embeddings(&bytes, path)
}

/// Parses EMB1 bytes. `source` names the data in errors and becomes the id.
pub fn decode_embeddings(bytes: &[u8], source: &Path) -> Result<PointCloud> {
    let truncated = |expected: u64| Error::TruncatedFile {
        path: source.to_path_buf(),
        offset: bytes.len() as u64,
        expected,
    };
    let header = |offset: u64, reason: String| Error::BadHeader {
        path: source.to_path_buf(),
        offset,
        reason,
    };

    if let Some(i) = (0..4).find(|&i| bytes.get(i).is_some_and(|b| *b != EMB1_MAGIC[i])) {
        return Err(Error::BadMagic {
            path: source.to_path_buf(),
            offset: i as u64,
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(truncated(HEADER_LEN as u64));
    }
    if bytes[4] != EMB1_VERSION {
        return Err(header(4, format!("unsupported version {}", bytes[4])));
    }
    if let Some(i) = (5..8).find(|&i| bytes[i] != 0) {
        return Err(header(i as u64, format!("reserved byte is {:#04x}", bytes[i])));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as u64;
    let dim = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as u64;
    if n == 0 {
        return Err(header(8, "n_vectors is zero".into()));
    }
    if dim == 0 {
        return Err(header(12, "dim is zero".into()));
    }
    let expected = HEADER_LEN as u64 + 4 * n * dim;
    let len = bytes.len() as u64;
    if len < expected {
        return Err(truncated(expected));
    }
    if len > expected {
        return Err(Error::TrailingBytes {
            path: source.to_path_buf(),
            offset: expected,
            extra: len - expected,
        });
    }

    let mut coords = Vec::with_capacity((n * dim) as usize);
    for (k, chunk) in bytes[HEADER_LEN..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::NonFiniteValue {
                path: source.to_path_buf(),
                offset: (HEADER_LEN + 4 * k) as u64,
            });
        }
        coords.push(f64::from(v));
    }
    PointCloud::from_flat(source.to_string_lossy(), dim as usize, coords)
}

/// Serializes a cloud as EMB1. Coordinates are narrowed to f32.
pub fn encode_embeddings(cloud: &PointCloud) -> Result<Vec<u8>> {
    let n = u32::try_from(cloud.len())
        .map_err(|_| Error::Size(format!("{} vectors exceed the u32 count field", cloud.len())))?;
    let dim = u32::try_from(cloud.dim())
        .map_err(|_| Error::Size(format!("dimension {} exceeds the u32 field", cloud.dim())))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * cloud.as_flat().len());
    out.extend_from_slice(EMB1_MAGIC);
    out.extend_from_slice(&[EMB1_VERSION, 0, 0, 0]);
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
    for &c in cloud.as_flat() {
        let v = c as f32;
        if !v.is_finite() {
            return Err(Error::Param(format!("coordinate {c} does not fit in f32")));
        }
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn write_embeddings(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_embeddings(cloud)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
