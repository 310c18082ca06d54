//! The MNDE embedding container.
//!
//! Little-endian layout:
//!
//! | offset | size | field                                  |
//! |--------|------|----------------------------------------|
//! | 0      | 4    | magic `"MNDE"`                         |
//! | 4      | 2    | version `u16` = 1                      |
//! | 6      | 2    | flags `u16`, bit 0 = labels present    |
//! | 8      | 8    | n `u64`                                |
//! | 16     | 4    | d `u32`                                |
//! | 20     | 1    | dtype `u8`, 1 = f32                    |
//! | 21     | 3    | reserved, zero                         |
//! | 24     | 4nd  | coordinates, `f32` row-major           |
//! | ...    | 2n   | labels `u16` (only if flag bit 0 set)  |

use std::fs;
use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};

pub const MNDE_MAGIC: &[u8; 4] = b"MNDE";
const VERSION: u16 = 1;
const DTYPE_F32: u8 = 1;
const FLAG_LABELS: u16 = 1;
const HEADER_LEN: usize = 24;

/// Encodes a dataset into MNDE bytes.
pub fn write_embeddings(ds: &Dataset) -> Result<Vec<u8>> {
    let (n, d) = (ds.n(), ds.dim());
    let d32 = u32::try_from(d).map_err(|_| Error::invalid(format!("dimension {d} exceeds u32")))?;
    let label_bytes = if ds.labels().is_some() { 2 * n } else { 0 };
    let mut buf = Vec::with_capacity(HEADER_LEN + 4 * n * d + label_bytes);
    buf.extend_from_slice(MNDE_MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    let flags = if ds.labels().is_some() { FLAG_LABELS } else { 0 };
    buf.extend_from_slice(&flags.to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(&d32.to_le_bytes());
    buf.push(DTYPE_F32);
    buf.extend_from_slice(&[0u8; 3]);
    for (i, &x) in ds.points().iter().enumerate() {
        let v = x as f32;
        if !v.is_finite() {
            return Err(Error::invalid(format!(
                "coordinate at row {}, column {} overflows f32",
                i / d,
                i % d
            )));
        }
        buf.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(labels) = ds.labels() {
        for &l in labels {
            let v = u16::try_from(l)
                .map_err(|_| Error::invalid(format!("label {l} does not fit in u16")))?;
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(buf)
}

/// Decodes MNDE bytes.
pub fn read_embeddings(bytes: &[u8], name: &str) -> Result<Dataset> {
    if bytes.len() < 4 || &bytes[..4] != MNDE_MAGIC {
        return Err(Error::Format("missing MNDE magic".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Corrupt(format!(
            "header truncated: {} of {HEADER_LEN} bytes",
            bytes.len()
        )));
    }
    let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
    let version = u16_at(4);
    if version != VERSION {
        return Err(Error::Version(format!("MNDE version {version}, expected {VERSION}")));
    }
    let flags = u16_at(6);
    let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let d = u32::from_le_bytes(bytes[16..20].try_into().unwrap()) as u64;
    let dtype = bytes[20];
    if dtype != DTYPE_F32 {
        return Err(Error::Version(format!("unknown dtype code {dtype}")));
    }
    let has_labels = flags & FLAG_LABELS != 0;
    let expected = n
        .checked_mul(d)
        .and_then(|nd| nd.checked_mul(4))
        .and_then(|b| b.checked_add(if has_labels { n.checked_mul(2)? } else { 0 }))
        .and_then(|b| b.checked_add(HEADER_LEN as u64))
        .ok_or_else(|| Error::Corrupt(format!("implausible header n = {n}, d = {d}")))?;
    if (bytes.len() as u64) < expected {
        return Err(Error::Corrupt(format!(
            "payload truncated: {} of {expected} bytes",
            bytes.len()
        )));
    }
    if (bytes.len() as u64) > expected {
        return Err(Error::Corrupt(format!(
            "{} trailing bytes after payload",
            bytes.len() as u64 - expected
        )));
    }
    let (n, d) = (n as usize, d as usize);
    let coord_end = HEADER_LEN + 4 * n * d;
    let points: Vec<f64> = bytes[HEADER_LEN..coord_end]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    let labels = has_labels.then(|| {
        bytes[coord_end..]
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as usize)
            .collect()
    });
    Dataset::new(name, points, n, d, labels).map_err(|e| Error::Corrupt(e.to_string()))
}

pub fn save_embeddings(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = write_embeddings(ds)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_embeddings(&bytes, &name)
}
