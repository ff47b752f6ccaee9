//! IDX containers as MNIST ships them: a big-endian `u32` magic, big-endian
//! `u32` dimension sizes, then unsigned bytes.

use super::{label_table, IngestError};
use crate::data::RawDataset;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

fn read_u32(bytes: &[u8], at: usize) -> Result<u32, IngestError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(IngestError::Truncated {
            expected: at + 4,
            actual: bytes.len(),
        })
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<(), IngestError> {
    let found = read_u32(bytes, 0)?;
    if found != expected {
        return Err(IngestError::BadMagic { expected, found });
    }
    Ok(())
}

fn check_payload(bytes: &[u8], expected: usize) -> Result<(), IngestError> {
    match bytes.len() {
        n if n < expected => Err(IngestError::Truncated {
            expected,
            actual: n,
        }),
        n if n > expected => Err(IngestError::TrailingBytes { extra: n - expected }),
        _ => Ok(()),
    }
}

/// Images as row-major pixel vectors, values unscaled in `[0, 255]`.
pub fn load_idx_images(bytes: &[u8]) -> Result<Vec<Vec<f64>>, IngestError> {
    check_magic(bytes, IMAGES_MAGIC)?;
    let count = read_u32(bytes, 4)? as usize;
    let rows = read_u32(bytes, 8)? as usize;
    let cols = read_u32(bytes, 12)? as usize;
    let size = rows * cols;
    check_payload(bytes, 16 + count * size)?;
    if size == 0 {
        return Ok(vec![Vec::new(); count]);
    }
    Ok(bytes[16..]
        .chunks_exact(size.max(1))
        .take(count)
        .map(|px| px.iter().map(|&b| f64::from(b)).collect())
        .collect())
}

pub fn load_idx_labels(bytes: &[u8]) -> Result<Vec<u8>, IngestError> {
    check_magic(bytes, LABELS_MAGIC)?;
    let count = read_u32(bytes, 4)? as usize;
    check_payload(bytes, 8 + count)?;
    Ok(bytes[8..].to_vec())
}

/// Images file and labels file combined into a dataset; label names are
/// the label byte values.
pub fn load_idx_dataset(images: &[u8], labels: &[u8]) -> Result<RawDataset, IngestError> {
    let vectors = load_idx_images(images)?;
    let raw_labels = load_idx_labels(labels)?;
    if vectors.len() != raw_labels.len() {
        return Err(IngestError::CountMismatch {
            images: vectors.len(),
            labels: raw_labels.len(),
        });
    }
    let strings: Vec<String> = raw_labels.iter().map(u8::to_string).collect();
    let label_names = label_table(strings.iter().map(String::as_str));
    let labels = strings
        .iter()
        .map(|s| label_names.iter().position(|n| n == s).expect("label in table"))
        .collect();
    let rows = read_u32(images, 8)? as usize;
    let cols = read_u32(images, 12)? as usize;
    Ok(RawDataset {
        vectors,
        labels,
        num_classes: label_names.len(),
        dim: rows * cols,
        label_names,
    })
}

/// Inverse of [`load_idx_images`]. Pixels must be integers in `[0, 255]`.
pub fn encode_idx_images(images: &[Vec<f64>], rows: usize, cols: usize) -> Option<Vec<u8>> {
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    out.extend(IMAGES_MAGIC.to_be_bytes());
    for n in [images.len(), rows, cols] {
        out.extend(u32::try_from(n).ok()?.to_be_bytes());
    }
    for img in images {
        if img.len() != rows * cols {
            return None;
        }
        for &p in img {
            if !(0.0..=255.0).contains(&p) || p.fract() != 0.0 {
                return None;
            }
            out.push(p as u8);
        }
    }
    Some(out)
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend(LABELS_MAGIC.to_be_bytes());
    out.extend((labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}
