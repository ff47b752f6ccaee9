//! Sparse text vectors, one sample per line:
//!
//! ```text
//! # comment
//! <label> <index>:<value> <index>:<value> ...
//! ```
//!
//! Indices are 1-based and strictly increasing within a line; absent
//! indices are zero.

use super::{label_table, IngestError};
use crate::data::RawDataset;

/// Parses sparse text. `dim = None` takes the largest index seen.
pub fn load_sparse(text: &str, dim: Option<usize>) -> Result<RawDataset, IngestError> {
    let mut rows: Vec<(&str, Vec<(usize, f64)>)> = Vec::new();
    let mut max_index = 0;
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens.next().expect("non-empty line has a token");
        let mut entries = Vec::new();
        let mut last = 0;
        for tok in tokens {
            let parse_err = || IngestError::Parse {
                line: line_no,
                message: format!("bad entry {tok:?}"),
            };
            let (i, v) = tok.split_once(':').ok_or_else(parse_err)?;
            let index: usize = i.parse().map_err(|_| parse_err())?;
            let value: f64 = v.parse().map_err(|_| parse_err())?;
            if index == 0 {
                return Err(IngestError::Parse {
                    line: line_no,
                    message: "indices are 1-based".into(),
                });
            }
            if index <= last {
                return Err(IngestError::NonIncreasingIndex { line: line_no, index });
            }
            if !value.is_finite() {
                return Err(parse_err());
            }
            if value < 0.0 {
                return Err(IngestError::NegativeValue { line: line_no, index });
            }
            if let Some(d) = dim {
                if index > d {
                    return Err(IngestError::Parse {
                        line: line_no,
                        message: format!("index {index} exceeds dimension {d}"),
                    });
                }
            }
            last = index;
            entries.push((index, value));
        }
        max_index = max_index.max(last);
        rows.push((label, entries));
    }
    if rows.is_empty() {
        return Err(IngestError::NoSamples);
    }
    let dim = dim.unwrap_or(max_index).max(1);
    let label_names = label_table(rows.iter().map(|(l, _)| *l));
    let mut vectors = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (label, entries) in rows {
        let mut v = vec![0.0; dim];
        for (i, x) in entries {
            v[i - 1] = x;
        }
        vectors.push(v);
        labels.push(label_names.iter().position(|n| n == label).expect("label in table"));
    }
    Ok(RawDataset {
        vectors,
        labels,
        num_classes: label_names.len(),
        dim,
        label_names,
    })
}
