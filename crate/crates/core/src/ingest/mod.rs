//! Dataset loaders. All parsers work on in-memory bytes or text; reading
//! files is left to the caller.

pub mod idx;
pub mod reuters;
pub mod sparse;
pub mod text;

use thiserror::Error;

pub use idx::{encode_idx_images, encode_idx_labels, load_idx_dataset, load_idx_images, load_idx_labels};
pub use reuters::{parse_reuters_sgml, RawDocument, SplitTag};
pub use sparse::load_sparse;
pub use text::{build_vocabulary, modapte_datasets, tokenize, top_topics, vectorize_bow, BowOutput, TextSplits, Vocabulary};

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("bad magic number 0x{found:08x}, expected 0x{expected:08x}")]
    BadMagic { expected: u32, found: u32 },

    #[error("truncated payload: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("{extra} unexpected bytes after the payload")]
    TrailingBytes { extra: usize },

    #[error("{images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: index {index} is not greater than the previous index")]
    NonIncreasingIndex { line: usize, index: usize },

    #[error("line {line}: negative value at index {index}")]
    NegativeValue { line: usize, index: usize },

    #[error("no samples")]
    NoSamples,

    #[error("unclosed REUTERS element starting at byte {offset}")]
    UnclosedElement { offset: usize },

    #[error("REUTERS element at byte {offset} has no NEWID attribute")]
    MissingNewId { offset: usize },

    #[error("empty vocabulary")]
    EmptyVocabulary,
}

/// Dense ids for a set of label strings: numeric order when every label
/// parses as a number, lexicographic order otherwise.
pub(crate) fn label_table<'a>(labels: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut names: Vec<String> = labels.into_iter().map(str::to_string).collect();
    names.sort();
    names.dedup();
    let numeric: Option<Vec<f64>> = names.iter().map(|n| n.parse::<f64>().ok()).collect();
    if let Some(values) = numeric {
        let mut paired: Vec<(f64, String)> = values.into_iter().zip(names).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0));
        names = paired.into_iter().map(|(_, n)| n).collect();
    }
    names
}
