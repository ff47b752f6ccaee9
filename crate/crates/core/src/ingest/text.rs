//! Bag-of-words vectorization for parsed documents.
//!
//! Tokens are maximal runs of ASCII letters, lowercased, at least two
//! characters long. The vocabulary keeps terms whose document frequency over
//! the training split reaches `min_df`, indexed in lexicographic order.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::reuters::{RawDocument, SplitTag};
use super::IngestError;
use crate::data::RawDataset;

pub const DEFAULT_MIN_DF: usize = 3;
pub const DEFAULT_TOP_TOPICS: usize = 10;

pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_ascii_alphabetic())
        .filter(|t| t.len() >= 2)
        .map(str::to_ascii_lowercase)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    document_frequency: Vec<usize>,
}

impl Vocabulary {
    /// Vocabulary over a fixed term list (e.g. one stored in a model).
    /// Document frequencies are unknown and set to 1.
    pub fn from_terms(terms: Vec<String>) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let document_frequency = vec![1; terms.len()];
        Vocabulary {
            terms,
            index,
            document_frequency,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.index_of(term).map(|i| self.document_frequency[i])
    }

    /// Raw term counts of `text` over this vocabulary.
    pub fn counts(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.terms.len()];
        for tok in tokenize(text) {
            if let Some(i) = self.index_of(&tok) {
                v[i] += 1.0;
            }
        }
        v
    }
}

pub fn build_vocabulary(docs: &[RawDocument], min_df: usize) -> Vocabulary {
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in docs.iter().filter(|d| d.split_tag == SplitTag::Train) {
        let unique: BTreeSet<String> = tokenize(&doc.body_text).collect();
        for t in unique {
            *df.entry(t).or_default() += 1;
        }
    }
    let (terms, document_frequency): (Vec<String>, Vec<usize>) =
        df.into_iter().filter(|(_, n)| *n >= min_df.max(1)).unzip();
    let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Vocabulary {
        terms,
        index,
        document_frequency,
    }
}

/// The `k` topics assigned to the most training documents, ties broken by
/// name, returned in lexicographic order.
pub fn top_topics(docs: &[RawDocument], k: usize) -> Vec<String> {
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs.iter().filter(|d| d.split_tag == SplitTag::Train) {
        let unique: BTreeSet<&str> = doc.topics.iter().map(String::as_str).collect();
        for t in unique {
            *freq.entry(t).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = freq.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let mut top: Vec<String> = ranked.into_iter().take(k).map(|(t, _)| t.to_string()).collect();
    top.sort();
    top
}

/// Vectorized documents and what the single-label filter dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct BowOutput {
    pub dataset: RawDataset,
    pub doc_ids: Vec<String>,
    /// Documents with none of the class topics.
    pub excluded_no_topic: usize,
    /// Documents with more than one of the class topics.
    pub excluded_multi_topic: usize,
}

/// Term-count vectors for documents carrying exactly one of `classes`; that
/// topic is the class label.
pub fn vectorize_bow(docs: &[RawDocument], vocab: &Vocabulary, classes: &[String]) -> Result<BowOutput, IngestError> {
    if vocab.is_empty() {
        return Err(IngestError::EmptyVocabulary);
    }
    let mut out = BowOutput {
        dataset: RawDataset {
            vectors: Vec::new(),
            labels: Vec::new(),
            num_classes: classes.len(),
            dim: vocab.len(),
            label_names: classes.to_vec(),
        },
        doc_ids: Vec::new(),
        excluded_no_topic: 0,
        excluded_multi_topic: 0,
    };
    for doc in docs {
        let assigned: BTreeSet<usize> = doc
            .topics
            .iter()
            .filter_map(|t| classes.iter().position(|c| c == t))
            .collect();
        match assigned.len() {
            0 => out.excluded_no_topic += 1,
            1 => {
                out.dataset.vectors.push(vocab.counts(&doc.body_text));
                out.dataset.labels.push(*assigned.first().expect("one topic"));
                out.doc_ids.push(doc.doc_id.clone());
            }
            _ => out.excluded_multi_topic += 1,
        }
    }
    Ok(out)
}

/// Train and test bag-of-words sets over the standard split tags.
#[derive(Clone, Debug)]
pub struct TextSplits {
    pub vocabulary: Vocabulary,
    pub topics: Vec<String>,
    pub train: BowOutput,
    pub test: BowOutput,
}

/// Vocabulary and topic list from the training split, then single-label
/// train and test sets over them.
pub fn modapte_datasets(docs: &[RawDocument], min_df: usize, top_k: usize) -> Result<TextSplits, IngestError> {
    let vocabulary = build_vocabulary(docs, min_df);
    let topics = top_topics(docs, top_k);
    let split = |tag: SplitTag| -> Vec<RawDocument> {
        docs.iter().filter(|d| d.split_tag == tag).cloned().collect()
    };
    let train = vectorize_bow(&split(SplitTag::Train), &vocabulary, &topics)?;
    let test = vectorize_bow(&split(SplitTag::Test), &vocabulary, &topics)?;
    Ok(TextSplits {
        vocabulary,
        topics,
        train,
        test,
    })
}
