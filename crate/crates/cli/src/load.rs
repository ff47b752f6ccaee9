//! Reads the dataset named by a [`DataSpec`].

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cdf_core::ingest::text::{DEFAULT_MIN_DF, DEFAULT_TOP_TOPICS};
use cdf_core::ingest::{self, IngestError, RawDocument, SplitTag, Vocabulary};
use cdf_core::{CdfModel, RawDataset};

use crate::config::{DataSpec, Format, Split};

pub struct Loaded {
    pub raw: RawDataset,
    /// Term list for text corpora.
    pub vocabulary: Option<Vec<String>>,
    /// Loader facts worth reporting, as `key=value` pairs.
    pub notes: Vec<(String, String)>,
}

/// `None` reads a training set; `Some(model)` reads data for that model,
/// reusing its label table and vocabulary.
pub fn load(spec: &DataSpec, model: Option<&CdfModel>) -> Result<Loaded> {
    let format = match spec.format {
        Some(f) => f,
        None if spec.images.is_some() => Format::Idx,
        None if spec.data.is_some() => Format::Sparse,
        None if spec.sgml_dir.is_some() => Format::Reuters,
        None => bail!("no dataset given (use --data, --images/--labels or --sgml-dir)"),
    };
    let mut loaded = match format {
        Format::Idx => {
            let images = read(required(&spec.images, "--images")?)?;
            let labels = read(required(&spec.labels, "--labels")?)?;
            plain(ingest::load_idx_dataset(&images, &labels)?)
        }
        Format::Sparse => load_sparse(spec, model)?,
        Format::Reuters => load_reuters(spec, model)?,
    };

    if !spec.classes.is_empty() || spec.per_class.is_some() {
        let keep: Vec<&str> = if spec.classes.is_empty() {
            loaded.raw.label_names.iter().map(String::as_str).collect()
        } else {
            spec.classes.iter().map(String::as_str).collect()
        };
        loaded.raw = loaded.raw.select_classes(&keep, spec.per_class)?;
    }

    if let Some(model) = model {
        if loaded.raw.dim != model.dim {
            bail!(
                "dimension mismatch: model expects N={} but the dataset has N={}",
                model.dim,
                loaded.raw.dim
            );
        }
        loaded.raw.align_labels(&model.label_names)?;
    }
    Ok(loaded)
}

fn plain(raw: RawDataset) -> Loaded {
    Loaded {
        raw,
        vocabulary: None,
        notes: Vec::new(),
    }
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref().ok_or_else(|| anyhow!("missing {flag}"))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_sparse(spec: &DataSpec, model: Option<&CdfModel>) -> Result<Loaded> {
    let path = required(&spec.data, "--data")?;
    let text = String::from_utf8(read(path)?).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let parsed = ingest::load_sparse(&text, spec.dim).with_context(|| format!("cannot parse {}", path.display()));
    let mut raw = match (parsed, model) {
        (Ok(raw), _) => raw,
        // An empty file is a valid, empty input for a trained model.
        (Err(e), Some(m)) if e.downcast_ref::<IngestError>() == Some(&IngestError::NoSamples) => RawDataset {
            num_classes: m.num_classes,
            dim: m.dim,
            label_names: m.label_names.clone(),
            ..RawDataset::default()
        },
        (Err(e), _) => return Err(e),
    };
    // Absent trailing indices are zeros, so a narrower file is padded up to
    // the model's dimension unless a dimension was given explicitly.
    if let Some(m) = model {
        if spec.dim.is_none() && raw.dim < m.dim {
            for v in &mut raw.vectors {
                v.resize(m.dim, 0.0);
            }
            raw.dim = m.dim;
        }
    }
    Ok(plain(raw))
}

fn sgml_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).with_context(|| format!("cannot read {}", dir.display()))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.with_context(|| format!("cannot read {}", dir.display()))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("reut2-") && name.ends_with(".sgm") {
            files.push(path);
        }
    }
    if files.is_empty() {
        bail!("no reut2-*.sgm files in {}", dir.display());
    }
    files.sort();
    Ok(files)
}

fn load_reuters(spec: &DataSpec, model: Option<&CdfModel>) -> Result<Loaded> {
    let dir = required(&spec.sgml_dir, "--sgml-dir")?;
    let mut docs: Vec<RawDocument> = Vec::new();
    for file in sgml_files(dir)? {
        // The corpus is Latin-1 in places; undecodable bytes are replaced.
        let text = String::from_utf8_lossy(&read(&file)?).into_owned();
        docs.extend(ingest::parse_reuters_sgml(&text).with_context(|| format!("cannot parse {}", file.display()))?);
    }
    let split = spec.split.unwrap_or(if model.is_some() { Split::Test } else { Split::Train });
    let tag = match split {
        Split::Train => SplitTag::Train,
        Split::Test => SplitTag::Test,
    };

    let (vocabulary, classes) = match model {
        Some(m) => {
            let terms = m
                .vocabulary
                .clone()
                .ok_or_else(|| anyhow!("the model was not trained on a text corpus"))?;
            (Vocabulary::from_terms(terms), m.label_names.clone())
        }
        None => {
            let min_df = spec.min_df.unwrap_or(DEFAULT_MIN_DF);
            let top = spec.top_topics.unwrap_or(DEFAULT_TOP_TOPICS);
            (ingest::build_vocabulary(&docs, min_df), ingest::top_topics(&docs, top))
        }
    };
    let chosen: Vec<RawDocument> = docs.into_iter().filter(|d| d.split_tag == tag).collect();
    let bow = ingest::vectorize_bow(&chosen, &vocabulary, &classes)?;
    let notes = vec![
        ("data.documents".to_string(), chosen.len().to_string()),
        ("data.kept".to_string(), bow.dataset.len().to_string()),
        ("data.excluded_no_topic".to_string(), bow.excluded_no_topic.to_string()),
        ("data.excluded_multi_topic".to_string(), bow.excluded_multi_topic.to_string()),
        ("data.vocabulary".to_string(), vocabulary.len().to_string()),
    ];
    Ok(Loaded {
        raw: bow.dataset,
        vocabulary: Some(vocabulary.terms().to_vec()),
        notes,
    })
}
