//! Plain-text reports: aligned tables for people, `key=value` lines for
//! scripts. Everything here is deterministic; timings are left to callers.

use std::fmt::{self, Display, Write as _};

use crate::data::ClassId;
use crate::error::Result;
use crate::metrics::{confusion, error_rate, macro_micro_f, ConfusionMatrix, FScores};
use crate::model::CdfModel;
use crate::svm::CvResult;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    sections: Vec<(String, String)>,
    values: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn kv(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        self.values.push((key.into(), value.to_string()));
        self
    }

    pub fn section(&mut self, title: impl Into<String>, body: impl Into<String>) -> &mut Self {
        self.sections.push((title.into(), body.into()));
        self
    }

    pub fn extend(&mut self, other: Report) -> &mut Self {
        self.sections.extend(other.sections);
        self.values.extend(other.values);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Only the `key=value` lines.
    pub fn machine_readable(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (title, body) in &self.sections {
            writeln!(f, "== {title}")?;
            write!(f, "{body}")?;
            if !body.ends_with('\n') {
                writeln!(f)?;
            }
            writeln!(f)?;
        }
        write!(f, "{}", self.machine_readable())
    }
}

fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width = vec![0; cols];
    for row in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let line: Vec<String> = row
            .iter()
            .zip(&width)
            .enumerate()
            .map(|(i, (cell, w))| if i == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

pub fn format_confusion(cm: &ConfusionMatrix, names: &[String]) -> String {
    let mut header = vec!["true\\pred".to_string()];
    header.extend(names.iter().cloned());
    let rows: Vec<Vec<String>> = cm
        .counts
        .iter()
        .zip(names)
        .map(|(row, name)| {
            std::iter::once(name.clone())
                .chain(row.iter().map(u64::to_string))
                .collect()
        })
        .collect();
    table(&header, &rows)
}

pub fn format_scores(scores: &FScores, names: &[String]) -> String {
    let header: Vec<String> = ["class", "precision", "recall", "f1"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = scores
        .per_class
        .iter()
        .zip(names)
        .map(|(s, n)| {
            vec![
                n.clone(),
                format!("{:.4}", s.precision),
                format!("{:.4}", s.recall),
                format!("{:.4}", s.f1),
            ]
        })
        .collect();
    table(&header, &rows)
}

/// Error rate, confusion matrix and F scores for a labelled prediction set.
pub fn evaluation_report(preds: &[ClassId], truth: &[ClassId], names: &[String]) -> Result<Report> {
    let err = error_rate(preds, truth)?;
    let cm = confusion(preds, truth, names.len())?;
    let scores = macro_micro_f(&cm)?;
    let mut r = Report::new();
    r.section("confusion matrix", format_confusion(&cm, names))
        .section("per-class scores", format_scores(&scores, names))
        .kv("samples", preds.len())
        .kv("errors", preds.iter().zip(truth).filter(|(p, t)| p != t).count())
        .kv("error_rate", err)
        .kv("accuracy", cm.trace() as f64 / cm.total as f64)
        .kv("macro_f", scores.macro_f)
        .kv("micro_f", scores.micro_f);
    for (s, n) in scores.per_class.iter().zip(names) {
        r.kv(format!("f1.{n}"), s.f1);
    }
    Ok(r)
}

/// Per-pair selection summary; with `dump_masks`, every mask as an index list.
pub fn pair_report(model: &CdfModel, dump_masks: bool) -> Report {
    let header: Vec<String> = ["pair", "mask", "retained", "mu_xy", "mu_yx", "tau", "tau'", "fallback", "svs"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::new();
    let mut r = Report::new();
    r.kv("classes", model.num_classes).kv("dim", model.dim).kv("pairs", model.pairs.len());
    for p in &model.pairs {
        let c = &p.context;
        let name = format!("{}-{}", model.label_names[c.class_x], model.label_names[c.class_y]);
        rows.push(vec![
            name.clone(),
            c.mask.len().to_string(),
            format!("{:.4}", c.retention()),
            format!("{:.6}", c.mu_xy),
            format!("{:.6}", c.mu_yx),
            format!("{:.6}", c.tau),
            format!("{:.6}", c.tau_prime),
            if c.fallback { "yes".into() } else { "no".into() },
            p.svm.support_vectors.len().to_string(),
        ]);
        let key = format!("pair.{}-{}", c.class_x, c.class_y);
        r.kv(format!("{key}.mask_size"), c.mask.len())
            .kv(format!("{key}.retention"), c.retention())
            .kv(format!("{key}.mu_xy"), c.mu_xy)
            .kv(format!("{key}.mu_yx"), c.mu_yx)
            .kv(format!("{key}.tau"), c.tau)
            .kv(format!("{key}.tau_prime"), c.tau_prime)
            .kv(format!("{key}.fallback"), c.fallback)
            .kv(format!("{key}.support_vectors"), p.svm.support_vectors.len())
            .kv(format!("{key}.converged"), p.svm.training_stats.converged);
        if dump_masks {
            let list: Vec<String> = c.mask.iter().map(usize::to_string).collect();
            r.kv(format!("{key}.mask"), list.join(","));
        }
    }
    r.section("pairs", table(&header, &rows));
    r
}

pub fn cv_report(cv: &CvResult) -> Report {
    let header: Vec<String> = ["cell", "C", "kernel", "b", "b'", "mean_acc"].map(String::from).to_vec();
    let mut r = Report::new();
    let rows: Vec<Vec<String>> = cv
        .table
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let k = &row.cell.kernel;
            let gamma = k.gamma.map_or("auto".to_string(), |g| g.to_string());
            vec![
                i.to_string(),
                row.cell.c.to_string(),
                format!("{:?}(d={},g={},c0={})", k.kind, k.degree, gamma, k.coef0).to_lowercase(),
                row.cell.b.to_string(),
                row.cell.b_prime.to_string(),
                format!("{:.6}", row.mean_accuracy),
            ]
        })
        .collect();
    for (i, row) in cv.table.iter().enumerate() {
        r.kv(format!("cv.cell.{i}.mean_accuracy"), row.mean_accuracy);
    }
    r.kv("cv.best_cell", cv.best_index);
    r.section("cross-validation", table(&header, &rows));
    r
}
