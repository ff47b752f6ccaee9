//! Acceptance run: one line per criterion, nonzero exit on any failure.
//!
//! Criteria that need the real corpora read them from directories named by
//! environment variables and report NOT RUN when those are unset:
//!
//! * `CDF_MNIST_DIR`: the four uncompressed MNIST IDX files.
//! * `CDF_MNIST_FULL=1`: also run the all-digit reproduction (long).
//! * `CDF_MNIST_PIN`: pinned test error of the digit 0/1 run, checked to ±0.005.
//! * `CDF_REUTERS_DIR`: the `reut2-*.sgm` files.
//!
//! Build with `--release` when running the data criteria; their time limits
//! assume optimized code.

mod common;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cdf_core::cdf::kl_divergence;
use cdf_core::ingest::text::{DEFAULT_MIN_DF, DEFAULT_TOP_TOPICS};
use cdf_core::ingest::{load_idx_dataset, modapte_datasets, parse_reuters_sgml};
use cdf_core::metrics::{confusion, error_rate, macro_micro_f, ConfusionMatrix};
use cdf_core::svm::{smo_train, GridCell, KernelSpec, SmoSettings};
use cdf_core::{multiclass, Dataset, FeatureMode, ModelConfig, RawDataset};
use common::{distribution, gaussian_run, hard_margin_oracle, invariants, kl_oracle, rng, ten_points, text_comparison};
use rand::Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    NotRun(String),
}

use Outcome::{Fail, NotRun, Pass};

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let spent = start.elapsed();
    if spent <= limit {
        Pass(detail)
    } else {
        Fail(format!("{detail}; took {:.1}s, limit {:.0}s", spent.as_secs_f64(), limit.as_secs_f64()))
    }
}

fn kl_matches_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0xC1);
    let eps = 1e-9;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let len = r.random_range(2..=512);
        let p = distribution(&mut r, len, 0.2);
        let q = distribution(&mut r, len, 0.2);
        let got = match kl_divergence(&p, &q, eps) {
            Ok(v) => v,
            Err(e) => return Fail(format!("kl_divergence rejected a valid pair: {e}")),
        };
        worst = worst.max((got - kl_oracle(&p, &q, eps)).abs());
    }
    if worst > 1e-9 {
        return Fail(format!("max abs deviation {worst:.3e} > 1e-9"));
    }
    within(Duration::from_secs(1), start, format!("100 pairs, max abs deviation {worst:.3e}"))
}

fn smo_matches_oracle() -> Outcome {
    let start = Instant::now();
    let settings = SmoSettings::default();

    // Two points: the dual optimum is w = -1, b = 1.
    let x = vec![vec![0.0], vec![2.0]];
    let y = vec![1.0, -1.0];
    let two = match smo_train(&x, &y, 1000.0, KernelSpec::linear(), &settings) {
        Ok(m) => m,
        Err(e) => return Fail(e.to_string()),
    };
    let mut worst = 0.0f64;
    for t in [-1.0, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
        let d = two.decision(&[t]).unwrap();
        let want: f64 = 1.0 - t;
        if t != 1.0 && (d > 0.0) != (want > 0.0) {
            return Fail(format!("2-point: sign differs at x={t}"));
        }
        worst = worst.max((d - want).abs());
    }

    let (x, y) = ten_points();
    let oracle = hard_margin_oracle(&x, &y);
    let ten = match smo_train(&x, &y, 1000.0, KernelSpec::linear(), &settings) {
        Ok(m) => m,
        Err(e) => return Fail(e.to_string()),
    };
    let probes = (-4..=8).flat_map(|i| (-4..=8).map(move |j| vec![f64::from(i) * 0.5, f64::from(j) * 0.5]));
    for p in x.iter().cloned().chain(probes) {
        let (d, want) = (ten.decision(&p).unwrap(), oracle.eval(&p));
        if want.abs() > 1e-3 && (d > 0.0) != (want > 0.0) {
            return Fail(format!("10-point: class differs at {p:?}"));
        }
        worst = worst.max((d - want).abs());
    }
    for (xi, yi) in x.iter().zip(&y) {
        if (ten.decision(xi).unwrap() > 0.0) != (*yi > 0.0) {
            return Fail(format!("10-point: training point {xi:?} misclassified"));
        }
    }
    if worst > 1e-3 {
        return Fail(format!("max decision deviation {worst:.3e} > 1e-3"));
    }
    within(Duration::from_secs(5), start, format!("max decision deviation {worst:.3e}"))
}

const MODES: [FeatureMode; 3] = [FeatureMode::DualKl, FeatureMode::ScalarKl, FeatureMode::ElementwiseKl];
const GAUSSIAN_SEED: u64 = 2024;

fn gaussian_pipeline() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for mode in MODES {
        let run = gaussian_run(GAUSSIAN_SEED, 100, mode);
        if run.test_errors != 0 {
            return Fail(format!("{mode:?}: {} of {} test samples wrong", run.test_errors, run.test_size));
        }
        parts.push(format!("{mode:?} 0/{}", run.test_size));
    }
    within(Duration::from_secs(30), start, parts.join(", "))
}

fn read(dir: &Path, name: &str) -> Result<Vec<u8>, String> {
    let path: PathBuf = dir.join(name);
    std::fs::read(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn mnist(dir: &Path, train: bool) -> Result<RawDataset, String> {
    let prefix = if train { "train" } else { "t10k" };
    let images = read(dir, &format!("{prefix}-images-idx3-ubyte"))?;
    let labels = read(dir, &format!("{prefix}-labels-idx1-ubyte"))?;
    load_idx_dataset(&images, &labels).map_err(|e| e.to_string())
}

fn mnist_dir() -> Option<PathBuf> {
    std::env::var_os("CDF_MNIST_DIR").map(PathBuf::from)
}

fn test_error(model: &cdf_core::CdfModel, test: &RawDataset) -> Result<f64, String> {
    let preds: Vec<usize> = multiclass::predict_batch(model, &test.vectors)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    error_rate(&preds, &test.labels).map_err(|e| e.to_string())
}

fn mnist_pair() -> Outcome {
    let Some(dir) = mnist_dir() else {
        return NotRun("set CDF_MNIST_DIR to the MNIST IDX files".into());
    };
    let start = Instant::now();
    let run = || -> Result<(f64, usize), String> {
        let train = mnist(&dir, true)?.select_classes(&["0", "1"], Some(500)).map_err(|e| e.to_string())?;
        let mut test = mnist(&dir, false)?.select_classes(&["0", "1"], None).map_err(|e| e.to_string())?;
        test.align_labels(&train.label_names).map_err(|e| e.to_string())?;
        let data = Dataset::new(train).map_err(|e| e.to_string())?;
        let model = multiclass::train(&data, &ModelConfig::default()).map_err(|e| e.to_string())?;
        Ok((test_error(&model, &test)?, test.len()))
    };
    let (err, n) = match run() {
        Ok(v) => v,
        Err(e) => return Fail(e),
    };
    let mut detail = format!("test error {:.4} on {n} images", err);
    if err > 0.02 {
        return Fail(format!("{detail} > 0.02"));
    }
    match std::env::var("CDF_MNIST_PIN").ok().and_then(|v| v.parse::<f64>().ok()) {
        Some(pin) if (err - pin).abs() > 0.005 => return Fail(format!("{detail}, outside pin {pin} ± 0.005")),
        Some(pin) => detail.push_str(&format!(", within pin {pin} ± 0.005")),
        None => detail.push_str(", no regression pin set"),
    }
    within(Duration::from_secs(120), start, detail)
}

fn mnist_full() -> Outcome {
    let Some(dir) = mnist_dir() else {
        return NotRun("set CDF_MNIST_DIR and CDF_MNIST_FULL=1".into());
    };
    if std::env::var("CDF_MNIST_FULL").as_deref() != Ok("1") {
        return NotRun("long run; set CDF_MNIST_FULL=1".into());
    }
    let start = Instant::now();
    let run = || -> Result<(f64, GridCell), String> {
        let train = Dataset::new(mnist(&dir, true)?).map_err(|e| e.to_string())?;
        let mut test = mnist(&dir, false)?;
        test.align_labels(train.label_names()).map_err(|e| e.to_string())?;
        let mut base = ModelConfig::default();
        base.cdf.feature_mode = FeatureMode::DualKl;
        base.svm.kernel = cdf_core::KernelChoice::default();
        let mut grid = Vec::new();
        for c in [0.1, 1.0, 10.0, 100.0] {
            for b in [0.5, 1.0, 1.5, 2.0] {
                for b_prime in [0.5, 1.0, 1.5, 2.0] {
                    grid.push(GridCell {
                        c,
                        kernel: base.svm.kernel,
                        b,
                        b_prime,
                    });
                }
            }
        }
        let cv = multiclass::cross_validate(&train, &grid, 3, &base).map_err(|e| e.to_string())?;
        let cell = *cv.best();
        let model = multiclass::train(&train, &multiclass::apply_cell(&base, &cell)).map_err(|e| e.to_string())?;
        Ok((test_error(&model, &test)?, cell))
    };
    let (err, cell) = match run() {
        Ok(v) => v,
        Err(e) => return Fail(e),
    };
    let detail = format!(
        "test error {err:.4} (stretch target 0.0125) at C={} b={} b'={}",
        cell.c, cell.b, cell.b_prime
    );
    if err > 0.025 {
        return Fail(format!("{detail} > 0.025"));
    }
    within(Duration::from_secs(3600), start, detail)
}

fn reuters_beats_tfidf() -> Outcome {
    let Some(dir) = std::env::var_os("CDF_REUTERS_DIR").map(PathBuf::from) else {
        return NotRun("set CDF_REUTERS_DIR to the reut2-*.sgm files".into());
    };
    let start = Instant::now();
    let run = || -> Result<(f64, f64), String> {
        let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
            .map_err(|e| format!("cannot read {}: {e}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
                name.starts_with("reut2-") && name.ends_with(".sgm")
            })
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(format!("no reut2-*.sgm files in {}", dir.display()));
        }
        let mut docs = Vec::new();
        for f in files {
            let bytes = std::fs::read(&f).map_err(|e| format!("cannot read {}: {e}", f.display()))?;
            docs.extend(parse_reuters_sgml(&String::from_utf8_lossy(&bytes)).map_err(|e| e.to_string())?);
        }
        let splits = modapte_datasets(&docs, DEFAULT_MIN_DF, DEFAULT_TOP_TOPICS).map_err(|e| e.to_string())?;
        Ok(text_comparison(&splits.train.dataset, &splits.test.dataset, &ModelConfig::default()))
    };
    let (cdf, tfidf) = match run() {
        Ok(v) => v,
        Err(e) => return Fail(e),
    };
    let detail = format!("micro-F CDF {cdf:.4} vs TF-IDF {tfidf:.4}");
    if cdf <= tfidf {
        return Fail(detail);
    }
    within(Duration::from_secs(900), start, detail)
}

fn metrics_oracle() -> Outcome {
    // Rows are true classes. Class 0: tp 8, fn 2, fp 3. Class 1: tp 7, fn 3, fp 2.
    let cm = ConfusionMatrix::from_counts(vec![vec![8, 2], vec![3, 7]]).unwrap();
    let s = macro_micro_f(&cm).unwrap();
    let f0 = 16.0 / 21.0;
    let f1 = 14.0 / 19.0;
    let checks = [
        ("P0", s.per_class[0].precision, 8.0 / 11.0),
        ("R0", s.per_class[0].recall, 0.8),
        ("P1", s.per_class[1].precision, 7.0 / 9.0),
        ("R1", s.per_class[1].recall, 0.7),
        ("F0", s.per_class[0].f1, f0),
        ("F1", s.per_class[1].f1, f1),
        ("macro", s.macro_f, (f0 + f1) / 2.0),
        ("micro", s.micro_f, 0.75),
    ];
    for (name, got, want) in checks {
        if (got - want).abs() > 1e-9 {
            return Fail(format!("{name} = {got}, expected {want}"));
        }
    }
    let mut r = rng(0xC7);
    for set in 0..50 {
        let m = r.random_range(2..10);
        let n = r.random_range(1..500);
        let truth: Vec<usize> = (0..n).map(|_| r.random_range(0..m)).collect();
        let preds: Vec<usize> = truth
            .iter()
            .map(|&t| if r.random::<f64>() < 0.7 { t } else { r.random_range(0..m) })
            .collect();
        let micro = macro_micro_f(&confusion(&preds, &truth, m).unwrap()).unwrap().micro_f;
        let acc = 1.0 - error_rate(&preds, &truth).unwrap();
        if micro.to_bits() != acc.to_bits() {
            return Fail(format!("set {set}: micro-F {micro} != 1 - error {acc}"));
        }
    }
    Pass("hand-computed matrix within 1e-9; micro-F == 1 - error on 50 sets".into())
}

fn invariant_suite() -> Outcome {
    let mut failed = Vec::new();
    let all = invariants::all();
    for (name, tag, property) in &all {
        if let Err(e) = invariants::check(*tag, property) {
            failed.push(format!("{name}: {e}"));
        }
    }
    if failed.is_empty() {
        Pass(format!("{} properties x {} cases", all.len(), invariants::CASES))
    } else {
        Fail(failed.join("; "))
    }
}

fn determinism() -> Outcome {
    for mode in MODES {
        let a = gaussian_run(GAUSSIAN_SEED, 100, mode);
        let b = gaussian_run(GAUSSIAN_SEED, 100, mode);
        if a.model_json != b.model_json {
            return Fail(format!("{mode:?}: model files differ"));
        }
        if a.report != b.report {
            return Fail(format!("{mode:?}: reports differ"));
        }
    }
    Pass("identical model files and reports in every mode".into())
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("KL oracle equivalence", kl_matches_oracle),
        ("SMO correctness", smo_matches_oracle),
        ("synthetic end-to-end", gaussian_pipeline),
        ("MNIST digits 0/1", mnist_pair),
        ("MNIST full", mnist_full),
        ("Reuters CDF vs TF-IDF", reuters_beats_tfidf),
        ("metrics oracle", metrics_oracle),
        ("invariant suite", invariant_suite),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (k, (name, criterion)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = criterion();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failures += 1;
                ("FAIL", d)
            }
            NotRun(d) => ("NOT RUN", d),
        };
        println!("criterion {} {name}: {tag} ({detail}) [{secs:.2}s]", k + 1);
    }
    if failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
