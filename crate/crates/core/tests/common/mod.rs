//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod invariants;

use cdf_core::{Dataset, RawDataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Three Gaussian classes in 20 dimensions. Every class has mean 1 with a
/// bump of +6 on its own block of six dimensions, standard deviation 0.5;
/// negative draws are clipped to zero.
pub fn gaussian_blobs(seed: u64, per_class: usize) -> RawDataset {
    const DIM: usize = 20;
    let mut r = rng(seed);
    let noise: Normal<f64> = Normal::new(0.0, 0.5).unwrap();
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for k in 0..per_class * 3 {
        let class = k % 3;
        let v: Vec<f64> = (0..DIM)
            .map(|i| {
                let mean = if i / 6 == class { 7.0 } else { 1.0 };
                (mean + noise.sample(&mut r)).max(0.0)
            })
            .collect();
        vectors.push(v);
        labels.push(class);
    }
    RawDataset {
        vectors,
        labels,
        num_classes: 3,
        dim: DIM,
        label_names: vec!["a".into(), "b".into(), "c".into()],
    }
}

/// Train and test halves drawn from different seeds.
pub fn gaussian_split(seed: u64, per_class: usize) -> (Dataset, RawDataset) {
    let train = Dataset::new(gaussian_blobs(seed, per_class)).unwrap();
    let test = gaussian_blobs(seed.wrapping_add(0x5EED), per_class);
    (train, test)
}

/// Random probability vector with roughly `zero_share` of exact zeros.
pub fn distribution(r: &mut impl Rng, len: usize, zero_share: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len)
        .map(|_| if r.random::<f64>() < zero_share { 0.0 } else { r.random::<f64>() })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[0] = 1.0;
    }
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

/// Error-free addition: `a + b = s + e` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Error-free product via fused multiply-add.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Double-double accumulator (about 32 significant digits).
#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = two_sum(s, e + self.lo);
        self.hi = hi;
        self.lo = lo;
    }

    /// Adds `a * b` without rounding the product.
    pub fn add_product(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        self.add(e);
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// KL divergence computed as `sum p ln p - sum p ln(q + eps)`, each part
/// accumulated in double-double, clamped at zero.
pub fn kl_oracle(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let mut acc = DoubleDouble::default();
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            acc.add_product(a, a.ln());
            acc.add_product(-a, (b + eps).ln());
        }
    }
    acc.value().max(0.0)
}

/// Hyperplane `w . x + b`.
#[derive(Clone, Copy, Debug)]
pub struct Hyperplane {
    pub w: [f64; 2],
    pub b: f64,
}

impl Hyperplane {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.w[0] * x[0] + self.w[1] * x[1] + self.b
    }
}

fn solve3(m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    let mut a = m;
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..4 {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    Some([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}

/// Ten separable points; the maximum-margin line touches three of them.
pub fn ten_points() -> (Vec<Vec<f64>>, Vec<f64>) {
    let pos = [[2.0, 2.0], [3.0, 1.5], [2.5, 3.0], [4.0, 2.5], [3.5, 4.0]];
    let neg = [[0.0, 0.0], [-1.0, 0.5], [0.5, -1.0], [-0.5, -0.5], [1.0, 0.0]];
    let mut x = Vec::new();
    let mut y = Vec::new();
    for p in pos {
        x.push(p.to_vec());
        y.push(1.0);
    }
    for p in neg {
        x.push(p.to_vec());
        y.push(-1.0);
    }
    (x, y)
}

/// Exact maximum-margin separator of separable 2-D points, by enumerating
/// every candidate support set of two or three points. Each candidate
/// fixes `(w, b)` through `y_i (w . x_i + b) = 1`; the answer is the
/// feasible candidate of smallest `|w|`.
pub fn hard_margin_oracle(x: &[Vec<f64>], y: &[f64]) -> Hyperplane {
    let n = x.len();
    let feasible = |h: &Hyperplane| (0..n).all(|i| y[i] * h.eval(&x[i]) >= 1.0 - 1e-9);
    let norm = |h: &Hyperplane| h.w[0].hypot(h.w[1]);
    let mut best: Option<Hyperplane> = None;
    let mut consider = |h: Hyperplane| {
        if feasible(&h) && best.is_none_or(|b| norm(&h) < norm(&b)) {
            best = Some(h);
        }
    };
    for i in 0..n {
        for j in i + 1..n {
            if y[i] == y[j] {
                continue;
            }
            let (p, m) = if y[i] > 0.0 { (&x[i], &x[j]) } else { (&x[j], &x[i]) };
            let d = [p[0] - m[0], p[1] - m[1]];
            let dd = d[0] * d[0] + d[1] * d[1];
            let w = [2.0 * d[0] / dd, 2.0 * d[1] / dd];
            let b = 1.0 - (w[0] * p[0] + w[1] * p[1]);
            consider(Hyperplane { w, b });
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let rows = [i, j, k].map(|r| [x[r][0], x[r][1], 1.0, y[r]]);
                if let Some([w0, w1, b]) = solve3(rows) {
                    consider(Hyperplane { w: [w0, w1], b });
                }
            }
        }
    }
    best.expect("data are separable")
}

/// Outcome of training on a Gaussian split and scoring the held-out half.
pub struct GaussianRun {
    pub model_json: String,
    pub report: String,
    pub test_errors: usize,
    pub test_size: usize,
}

pub fn gaussian_run(seed: u64, per_class: usize, feature_mode: cdf_core::FeatureMode) -> GaussianRun {
    use cdf_core::{multiclass, report, ModelConfig};
    let (train, test) = gaussian_split(seed, per_class);
    let mut config = ModelConfig::default();
    config.cdf.feature_mode = feature_mode;
    let model = multiclass::train(&train, &config).unwrap();
    let preds: Vec<usize> = multiclass::predict_batch(&model, &test.vectors)
        .unwrap()
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    let test_errors = preds.iter().zip(&test.labels).filter(|(p, t)| p != t).count();
    let mut r = report::pair_report(&model, true);
    r.extend(report::evaluation_report(&preds, &test.labels, &model.label_names).unwrap());
    GaussianRun {
        model_json: model.to_json().unwrap(),
        report: r.to_string(),
        test_errors,
        test_size: test.len(),
    }
}

/// Micro-F of the CDF pipeline and of the TF-IDF baseline on the same split,
/// both with the SVM settings of `config`.
pub fn text_comparison(train: &RawDataset, test: &RawDataset, config: &cdf_core::ModelConfig) -> (f64, f64) {
    use cdf_core::baseline::{fit_idf, transform};
    use cdf_core::metrics::{confusion, macro_micro_f};
    use cdf_core::multiclass::{self, PairwiseSvm};

    let micro = |preds: Vec<usize>| {
        let cm = confusion(&preds, &test.labels, train.num_classes).unwrap();
        macro_micro_f(&cm).unwrap().micro_f
    };
    let winners = |v: Vec<(usize, cdf_core::VoteRecord)>| v.into_iter().map(|(c, _)| c).collect::<Vec<_>>();

    let model = multiclass::train(&Dataset::new(train.clone()).unwrap(), config).unwrap();
    let cdf = micro(winners(multiclass::predict_batch(&model, &test.vectors).unwrap()));

    let idf = fit_idf(&train.vectors).unwrap();
    let weighted = RawDataset {
        vectors: transform(&idf, &train.vectors).unwrap(),
        ..train.clone()
    };
    let baseline = PairwiseSvm::train(&Dataset::new(weighted).unwrap(), &config.svm).unwrap();
    let tfidf = micro(winners(baseline.predict_batch(&transform(&idf, &test.vectors).unwrap()).unwrap()));
    (cdf, tfidf)
}

/// Small newswire-like corpus in SGML: each topic has a handful of
/// indicative words mixed into shared filler, and a few documents carry two
/// topics or none.
pub fn synthetic_sgml(seed: u64, docs: usize) -> String {
    const TOPICS: [(&str, [&str; 4]); 3] = [
        ("grain", ["wheat", "harvest", "bushel", "corn"]),
        ("crude", ["oil", "barrel", "opec", "refinery"]),
        ("money", ["rate", "dollar", "bank", "currency"]),
    ];
    const FILLER: [&str; 8] = ["said", "the", "year", "market", "would", "company", "new", "week"];
    let mut r = rng(seed);
    let mut out = String::new();
    for id in 1..=docs {
        let split = if id % 4 == 0 { "TEST" } else { "TRAIN" };
        let t = r.random_range(0..TOPICS.len());
        let mut topics = vec![TOPICS[t].0];
        match id % 17 {
            0 => topics.push(TOPICS[(t + 1) % 3].0),
            5 => topics.clear(),
            _ => {}
        }
        let words: Vec<&str> = (0..r.random_range(20..40))
            .map(|_| {
                if r.random::<f64>() < 0.3 {
                    TOPICS[t].1[r.random_range(0..4)]
                } else {
                    FILLER[r.random_range(0..FILLER.len())]
                }
            })
            .collect();
        let d: String = topics.iter().map(|t| format!("<D>{t}</D>")).collect();
        out.push_str(&format!(
            "<REUTERS TOPICS=\"YES\" LEWISSPLIT=\"{split}\" NEWID=\"{id}\">\n<TOPICS>{d}</TOPICS>\n\
             <TEXT><TITLE>Item {id}</TITLE><BODY>{}</BODY></TEXT>\n</REUTERS>\n",
            words.join(" ")
        ));
    }
    out
}
