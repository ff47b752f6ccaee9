mod args;
mod config;
mod load;

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use cdf_core::report::{cv_report, evaluation_report, pair_report, Report};
use cdf_core::{data, multiclass, CdfModel, Dataset};
use clap::Parser;

use args::{Cli, Command, CommonArgs, InspectArgs};
use config::RunConfig;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => train(&a),
        Command::Eval(a) => eval(&a),
        Command::Predict(a) => predict(&a),
        Command::Inspect(a) => inspect(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn setup(args: &CommonArgs) -> Result<RunConfig> {
    let cfg = RunConfig::resolve(args)?;
    if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global()
            .context("cannot start worker threads")?;
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Wall-clock timings go to standard error so reports stay reproducible.
fn timing(key: &str, start: Instant) {
    eprintln!("{key}={:.3}", start.elapsed().as_secs_f64());
}

fn echo(report: &mut Report, cfg: &RunConfig) -> Result<()> {
    for (k, v) in cfg.echo()? {
        report.kv(k, v);
    }
    Ok(())
}

fn load_model(path: Option<&Path>) -> Result<CdfModel> {
    let path = path.ok_or_else(|| anyhow!("missing --model"))?;
    CdfModel::load(path).with_context(|| format!("cannot load model {}", path.display()))
}

fn train(args: &CommonArgs) -> Result<()> {
    let cfg = setup(args)?;
    let model_path = args.model.as_deref().ok_or_else(|| anyhow!("missing --model (where to write the model)"))?;
    let loaded = load::load(&cfg.data, None)?;
    let dataset = Dataset::new(loaded.raw)?;

    let mut report = Report::new();
    report.kv("command", "train");
    echo(&mut report, &cfg)?;
    for (k, v) in &loaded.notes {
        report.kv(k.as_str(), v);
    }
    report
        .kv("data.samples", dataset.len())
        .kv("data.dim", dataset.dim())
        .kv("data.classes", dataset.num_classes());

    let mut model_cfg = cfg.model_config();
    if cfg.cv.folds >= 2 {
        let start = Instant::now();
        let grid = cfg.grid()?;
        let cv = multiclass::cross_validate(&dataset, &grid, cfg.cv.folds, &model_cfg)?;
        timing("time.cv_seconds", start);
        model_cfg = multiclass::apply_cell(&model_cfg, cv.best());
        report.extend(cv_report(&cv));
    }
    report
        .kv("chosen.c", model_cfg.svm.c)
        .kv("chosen.b", model_cfg.cdf.b)
        .kv("chosen.b_prime", model_cfg.cdf.b_prime)
        .kv("seed", model_cfg.svm.solver.seed);

    let start = Instant::now();
    let mut model = multiclass::train(&dataset, &model_cfg)?;
    timing("time.train_seconds", start);
    model.vocabulary = loaded.vocabulary;
    model
        .save(model_path)
        .with_context(|| format!("cannot write model {}", model_path.display()))?;

    report.extend(pair_report(&model, false));
    emit(args.out.as_deref(), &report.to_string())
}

fn eval(args: &CommonArgs) -> Result<()> {
    let cfg = setup(args)?;
    let model = load_model(args.model.as_deref())?;
    let loaded = load::load(&cfg.data, Some(&model))?;
    if loaded.raw.is_empty() {
        bail!("the evaluation set has no samples");
    }
    let violations = data::validate_samples(&loaded.raw);
    if !violations.is_empty() {
        bail!("invalid evaluation set: {}", join(&violations));
    }

    let start = Instant::now();
    let predictions = multiclass::predict_batch(&model, &loaded.raw.vectors)?;
    timing("time.eval_seconds", start);
    let preds: Vec<usize> = predictions.iter().map(|(c, _)| *c).collect();

    let mut report = Report::new();
    report.kv("command", "eval");
    for (k, v) in &loaded.notes {
        report.kv(k.as_str(), v);
    }
    report.extend(evaluation_report(&preds, &loaded.raw.labels, &model.label_names)?);
    emit(args.out.as_deref(), &report.to_string())
}

fn predict(args: &CommonArgs) -> Result<()> {
    let cfg = setup(args)?;
    let model = load_model(args.model.as_deref())?;
    let loaded = load::load(&cfg.data, Some(&model))?;
    let violations = data::validate_samples(&loaded.raw);
    if !violations.is_empty() {
        bail!("invalid input: {}", join(&violations));
    }
    let mut out = String::new();
    for (k, (class, votes)) in multiclass::predict_batch(&model, &loaded.raw.vectors)?.iter().enumerate() {
        let _ = writeln!(
            out,
            "{k} {} {} {}",
            model.label_names[*class],
            votes.votes[*class],
            votes.margin_sums[*class]
        );
    }
    emit(args.out.as_deref(), &out)
}

fn inspect(args: &InspectArgs) -> Result<()> {
    let model = load_model(Some(&args.model))?;
    let mut report = Report::new();
    report.kv("command", "inspect");
    report.extend(pair_report(&model, args.dump_masks));
    emit(args.out.as_deref(), &report.to_string())
}

fn join(violations: &[data::Violation]) -> String {
    let shown: Vec<String> = violations.iter().take(5).map(ToString::to_string).collect();
    let more = violations.len().saturating_sub(5);
    if more > 0 {
        format!("{} (and {more} more)", shown.join("; "))
    } else {
        shown.join("; ")
    }
}
