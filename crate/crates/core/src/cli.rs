//! Command-line interface.
//!
//! Every subcommand prints a report header with its fully resolved
//! configuration. Reports written with `--out` are JSON or CSV depending on the
//! file extension.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::data::{
    gen_synthetic, manifest_path, read_fvec, read_model, write_fvec, write_model, Dataset,
    Manifest, SynthConfig,
};
use crate::error::{Error, Result};
use crate::eval::{self, BenchConfig, ImageCap, Partition};
use crate::head::{train, AdamConfig, HeadParams, TrainConfig};
use crate::rejector::{self, RejectThreshold};
use crate::sorter::{self, CategoryHistogram, CheckOutcome};
use crate::types::{BanknoteClassLabel, Category, LabeledSample, Provenance};

/// Class count assumed for data files without a manifest.
pub const DEFAULT_CLASSES: usize = 40;

/// Thresholds swept when `--thresholds` is not given.
pub const DEFAULT_SWEEP_THRESHOLDS: [f64; 4] = [0.9986, 0.9972, 0.9932, 0.9803];

#[derive(Debug, Parser)]
#[command(
    name = "banknote",
    version,
    about = "Banknote recognition on feature embeddings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic FVEC dataset and its manifest.
    Gen(GenArgs),
    /// Train a softmax head on the training split.
    Train(TrainArgs),
    /// Calibrate the reject threshold on legacy-rejected genuine notes.
    Calibrate(CalibrateArgs),
    /// Test-split accuracy and confusion matrix, or the training-condition grid.
    Evaluate(EvaluateArgs),
    /// Reject rate and errors over a list of thresholds.
    Sweep(SweepArgs),
    /// Sort one deck of notes into categories.
    Sort(SortArgs),
    /// Sort counterfeit, unfit and fit decks and evaluate the ECB criteria.
    EcbTest(EcbTestArgs),
    /// Time head inference and retraining.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, default_value_t = 40)]
    pub classes: usize,
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    /// One count for every class, or a comma-separated count per class.
    #[arg(long = "per-class", value_delimiter = ',', default_value = "300")]
    pub per_class: Vec<usize>,
    #[arg(long, default_value_t = 6.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 0.0)]
    pub legacy_fraction: f64,
    #[arg(long, default_value_t = 3.0)]
    pub legacy_widening: f64,
    #[arg(long, default_value_t = 0.0)]
    pub legacy_attenuation: f64,
    #[arg(long, default_value_t = 0)]
    pub cat1_count: usize,
    #[arg(long, default_value_t = 1.0)]
    pub cat1_dispersion: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

impl GenArgs {
    fn synth_config(&self) -> SynthConfig {
        SynthConfig {
            n_classes: self.classes,
            dim: self.dim,
            per_class_counts: self.per_class.clone(),
            cluster_separation: self.separation,
            legacy_reject_fraction: self.legacy_fraction,
            legacy_widening: self.legacy_widening,
            legacy_attenuation: self.legacy_attenuation,
            cat1_count: self.cat1_count,
            cat1_dispersion: self.cat1_dispersion,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct AdamArgs {
    #[arg(long, default_value_t = 0.001)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.9)]
    pub beta1: f64,
    #[arg(long, default_value_t = 0.999)]
    pub beta2: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub epsilon: f64,
}

impl AdamArgs {
    fn config(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.lr,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DataArgs {
    /// Input FVEC file.
    #[arg(long)]
    pub data: PathBuf,
    /// Class count; defaults to the manifest next to the data file, else 40.
    #[arg(long)]
    pub classes: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 1000)]
    pub episodes: usize,
    #[arg(long, default_value_t = 300)]
    pub batch: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub adam: AdamArgs,
    /// Seeds both the split and the batch sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Model output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Loss history CSV; defaults to the model path with `.loss.csv`.
    #[arg(long)]
    pub loss_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Share of the calibration population to reject, in (0, 1).
    #[arg(long, default_value_t = 0.05, value_parser = parse_quantile)]
    pub quantile: f64,
    /// Split seed; must match the one used for training.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// ECDF report; defaults to the model path with `.ecdf.csv`.
    #[arg(long, value_parser = parse_report_path)]
    pub ecdf_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long, required_unless_present = "grid")]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    /// Apply the 0-class rule with this threshold.
    #[arg(long, value_parser = parse_threshold)]
    pub threshold: Option<f64>,
    /// Train and evaluate the images-per-class by episodes grid instead.
    #[arg(long)]
    pub grid: bool,
    #[arg(long, value_delimiter = ',', default_value = "50,3000,all")]
    pub caps: Vec<ImageCap>,
    #[arg(long, value_delimiter = ',', default_value = "1000,3000,10000")]
    pub episodes: Vec<usize>,
    #[arg(long, default_value_t = 300)]
    pub batch: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub adam: AdamArgs,
    /// Seeds the split and, with `--grid`, the training runs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_report_path)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = parse_threshold, default_value = "0.9986,0.9972,0.9932,0.9803")]
    pub thresholds: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_report_path)]
    pub out: Option<PathBuf>,
}

/// Outcome of the authenticity and fitness checks for every note in a deck.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeckKind {
    Fit,
    Unfit,
    Counterfeit,
    Suspect,
}

impl DeckKind {
    fn checks(self) -> CheckOutcome {
        match self {
            DeckKind::Fit => CheckOutcome::GENUINE_FIT,
            DeckKind::Unfit => CheckOutcome::GENUINE_UNFIT,
            DeckKind::Counterfeit => CheckOutcome::COUNTERFEIT,
            DeckKind::Suspect => CheckOutcome::SUSPECT,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SortArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub deck: PathBuf,
    #[arg(long, value_parser = parse_threshold)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = DeckKind::Fit)]
    pub kind: DeckKind,
    #[arg(long, value_parser = parse_report_path)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EcbTestArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_parser = parse_threshold)]
    pub threshold: f64,
    #[arg(long)]
    pub counterfeit: PathBuf,
    #[arg(long)]
    pub unfit: PathBuf,
    #[arg(long)]
    pub fit: PathBuf,
    #[arg(long, value_parser = parse_report_path)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Inference inputs and retraining data (accepted genuine notes).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub calls: usize,
    #[arg(long, default_value_t = 0.9986, value_parser = parse_threshold)]
    pub threshold: f64,
    #[arg(long, value_delimiter = ',', default_value = "100,300,1000")]
    pub retrain_episodes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "30,100,300")]
    pub retrain_batches: Vec<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub adam: AdamArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_report_path)]
    pub out: Option<PathBuf>,
}

fn parse_quantile(s: &str) -> std::result::Result<f64, String> {
    let q: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if q > 0.0 && q < 1.0 {
        Ok(q)
    } else {
        Err(format!(
            "quantile must lie strictly between 0 and 1, got {q}"
        ))
    }
}

fn parse_threshold(s: &str) -> std::result::Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&t) {
        Ok(t)
    } else {
        Err(format!("threshold must lie in [0, 1], got {t}"))
    }
}

fn parse_report_path(s: &str) -> std::result::Result<PathBuf, String> {
    let path = PathBuf::from(s);
    match ReportFormat::of(&path) {
        Some(_) => Ok(path),
        None => Err(format!("report path {s:?} must end in .json or .csv")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    fn of(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "json" => Some(ReportFormat::Json),
            "csv" => Some(ReportFormat::Csv),
            _ => None,
        }
    }
}

/// Prints the report header: command name and resolved configuration.
fn header<C: Serialize>(out: &mut dyn Write, command: &str, config: &C) -> Result<()> {
    writeln!(out, "# banknote {command}")?;
    writeln!(out, "# config: {}", serde_json::to_string(config)?)?;
    Ok(())
}

/// Writes a report file. JSON reports hold the configuration and the result;
/// CSV reports start with the same two comment lines as the stdout header.
fn write_report<C: Serialize, R: Serialize>(
    path: &Path,
    command: &str,
    config: &C,
    result: &R,
    csv: &str,
) -> Result<()> {
    let text = match ReportFormat::of(path) {
        Some(ReportFormat::Json) => {
            let doc = serde_json::json!({ "command": command, "config": config, "result": result });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Some(ReportFormat::Csv) => {
            let mut buf = Vec::new();
            header(&mut buf, command, config)?;
            String::from_utf8(buf).expect("header is UTF-8") + csv
        }
        None => {
            return Err(Error::InvalidArgument(format!(
                "{} must end in .json or .csv",
                path.display()
            )));
        }
    };
    fs::write(path, text)?;
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Loads a data file; the class count comes from `classes`, the manifest or
/// the default, in that order.
fn load_dataset(path: &Path, classes: Option<usize>) -> Result<Dataset> {
    let manifest = manifest_path(path);
    let n_classes = match classes {
        Some(n) => n,
        None if manifest.exists() => Manifest::read(&manifest)?.n_classes,
        None => DEFAULT_CLASSES,
    };
    read_fvec(path, n_classes)
}

fn check_dim(head: &HeadParams, data: &Dataset) -> Result<()> {
    if head.dim() != data.dim {
        return Err(Error::DimensionMismatch {
            expected: head.dim(),
            got: data.dim,
        });
    }
    Ok(())
}

fn load_for_model(model: &Path, data: &Path) -> Result<(HeadParams, Dataset)> {
    let head = read_model(model)?;
    let data = read_fvec(data, head.n_classes())?;
    check_dim(&head, &data)?;
    Ok((head, data))
}

fn class_name(n_classes: usize, class: usize) -> String {
    if n_classes == BanknoteClassLabel::all().len() {
        BanknoteClassLabel::from_index(class)
            .map(|c| c.to_string())
            .unwrap_or_else(|| class.to_string())
    } else {
        format!("class_{class:03}")
    }
}

/// Runs one parsed command, writing the report to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Train(a) => cmd_train(&a, out),
        Command::Calibrate(a) => cmd_calibrate(&a, out),
        Command::Evaluate(a) if a.grid => cmd_grid(&a, out),
        Command::Evaluate(a) => cmd_evaluate(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Sort(a) => cmd_sort(&a, out),
        Command::EcbTest(a) => cmd_ecb_test(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    }
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = a.synth_config();
    header(out, "gen", &cfg)?;
    let samples = gen_synthetic(&cfg)?;
    write_fvec(&a.out, &samples)?;
    let manifest = manifest_path(&a.out);
    Manifest::for_synthetic(&cfg).write(&manifest)?;
    let count = |p: Provenance| samples.iter().filter(|s| s.provenance() == p).count();
    writeln!(out, "samples: {}", samples.len())?;
    writeln!(
        out,
        "accepted genuine: {}",
        count(Provenance::AcceptedGenuine)
    )?;
    writeln!(
        out,
        "legacy-rejected genuine: {}",
        count(Provenance::LegacyRejectedGenuine)
    )?;
    writeln!(out, "category 1: {}", count(Provenance::NonEuroCat1))?;
    writeln!(out, "wrote {} and {}", a.out.display(), manifest.display())?;
    Ok(())
}

#[derive(Serialize)]
struct TrainSummary {
    n_classes: usize,
    dim: usize,
    training_samples: usize,
    initial_loss: Option<f64>,
    final_loss: Option<f64>,
    validation_accuracy: Option<f64>,
}

fn cmd_train(a: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let data = load_dataset(&a.data.data, a.data.classes)?;
    let cfg = TrainConfig {
        episodes: a.episodes,
        batch_size: a.batch,
        adam: a.adam.config(),
        seed: a.seed,
    };
    let config = serde_json::json!({ "args": a, "n_classes": data.n_classes, "train": cfg });
    header(out, "train", &config)?;
    let partition = Partition::new(&data, a.seed)?;
    let training = partition.training_set();
    let outcome = train(&training, data.n_classes, &cfg)?;
    write_model(&a.out, &outcome.params)?;

    let loss_path = a
        .loss_out
        .clone()
        .unwrap_or_else(|| with_suffix(&a.out, ".loss.csv"));
    let mut csv = String::from("episode,loss\n");
    for (i, l) in outcome.loss_history.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i + 1, l));
    }
    fs::write(&loss_path, csv)?;

    let val = partition.validation_set();
    let validation_accuracy = if val.is_empty() {
        None
    } else {
        let labels: Vec<usize> = val.iter().filter_map(LabeledSample::class).collect();
        Some(eval::accuracy(
            &eval::decide(&outcome.params, &val, None)?,
            &labels,
        )?)
    };
    let summary = TrainSummary {
        n_classes: data.n_classes,
        dim: data.dim,
        training_samples: training.len(),
        initial_loss: outcome.loss_history.first().copied(),
        final_loss: outcome.loss_history.last().copied(),
        validation_accuracy,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
    writeln!(out, "wrote {} and {}", a.out.display(), loss_path.display())?;
    Ok(())
}

#[derive(Serialize)]
struct CalibrationResult {
    threshold: f64,
    quantile: f64,
    legacy_samples: usize,
    calibration_samples: usize,
}

fn cmd_calibrate(a: &CalibrateArgs, out: &mut dyn Write) -> Result<()> {
    let (head, data) = load_for_model(&a.model, &a.data)?;
    let ecdf_path = a
        .ecdf_out
        .clone()
        .unwrap_or_else(|| with_suffix(&a.model, ".ecdf.csv"));
    let config =
        serde_json::json!({ "args": a, "n_classes": head.n_classes(), "ecdf_out": ecdf_path });
    header(out, "calibrate", &config)?;

    let pool = Partition::new(&data, a.seed)?.legacy_calibration_pool();
    if pool.is_empty() {
        return Err(Error::InvalidArgument(
            "no legacy-rejected samples in the calibration split".into(),
        ));
    }
    let mut max_probs = Vec::new();
    for s in &pool {
        let y = head.forward(s.features())?;
        if Some(y.argmax()) == s.class() {
            max_probs.push(rejector::max_prob(&y));
        }
    }
    if max_probs.is_empty() {
        return Err(Error::InvalidArgument(
            "no correctly classified legacy-rejected samples to calibrate on".into(),
        ));
    }
    let threshold = rejector::calibrate_threshold(&max_probs, a.quantile)?;
    let ecdf = rejector::build_ecdf(&max_probs)?;
    let result = CalibrationResult {
        threshold: threshold.value(),
        quantile: a.quantile,
        legacy_samples: pool.len(),
        calibration_samples: max_probs.len(),
    };
    write_report(
        &ecdf_path,
        "calibrate",
        &config,
        &serde_json::json!({ "calibration": result, "ecdf": ecdf.sorted_values() }),
        &ecdf.to_csv(),
    )?;
    writeln!(out, "{}", serde_json::to_string_pretty(&result)?)?;
    writeln!(out, "T = {}", threshold.value())?;
    writeln!(out, "wrote {}", ecdf_path.display())?;
    Ok(())
}

#[derive(Serialize)]
struct EvaluationResult {
    test_samples: usize,
    accuracy: f64,
    reject_rate_pct: f64,
    confusion: Vec<Vec<u64>>,
}

fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let model = a
        .model
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--model is required".into()))?;
    let (head, data) = load_for_model(model, &a.data.data)?;
    let config = serde_json::json!({ "args": a, "n_classes": head.n_classes() });
    header(out, "evaluate", &config)?;
    let threshold = a.threshold.map(RejectThreshold::new).transpose()?;
    let test = Partition::new(&data, a.seed)?.accepted_test();
    let labels: Vec<usize> = test.iter().filter_map(LabeledSample::class).collect();
    let predictions = eval::decide(&head, &test, threshold)?;
    let confusion = eval::confusion(&predictions, &labels, head.n_classes())?;
    let n = head.n_classes();
    let result = EvaluationResult {
        test_samples: test.len(),
        accuracy: eval::accuracy(&predictions, &labels)?,
        reject_rate_pct: eval::reject_rate(&predictions),
        confusion: (0..=n)
            .map(|p| (1..=n).map(|t| confusion.get(p, t)).collect())
            .collect(),
    };
    writeln!(out, "test samples: {}", result.test_samples)?;
    writeln!(out, "accuracy: {:.5}%", 100.0 * result.accuracy)?;
    if threshold.is_some() {
        writeln!(out, "reject rate: {:.4}%", result.reject_rate_pct)?;
    }
    for t in 1..=n {
        let misses = confusion.column_sum(t) - confusion.get(t, t);
        if misses > 0 {
            writeln!(
                out,
                "{}: {} of {} not recognized",
                class_name(n, t),
                misses,
                confusion.column_sum(t)
            )?;
        }
    }
    if let Some(path) = &a.out {
        write_report(path, "evaluate", &config, &result, &confusion.to_csv())?;
    }
    Ok(())
}

fn cmd_grid(a: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let data = load_dataset(&a.data.data, a.data.classes)?;
    let base = TrainConfig {
        episodes: 0,
        batch_size: a.batch,
        adam: a.adam.config(),
        seed: a.seed,
    };
    let config = serde_json::json!({ "args": a, "n_classes": data.n_classes });
    header(out, "evaluate --grid", &config)?;
    let partition = Partition::new(&data, a.seed)?;
    let grid = eval::run_grid(&partition, &a.caps, &a.episodes, &base)?;
    write!(out, "{}", grid.to_table())?;
    if let Some(path) = &a.out {
        write_report(path, "evaluate --grid", &config, &grid, &grid.to_csv())?;
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let (head, data) = load_for_model(&a.model, &a.data)?;
    let config = serde_json::json!({ "args": a, "n_classes": head.n_classes() });
    header(out, "sweep", &config)?;
    let partition = Partition::new(&data, a.seed)?;
    let thresholds = a
        .thresholds
        .iter()
        .map(|&t| RejectThreshold::new(t))
        .collect::<Result<Vec<_>>>()?;
    let genuine = partition.genuine_test();
    let cat1 = partition.cat1_test();
    writeln!(
        out,
        "genuine test notes: {}, category-1 test objects: {}",
        genuine.len(),
        cat1.len()
    )?;
    let rows = rejector::threshold_sweep(&head, &thresholds, &genuine, &cat1)?;
    write!(out, "{}", rejector::sweep_to_table(&rows))?;
    if let Some(path) = &a.out {
        write_report(
            path,
            "sweep",
            &config,
            &rows,
            &rejector::sweep_to_csv(&rows),
        )?;
    }
    Ok(())
}

fn write_histogram(out: &mut dyn Write, name: &str, h: &CategoryHistogram) -> Result<()> {
    write!(out, "{name}:")?;
    for c in Category::ALL {
        write!(out, " cat{c}={}", h.get(c))?;
    }
    writeln!(out, " total={}", h.total())?;
    Ok(())
}

fn sort_file(
    head: &HeadParams,
    threshold: RejectThreshold,
    deck: &Path,
    kind: DeckKind,
) -> Result<Vec<Category>> {
    let data = read_fvec(deck, head.n_classes())?;
    check_dim(head, &data)?;
    sorter::sort_deck(head, threshold, &data.samples, |_, _| kind.checks())
}

fn cmd_sort(a: &SortArgs, out: &mut dyn Write) -> Result<()> {
    let head = read_model(&a.model)?;
    let config = serde_json::json!({ "args": a, "n_classes": head.n_classes() });
    header(out, "sort", &config)?;
    let categories = sort_file(&head, RejectThreshold::new(a.threshold)?, &a.deck, a.kind)?;
    let histogram = CategoryHistogram::from_categories(&categories);
    write_histogram(out, "deck", &histogram)?;
    if let Some(path) = &a.out {
        let mut csv = String::from("index,category\n");
        for (i, c) in categories.iter().enumerate() {
            csv.push_str(&format!("{i},{c}\n"));
        }
        let result = serde_json::json!({ "histogram": histogram, "categories": categories });
        write_report(path, "sort", &config, &result, &csv)?;
    }
    Ok(())
}

fn cmd_ecb_test(a: &EcbTestArgs, out: &mut dyn Write) -> Result<()> {
    let head = read_model(&a.model)?;
    let config = serde_json::json!({ "args": a, "n_classes": head.n_classes() });
    header(out, "ecb-test", &config)?;
    let t = RejectThreshold::new(a.threshold)?;
    let counterfeit = sort_file(&head, t, &a.counterfeit, DeckKind::Counterfeit)?;
    let unfit = sort_file(&head, t, &a.unfit, DeckKind::Unfit)?;
    let fit = sort_file(&head, t, &a.fit, DeckKind::Fit)?;
    let report = sorter::ecb_test(&counterfeit, &unfit, &fit)?;
    write_histogram(out, "counterfeit", &report.counterfeit)?;
    write_histogram(out, "unfit", &report.unfit)?;
    write_histogram(out, "fit", &report.fit)?;
    let c = report.criteria;
    for (name, ok) in [
        ("counterfeit detection", c.counterfeit_detection),
        ("unfit leakage", c.unfit_leakage),
        ("fit acceptance", c.fit_acceptance),
        ("genuine reject", c.genuine_reject),
    ] {
        writeln!(out, "{name}: {}", if ok { "pass" } else { "fail" })?;
    }
    writeln!(
        out,
        "overall: {}",
        if report.pass { "PASS" } else { "FAIL" }
    )?;
    if let Some(path) = &a.out {
        let mut csv = String::from("deck,cat1,cat2,cat3,cat4a,cat4b\n");
        for (name, h) in [
            ("counterfeit", report.counterfeit),
            ("unfit", report.unfit),
            ("fit", report.fit),
        ] {
            csv.push_str(&format!(
                "{name},{},{},{},{},{}\n",
                h.cat1, h.cat2, h.cat3, h.cat4a, h.cat4b
            ));
        }
        write_report(path, "ecb-test", &config, &report, &csv)?;
    }
    Ok(())
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let (head, data) = load_for_model(&a.model, &a.data)?;
    let cfg = BenchConfig {
        reps: a.reps,
        calls: a.calls,
        threshold: a.threshold,
        retrain_episodes: a.retrain_episodes.clone(),
        retrain_batches: a.retrain_batches.clone(),
        train: TrainConfig {
            episodes: 0,
            batch_size: 1,
            adam: a.adam.config(),
            seed: a.seed,
        },
    };
    let config = serde_json::json!({ "args": a, "n_classes": head.n_classes() });
    header(out, "bench", &config)?;
    let samples = data.with_provenance(Provenance::AcceptedGenuine);
    let report = eval::bench(&head, &samples, &cfg)?;
    write!(out, "{}", report.to_table())?;
    if let Some(path) = &a.out {
        write_report(path, "bench", &config, &report, &report.to_csv())?;
    }
    Ok(())
}
