//! Command-line interface: `synth`, `train`, `path` and `eval`.
//!
//! Exit codes: 0 on success, 1 for runtime failures, 2 for usage errors.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{self, BandSelection, SplitSpec, SynthSpec};
use crate::error::Error;
use crate::glvq::TransferFn;
use crate::l1smooth::SmoothingParam;
use crate::run::{self, DataSource, RunCommand, RunManifest};
use crate::trainer::{ModelKind, PathSchedule, TrainConfig};

#[derive(Debug, Parser)]
#[command(name = "sparselvq", version, about = "Sparse relevance and matrix LVQ")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset with a known informative support.
    Synth(SynthArgs),
    /// Train a model without regularization.
    Train(TrainArgs),
    /// Pretrain, then ramp the l1 penalty weight linearly.
    Path(PathArgs),
    /// Evaluate a saved model on a dataset.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub dims: usize,
    #[arg(long, default_value_t = 10)]
    pub informative: usize,
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    #[arg(long, default_value_t = 100)]
    pub per_class: usize,
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; receives data.csv and data.json.
    #[arg(long, default_value = "synth")]
    pub out: PathBuf,
    #[arg(long, default_value = "label")]
    pub label_col: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransferKind {
    Identity,
    Sigmoid,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Input CSV with one header row.
    #[arg(long, required_unless_present = "manifest")]
    pub data: Option<PathBuf>,
    /// Label column, by header name or 0-based index.
    #[arg(long, default_value = "label")]
    pub label_col: String,
    /// Run directory [default: run, or the manifest's directory on replay].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModelKind::Grlvq)]
    pub model: ModelKind,
    #[arg(long, default_value_t = SmoothingParam::DEFAULT)]
    pub alpha: f64,
    /// Rows of Ω for gmlvq [default: number of dimensions].
    #[arg(long)]
    pub omega_rows: Option<usize>,
    #[arg(long, default_value_t = 1e-4)]
    pub sparsity_threshold: f64,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub rate_proto: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub rate_metric: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub decay: f64,
    #[arg(long, default_value_t = 1)]
    pub prototypes_per_class: usize,
    #[arg(long, value_enum, default_value_t = TransferKind::Identity)]
    pub transfer: TransferKind,
    #[arg(long, default_value_t = 1.0)]
    pub sigmoid_slope: f64,
    #[arg(long, default_value_t = 0.7)]
    pub train_fraction: f64,
    /// Split without preserving class proportions.
    #[arg(long)]
    pub no_stratify: bool,
    /// Scale every sample to unit Euclidean norm.
    #[arg(long)]
    pub l2_normalize: bool,
    /// Columns to keep: `a..b` or `i,j,k` (0-based, label column excluded).
    #[arg(long)]
    pub bands: Option<String>,
    /// Replay the run described by a manifest.json.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[command(flatten)]
    pub train: TrainArgs,
    #[arg(long, default_value_t = PathSchedule::default().reg_weight_start)]
    pub reg_start: f64,
    #[arg(long, default_value_t = PathSchedule::default().reg_weight_end)]
    pub reg_end: f64,
    #[arg(long, default_value_t = PathSchedule::default().steps)]
    pub reg_steps: usize,
    #[arg(long, default_value_t = PathSchedule::default().epochs_per_step)]
    pub epochs_per_step: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model JSON written by train or path.
    #[arg(long)]
    pub model_file: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "label")]
    pub label_col: String,
    #[arg(long)]
    pub l2_normalize: bool,
    #[arg(long)]
    pub bands: Option<String>,
    /// Directory for eval.json [default: the model file's directory].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth(args) => cmd_synth(&args),
        Command::Train(args) => cmd_train(&args, None),
        Command::Path(args) => {
            let schedule = PathSchedule {
                reg_weight_start: args.reg_start,
                reg_weight_end: args.reg_end,
                steps: args.reg_steps,
                epochs_per_step: args.epochs_per_step,
            };
            cmd_train(&args.train, Some(schedule))
        }
        Command::Eval(args) => cmd_eval(&args),
    }
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let spec = SynthSpec {
        n_dims: args.dims,
        n_informative: args.informative,
        classes: args.classes,
        per_class: args.per_class,
        noise_sigma: args.noise,
        seed: args.seed,
    };
    let synth = dataset::synth_sparse(&spec).map_err(usage)?;
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let csv_path = args.out.join("data.csv");
    dataset::write_csv(&csv_path, &synth.dataset, &args.label_col)?;
    let mut meta = synth.dataset.metadata(&args.label_col);
    meta.informative = Some(synth.informative);
    meta.write(&args.out.join("data.json"))?;
    println!(
        "wrote {} ({} rows, {} columns)",
        csv_path.display(),
        synth.dataset.n_samples(),
        synth.dataset.n_dims() + 1
    );
    Ok(())
}

fn parse_bands(bands: &Option<String>) -> Result<Option<BandSelection>, CliError> {
    bands.as_deref().map(BandSelection::parse).transpose().map_err(usage)
}

fn manifest_from_flags(args: &TrainArgs, schedule: Option<PathSchedule>) -> Result<RunManifest, CliError> {
    let data = args.data.clone().ok_or_else(|| usage("--data is required"))?;
    let data = fs::canonicalize(&data).map_err(|e| Error::io(&data, e))?;
    if args.model == ModelKind::Gmlvq && args.omega_rows == Some(0) {
        return Err(usage("--omega-rows must be at least 1"));
    }
    let transfer = match args.transfer {
        TransferKind::Identity => TransferFn::Identity,
        TransferKind::Sigmoid => TransferFn::Sigmoid { slope: args.sigmoid_slope },
    };
    let config = TrainConfig {
        model_kind: args.model,
        epochs: args.epochs,
        rate_proto: args.rate_proto,
        rate_metric: args.rate_metric,
        decay: args.decay,
        alpha: SmoothingParam::new(args.alpha).map_err(usage)?,
        seed: args.seed,
        transfer,
        omega_rows: args.omega_rows,
        prototypes_per_class: args.prototypes_per_class,
        sparsity_threshold: args.sparsity_threshold,
    };
    let source = DataSource {
        path: data,
        label_column: args.label_col.clone(),
        bands: parse_bands(&args.bands)?,
        l2_normalize: args.l2_normalize,
    };
    let split = SplitSpec {
        train_fraction: args.train_fraction,
        stratified: !args.no_stratify,
        seed: args.seed,
    };
    let command = if schedule.is_some() { RunCommand::Path } else { RunCommand::Train };
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("run"));
    let manifest = RunManifest::new(command, config, schedule, source, split, out);
    manifest.validate().map_err(usage)?;
    Ok(manifest)
}

/// `train` and `path`, either from flags or replayed from `--manifest`.
pub fn cmd_train(args: &TrainArgs, schedule: Option<PathSchedule>) -> Result<(), CliError> {
    let manifest = match &args.manifest {
        Some(path) => {
            let mut m = RunManifest::load(path)?;
            if let Some(out) = &args.out {
                m.out_dir = out.clone();
            }
            m.tool_version = env!("CARGO_PKG_VERSION").to_string();
            m.timestamp = chrono::Utc::now().to_rfc3339();
            m
        }
        None => manifest_from_flags(args, schedule)?,
    };
    let summary = run::execute(&manifest)?;
    if let Some(m) = summary.pretrained {
        println!(
            "pretrained: epoch {} train_acc {:.4} test_acc {}",
            m.epoch,
            m.train_accuracy,
            m.test_accuracy.map_or("-".into(), |a| format!("{a:.4}"))
        );
    }
    if let (Some(m), true) = (summary.final_metrics, summary.path_steps > 0) {
        println!(
            "final: reg_weight {} train_acc {:.4} test_acc {} sparsity {:.4}",
            m.reg_weight,
            m.train_accuracy,
            m.test_accuracy.map_or("-".into(), |a| format!("{a:.4}")),
            m.sparsity
        );
    }
    println!("run directory: {}", summary.out_dir.display());
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs) -> Result<(), CliError> {
    let model = run::load_model(&args.model_file)?;
    let source = DataSource {
        path: args.data.clone(),
        label_column: args.label_col.clone(),
        bands: parse_bands(&args.bands)?,
        l2_normalize: args.l2_normalize,
    };
    let data = source.load()?;
    let report = run::evaluate(&model, &data)?;
    println!("accuracy: {} ({} samples)", report.accuracy, report.n_samples);
    println!("confusion (rows: true, columns: predicted):");
    for row in &report.confusion {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>6}")).collect();
        println!("{}", cells.join(""));
    }
    let out = match &args.out {
        Some(dir) => dir.clone(),
        None => args.model_file.parent().map(PathBuf::from).unwrap_or_default(),
    };
    if !out.as_os_str().is_empty() {
        fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    }
    report.write(&out.join("eval.json"))?;
    Ok(())
}
