//! Reproducible training runs: the run manifest, the pipeline it describes,
//! and the files written into a run directory.
//!
//! A run directory contains
//!
//! | file | contents |
//! |------|----------|
//! | `manifest.json` | [`RunManifest`], written before training starts |
//! | `train.csv`, `test.csv` | preprocessed splits, integer labels |
//! | `metrics.jsonl` | one [`EpochMetrics`] per line |
//! | `model.json` | final model |
//! | `profile.csv` | `dim_index,dim_name,lambda,lambda_sq` |
//! | `path.csv` | `reg_weight,train_accuracy,test_accuracy,sparsity` (path runs) |
//! | `steps/step_NNN.json` | model snapshot per path step (path runs) |

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{self, BandSelection, LabelColumn, LabeledDataset, SplitSpec};
use crate::error::{Error, Result};
use crate::trainer::{EpochMetrics, Model, PathRun, PathSchedule, TrainConfig, Trainer};

/// Where the data of a run comes from and how it is preprocessed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSource {
    pub path: PathBuf,
    pub label_column: String,
    /// Keep only these columns (applied before normalization).
    pub bands: Option<BandSelection>,
    pub l2_normalize: bool,
}

impl DataSource {
    pub fn load(&self) -> Result<LabeledDataset> {
        let mut data = dataset::load_csv(&self.path, &LabelColumn::parse(&self.label_column))?;
        if let Some(bands) = &self.bands {
            data = data.select_bands(bands)?;
        }
        if self.l2_normalize {
            data = data.l2_normalize()?;
        }
        Ok(data)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunCommand {
    /// Unpenalized training for `config.epochs` epochs.
    Train,
    /// Unpenalized pretraining for `config.epochs`, then the penalty ramp.
    Path,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: RunCommand,
    pub config: TrainConfig,
    pub schedule: Option<PathSchedule>,
    pub data: DataSource,
    pub split: SplitSpec,
    pub out_dir: PathBuf,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(
        command: RunCommand,
        config: TrainConfig,
        schedule: Option<PathSchedule>,
        data: DataSource,
        split: SplitSpec,
        out_dir: PathBuf,
    ) -> Self {
        Self {
            command,
            config,
            schedule,
            data,
            split,
            out_dir,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        match (self.command, &self.schedule) {
            (RunCommand::Path, None) => Err(Error::InvalidConfig("path run without schedule".into())),
            (_, Some(s)) => s.validate(),
            _ => Ok(()),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }
}

/// Headline numbers of a finished run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    /// Last epoch of unpenalized training.
    pub pretrained: Option<EpochMetrics>,
    pub final_metrics: Option<EpochMetrics>,
    pub path_steps: usize,
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let json = serde_json::to_string_pretty(value).map_err(|e| Error::json(path, e))?;
    fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}

/// Executes the run described by `manifest`, writing into `manifest.out_dir`.
pub fn execute(manifest: &RunManifest) -> Result<RunSummary> {
    manifest.validate()?;
    let out = &manifest.out_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    manifest.write(&out.join("manifest.json"))?;

    let data = manifest.data.load()?;
    let (train, test) = data.split(&manifest.split)?;
    let label_col = "label";
    dataset::write_csv(&out.join("train.csv"), &train.clone().with_integer_labels(), label_col)?;
    dataset::write_csv(&out.join("test.csv"), &test.clone().with_integer_labels(), label_col)?;
    data.metadata(&manifest.data.label_column).write(&out.join("data.json"))?;

    let mut trainer = Trainer::new(manifest.config, &train)?;
    let mut history = trainer.fit(&train, Some(&test))?;
    let pretrained = history.last().copied();

    let mut path_steps = 0;
    if let (RunCommand::Path, Some(schedule)) = (manifest.command, &manifest.schedule) {
        let run = trainer.run_path(&train, Some(&test), schedule)?;
        write_path(out, &run)?;
        path_steps = run.steps.len();
        history.extend(run.epochs);
    }

    write_metrics_jsonl(&out.join("metrics.jsonl"), &history)?;
    write_model(&out.join("model.json"), trainer.model())?;
    write_profile_csv(&out.join("profile.csv"), trainer.model(), train.dim_names())?;
    Ok(RunSummary {
        out_dir: out.clone(),
        pretrained,
        final_metrics: history.last().copied(),
        path_steps,
    })
}

fn write_path(out: &Path, run: &PathRun) -> Result<()> {
    let steps_dir = out.join("steps");
    fs::create_dir_all(&steps_dir).map_err(|e| Error::io(&steps_dir, e))?;
    for step in &run.steps {
        write_json(&steps_dir.join(format!("step_{:03}.json", step.step)), step)?;
    }
    write_path_csv(&out.join("path.csv"), run)
}

pub fn write_metrics_jsonl(path: &Path, metrics: &[EpochMetrics]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for m in metrics {
        serde_json::to_writer(&mut w, m).map_err(|e| Error::json(path, e))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_metrics_jsonl(path: &Path) -> Result<Vec<EpochMetrics>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::json(path, e)))
        .collect()
}

pub fn write_model(path: &Path, model: &Model) -> Result<()> {
    fs::write(path, model.to_json() + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let model: Model = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
    Model::new(model.metric, model.prototypes)
}

/// `dim_index,dim_name,lambda,lambda_sq`, where `lambda_sq` is the diagonal
/// of the metric matrix.
pub fn write_profile_csv(path: &Path, model: &Model, dim_names: Option<&[String]>) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["dim_index", "dim_name", "lambda", "lambda_sq"]).map_err(csv_err)?;
    for (j, r) in model.relevances().iter().enumerate() {
        let name = dim_names.map_or_else(|| format!("f{j}"), |n| n[j].clone());
        w.write_record([j.to_string(), name, r.sqrt().to_string(), r.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_path_csv(path: &Path, run: &PathRun) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["reg_weight", "train_accuracy", "test_accuracy", "sparsity"])
        .map_err(csv_err)?;
    for s in &run.steps {
        w.write_record([
            s.reg_weight.to_string(),
            s.metrics.train_accuracy.to_string(),
            s.metrics.test_accuracy.map_or_else(String::new, |a| a.to_string()),
            s.metrics.sparsity.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Result of evaluating a model file on a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub n_samples: usize,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
}

pub fn evaluate(model: &Model, data: &LabeledDataset) -> Result<EvalReport> {
    Ok(EvalReport {
        accuracy: model.evaluate(data)?,
        n_samples: data.n_samples(),
        confusion: model.confusion(data)?,
    })
}

impl EvalReport {
    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}
