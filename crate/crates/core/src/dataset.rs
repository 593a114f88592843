//! Labeled vector data: CSV ingestion, row normalization, band selection,
//! train/test splitting and a synthetic generator with a known sparse support.
//!
//! All data file I/O of the crate lives here.

use std::collections::HashMap;
use std::fs;
use std::ops::Range;
use std::path::Path;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature matrix (one sample per row) with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Array2<f64>,
    labels: Vec<usize>,
    n_classes: usize,
    dim_names: Option<Vec<String>>,
    label_names: Option<Vec<String>>,
}

impl LabeledDataset {
    /// Builds a dataset, checking shapes, label range and finiteness.
    ///
    /// `n_classes` is the size of the label alphabet; it must be at least 2 and
    /// larger than every label.
    pub fn new(features: Array2<f64>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if features.ncols() == 0 {
            return Err(Error::InvalidDataset("zero feature columns".into()));
        }
        if n_classes < 2 {
            return Err(Error::InvalidDataset(format!("need at least 2 classes, got {n_classes}")));
        }
        if let Some(bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::InvalidDataset(format!("label {bad} >= class count {n_classes}")));
        }
        for ((row, col), value) in features.indexed_iter() {
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { row, col });
            }
        }
        Ok(Self {
            features,
            labels,
            n_classes,
            dim_names: None,
            label_names: None,
        })
    }

    pub fn with_dim_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_dims() {
            return Err(Error::InvalidDataset(format!(
                "{} dimension names for {} dimensions",
                names.len(),
                self.n_dims()
            )));
        }
        self.dim_names = Some(names);
        Ok(self)
    }

    pub fn with_label_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_classes {
            return Err(Error::InvalidDataset(format!(
                "{} label names for {} classes",
                names.len(),
                self.n_classes
            )));
        }
        self.label_names = Some(names);
        Ok(self)
    }

    /// Drops the label strings so that files written from this dataset carry
    /// the integer class indices.
    pub fn with_integer_labels(mut self) -> Self {
        self.label_names = None;
        self
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_dims(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn dim_names(&self) -> Option<&[String]> {
        self.dim_names.as_deref()
    }

    pub fn label_names(&self) -> Option<&[String]> {
        self.label_names.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of samples per class, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Scales every row to unit Euclidean norm.
    pub fn l2_normalize(&self) -> Result<Self> {
        let mut out = self.clone();
        for (i, mut row) in out.features.axis_iter_mut(Axis(0)).enumerate() {
            let norm = row.dot(&row).sqrt();
            if norm == 0.0 {
                return Err(Error::ZeroVectorRow(i));
            }
            row.mapv_inplace(|x| x / norm);
        }
        Ok(out)
    }

    /// Keeps only the selected columns, in order.
    pub fn select_bands(&self, keep: &BandSelection) -> Result<Self> {
        let indices = keep.indices();
        let dims = self.n_dims();
        if let Some(&index) = indices.iter().find(|&&i| i >= dims) {
            return Err(Error::IndexOutOfRange { index, dims });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnorderedIndices);
        }
        if indices.is_empty() {
            return Err(Error::InvalidDataset("band selection is empty".into()));
        }
        let features = self.features.select(Axis(1), &indices);
        let dim_names = self
            .dim_names
            .as_ref()
            .map(|names| indices.iter().map(|&i| names[i].clone()).collect());
        Ok(Self {
            features,
            labels: self.labels.clone(),
            n_classes: self.n_classes,
            dim_names,
            label_names: self.label_names.clone(),
        })
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            n_classes: self.n_classes,
            dim_names: self.dim_names.clone(),
            label_names: self.label_names.clone(),
        }
    }

    /// Splits into (train, test). The two parts partition the rows and keep
    /// the original relative row order.
    pub fn split(&self, spec: &SplitSpec) -> Result<(Self, Self)> {
        if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "train fraction must lie in (0, 1), got {}",
                spec.train_fraction
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut train = Vec::new();
        if spec.stratified {
            let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); self.n_classes];
            for (i, &l) in self.labels.iter().enumerate() {
                by_class[l].push(i);
            }
            for (class, mut rows) in by_class.into_iter().enumerate() {
                if rows.len() < 2 {
                    return Err(Error::ClassTooSmall(class));
                }
                rows.shuffle(&mut rng);
                let take = split_count(rows.len(), spec.train_fraction);
                train.extend_from_slice(&rows[..take]);
            }
        } else {
            let n = self.n_samples();
            if n < 2 {
                return Err(Error::InvalidCounts(format!("cannot split {n} sample(s)")));
            }
            let mut rows: Vec<usize> = (0..n).collect();
            rows.shuffle(&mut rng);
            train.extend_from_slice(&rows[..split_count(n, spec.train_fraction)]);
        }
        train.sort_unstable();
        let mut in_train = vec![false; self.n_samples()];
        for &i in &train {
            in_train[i] = true;
        }
        let test: Vec<usize> = (0..self.n_samples()).filter(|&i| !in_train[i]).collect();
        Ok((self.subset(&train), self.subset(&test)))
    }

    /// Metadata for the JSON sidecar written next to a CSV file.
    pub fn metadata(&self, label_column: &str) -> DatasetMeta {
        DatasetMeta {
            label_column: label_column.to_string(),
            n_samples: self.n_samples(),
            n_dims: self.n_dims(),
            n_classes: self.n_classes,
            label_names: self.label_names.clone(),
            dim_names: self.dim_names.clone(),
            informative: None,
        }
    }
}

fn split_count(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).round() as usize).clamp(1, n - 1)
}

/// Parameters of a train/test split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            stratified: true,
            seed: 0,
        }
    }
}

/// Columns to keep in [`LabeledDataset::select_bands`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandSelection {
    Range(Range<usize>),
    List(Vec<usize>),
}

impl BandSelection {
    pub fn indices(&self) -> Vec<usize> {
        match self {
            BandSelection::Range(r) => r.clone().collect(),
            BandSelection::List(v) => v.clone(),
        }
    }

    /// Parses `a..b` (half-open) or a comma-separated list of indices.
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        if let Some((a, b)) = s.split_once("..") {
            let start = a.trim().parse().map_err(|e| format!("bad range start {a:?}: {e}"))?;
            let end = b.trim().parse().map_err(|e| format!("bad range end {b:?}: {e}"))?;
            return Ok(BandSelection::Range(start..end));
        }
        s.split(',')
            .map(|t| t.trim().parse().map_err(|e| format!("bad index {t:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(BandSelection::List)
    }
}

/// How the label column is located in a CSV header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// A header name if `s` is not a plain integer, otherwise a column index.
    pub fn parse(s: &str) -> Self {
        match s.parse() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        }
    }

    fn resolve(&self, headers: &csv::StringRecord) -> Result<usize> {
        match self {
            LabelColumn::Name(name) => headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::MissingLabelColumn(name.clone())),
            LabelColumn::Index(i) if *i < headers.len() => Ok(*i),
            LabelColumn::Index(i) => Err(Error::MissingLabelColumn(i.to_string())),
        }
    }
}

/// JSON sidecar describing a dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub label_column: String,
    pub n_samples: usize,
    pub n_dims: usize,
    pub n_classes: usize,
    /// Label strings in index order, when the labels were not integers.
    pub label_names: Option<Vec<String>>,
    pub dim_names: Option<Vec<String>>,
    /// Ground-truth informative dimensions for synthetic data.
    pub informative: Option<Vec<usize>>,
}

impl DatasetMeta {
    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::json(path, e))?;
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }
}

/// Reads a comma-separated file with one header row.
///
/// Every column except the label column is a feature. Labels that all parse
/// as non-negative integers are used as class indices directly; otherwise
/// strings are mapped to `0..C` in order of first appearance. Row and column
/// numbers in errors are 1-based file positions (the header is row 1).
pub fn load_csv(path: &Path, label_column: &LabelColumn) -> Result<LabeledDataset> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.is_empty() {
        return Err(Error::EmptyFile);
    }
    let label_idx = label_column.resolve(&headers)?;
    let n_dims = headers.len() - 1;
    if n_dims == 0 {
        return Err(Error::InvalidDataset("no feature columns".into()));
    }

    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = r + 2;
        for (c, cell) in record.iter().enumerate() {
            if c == label_idx {
                raw_labels.push(cell.trim().to_string());
                continue;
            }
            let value: f64 = cell.trim().parse().map_err(|_| Error::MalformedCell {
                row,
                col: c + 1,
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { row, col: c + 1 });
            }
            values.push(value);
        }
    }
    if raw_labels.is_empty() {
        return Err(Error::EmptyFile);
    }

    let (labels, n_classes, label_names) = map_labels(&raw_labels);
    let features = Array2::from_shape_vec((raw_labels.len(), n_dims), values)
        .map_err(|e| Error::InvalidDataset(e.to_string()))?;
    let dim_names = headers
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != label_idx)
        .map(|(_, h)| h.trim().to_string())
        .collect();
    let data = LabeledDataset::new(features, labels, n_classes)?.with_dim_names(dim_names)?;
    match label_names {
        Some(names) => data.with_label_names(names),
        None => Ok(data),
    }
}

fn map_labels(raw: &[String]) -> (Vec<usize>, usize, Option<Vec<String>>) {
    if let Ok(ints) = raw.iter().map(|s| s.parse::<usize>()).collect::<std::result::Result<Vec<_>, _>>() {
        let n_classes = ints.iter().max().map_or(0, |m| m + 1);
        return (ints, n_classes, None);
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut names = Vec::new();
    let labels = raw
        .iter()
        .map(|s| {
            *index.entry(s.as_str()).or_insert_with(|| {
                names.push(s.clone());
                names.len() - 1
            })
        })
        .collect();
    (labels, names.len(), Some(names))
}

/// Writes the dataset as CSV with the label as the last column.
///
/// Floats are printed in shortest round-trip form, so reloading reproduces the
/// features bit for bit.
pub fn write_csv(path: &Path, data: &LabeledDataset, label_column: &str) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header: Vec<String> = match data.dim_names() {
        Some(names) => names.to_vec(),
        None => (0..data.n_dims()).map(|j| format!("f{j}")).collect(),
    };
    header.push(label_column.to_string());
    writer.write_record(&header).map_err(csv_err)?;
    let mut record = Vec::with_capacity(header.len());
    for (row, &label) in data.features().rows().into_iter().zip(data.labels()) {
        record.clear();
        record.extend(row.iter().map(|x| x.to_string()));
        record.push(match data.label_names() {
            Some(names) => names[label].clone(),
            None => label.to_string(),
        });
        writer.write_record(&record).map_err(csv_err)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Parameters of the synthetic sparse-support generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_dims: usize,
    pub n_informative: usize,
    pub classes: usize,
    pub per_class: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Generated data together with its ground truth.
#[derive(Debug, Clone)]
pub struct SynthData {
    pub dataset: LabeledDataset,
    /// Indices of the coordinates that carry class information.
    pub informative: Vec<usize>,
    /// True class mean vectors, one row per class.
    pub class_means: Array2<f64>,
}

/// Gaussian class clouds whose means differ only on the first
/// `n_informative` coordinates.
///
/// Each informative coordinate of a class mean is `±s·(1 + u)` with random
/// sign and `u ~ U[0, 1)`, where `s = 4·noise_sigma` (or `1` when the noise is
/// zero). Sign patterns are distinct across classes whenever there are enough
/// of them. Rows are grouped by class.
pub fn synth_sparse(spec: &SynthSpec) -> Result<SynthData> {
    let SynthSpec { n_dims, n_informative, classes, per_class, noise_sigma, seed } = *spec;
    if n_dims == 0 || n_informative > n_dims || classes < 2 || per_class == 0 {
        return Err(Error::InvalidCounts(format!(
            "dims={n_dims} informative={n_informative} classes={classes} per_class={per_class}"
        )));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidCounts(format!("noise sigma {noise_sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = if noise_sigma > 0.0 { 4.0 * noise_sigma } else { 1.0 };
    let distinct_possible = n_informative < 20 && (1usize << n_informative) >= classes;

    let mut class_means = Array2::zeros((classes, n_dims));
    let mut patterns: Vec<Vec<bool>> = Vec::with_capacity(classes);
    for c in 0..classes {
        let signs = loop {
            let s: Vec<bool> = (0..n_informative).map(|_| rng.random()).collect();
            if !distinct_possible || !patterns.contains(&s) {
                break s;
            }
        };
        for (k, &positive) in signs.iter().enumerate() {
            let magnitude = scale * (1.0 + rng.random::<f64>());
            class_means[[c, k]] = if positive { magnitude } else { -magnitude };
        }
        patterns.push(signs);
    }

    let n = classes * per_class;
    let mut features = Array2::zeros((n, n_dims));
    let mut labels = Vec::with_capacity(n);
    for c in 0..classes {
        for i in 0..per_class {
            let mut row = features.row_mut(c * per_class + i);
            for (j, x) in row.iter_mut().enumerate() {
                let z: f64 = rng.sample(StandardNormal);
                *x = class_means[[c, j]] + noise_sigma * z;
            }
            labels.push(c);
        }
    }
    let dataset = LabeledDataset::new(features, labels, classes)?;
    Ok(SynthData {
        dataset,
        informative: (0..n_informative).collect(),
        class_means,
    })
}
