//! Stochastic gradient training of GLVQ, GRLVQ and GMLVQ models, with an
//! optional smooth-l1 penalty on the metric parameters and a driver that
//! ramps the penalty weight linearly (the regularization path).
//!
//! One epoch descends `E + reg_weight · R`, where `E = ½ Σ_v f(μ(v))` is the
//! GLVQ cost over the training set and `R` is the smooth l1 norm of `λ`
//! (GRLVQ) or the smooth matrix 1-norm of `Ω` (GMLVQ). Per sample the metric
//! step combines the data gradient `ξ⁺∂d⁺ + ξ⁻∂d⁻` with
//! `(2·reg_weight/N)·∂R`, so that a full pass carries the penalty with weight
//! `reg_weight` relative to `E`. After each metric step `λ` is clamped to be
//! non-negative and renormalized to `Σλ² = 1`; `Ω` is renormalized to
//! `ΣΩ² = 1`.

use ndarray::{Array1, ArrayView1};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::glvq::{self, Dissimilarity, PrototypeSet, TransferFn};
use crate::l1smooth::{self, SmoothingParam};
use crate::metric::{self, OmegaMatrix, RelevanceProfile, SquaredEuclidean};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Glvq,
    Grlvq,
    Gmlvq,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Glvq => "glvq",
            ModelKind::Grlvq => "grlvq",
            ModelKind::Gmlvq => "gmlvq",
        })
    }
}

/// The dissimilarity of a model together with its adaptive parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MetricState {
    #[serde(rename = "glvq")]
    Euclidean,
    #[serde(rename = "grlvq")]
    Relevance { relevance: RelevanceProfile },
    #[serde(rename = "gmlvq")]
    Matrix { omega: OmegaMatrix },
}

impl Dissimilarity for MetricState {
    fn distance(&self, v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>) -> f64 {
        match self {
            MetricState::Euclidean => SquaredEuclidean.distance(v, w),
            MetricState::Relevance { relevance } => relevance.distance(v, w),
            MetricState::Matrix { omega } => omega.distance(v, w),
        }
    }

    fn proto_gradient(&self, v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>) -> Array1<f64> {
        match self {
            MetricState::Euclidean => SquaredEuclidean.proto_gradient(v, w),
            MetricState::Relevance { relevance } => relevance.proto_gradient(v, w),
            MetricState::Matrix { omega } => omega.proto_gradient(v, w),
        }
    }

    fn dims(&self) -> Option<usize> {
        match self {
            MetricState::Euclidean => None,
            MetricState::Relevance { relevance } => relevance.dims(),
            MetricState::Matrix { omega } => omega.dims(),
        }
    }
}

/// A trained (or training) prototype model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    #[serde(flatten)]
    pub metric: MetricState,
    pub prototypes: PrototypeSet,
}

impl Model {
    pub fn new(metric: MetricState, prototypes: PrototypeSet) -> Result<Self> {
        if let Some(n) = metric.dims() {
            if n != prototypes.n_dims() {
                return Err(Error::DimensionMismatch { model: n, data: prototypes.n_dims() });
            }
        }
        Ok(Self { metric, prototypes })
    }

    pub fn kind(&self) -> ModelKind {
        match self.metric {
            MetricState::Euclidean => ModelKind::Glvq,
            MetricState::Relevance { .. } => ModelKind::Grlvq,
            MetricState::Matrix { .. } => ModelKind::Gmlvq,
        }
    }

    pub fn n_dims(&self) -> usize {
        self.prototypes.n_dims()
    }

    fn check_data(&self, data: &LabeledDataset) -> Result<()> {
        if data.n_dims() != self.n_dims() {
            return Err(Error::DimensionMismatch { model: self.n_dims(), data: data.n_dims() });
        }
        Ok(())
    }

    /// Label of the nearest prototype (lowest index on ties).
    pub fn predict(&self, sample: ArrayView1<'_, f64>) -> usize {
        self.prototypes.labels()[self.prototypes.nearest(sample, &self.metric)]
    }

    pub fn predict_all(&self, data: &LabeledDataset) -> Result<Vec<usize>> {
        self.check_data(data)?;
        Ok(data.features().rows().into_iter().map(|v| self.predict(v)).collect())
    }

    /// Fraction of samples whose nearest prototype carries the sample's label.
    pub fn evaluate(&self, data: &LabeledDataset) -> Result<f64> {
        let predicted = self.predict_all(data)?;
        if predicted.is_empty() {
            return Ok(0.0);
        }
        let hits = predicted.iter().zip(data.labels()).filter(|(p, l)| p == l).count();
        Ok(hits as f64 / predicted.len() as f64)
    }

    /// Confusion counts, `matrix[true][predicted]`.
    pub fn confusion(&self, data: &LabeledDataset) -> Result<Vec<Vec<usize>>> {
        let predicted = self.predict_all(data)?;
        let c = self
            .prototypes
            .labels()
            .iter()
            .copied()
            .max()
            .map_or(0, |m| m + 1)
            .max(data.n_classes());
        let mut matrix = vec![vec![0; c]; c];
        for (&p, &l) in predicted.iter().zip(data.labels()) {
            matrix[l][p] += 1;
        }
        Ok(matrix)
    }

    /// GLVQ cost of the model on `data`.
    pub fn cost(&self, data: &LabeledDataset, f: TransferFn) -> Result<f64> {
        self.check_data(data)?;
        glvq::cost(data, &self.prototypes, &self.metric, f)
    }

    /// Diagonal of the metric matrix: `λ_i²` for GRLVQ, squared column norms
    /// of `Ω` for GMLVQ, `1/n` for plain GLVQ.
    pub fn relevances(&self) -> Array1<f64> {
        match &self.metric {
            MetricState::Euclidean => Array1::from_elem(self.n_dims(), 1.0 / self.n_dims() as f64),
            MetricState::Relevance { relevance } => relevance.relevances(),
            MetricState::Matrix { omega } => omega.relevances(),
        }
    }

    /// Fraction of dimensions whose relevance falls below `threshold`.
    pub fn sparsity(&self, threshold: f64) -> f64 {
        sparsity_of_relevances(self.relevances().view(), threshold)
    }

    /// Smooth penalty `R` at the current parameters (0 for GLVQ).
    pub fn reg_term(&self, alpha: SmoothingParam) -> f64 {
        match &self.metric {
            MetricState::Euclidean => 0.0,
            MetricState::Relevance { relevance } => l1smooth::l1_smooth(relevance.lambda().view(), alpha),
            MetricState::Matrix { omega } => l1smooth::matrix_l1_smooth(omega, alpha),
        }
    }

    /// Exact `‖λ‖₁` or `‖Ω‖₁` (0 for GLVQ).
    pub fn l1_norm(&self) -> f64 {
        match &self.metric {
            MetricState::Euclidean => 0.0,
            MetricState::Relevance { relevance } => l1smooth::l1_exact(relevance.lambda().view()),
            MetricState::Matrix { omega } => l1smooth::matrix_l1_exact(omega.omega()),
        }
    }

    /// `|Σλ² − 1|` or `|ΣΩ² − 1|`; 0 for GLVQ.
    pub fn normalization_error(&self) -> f64 {
        match &self.metric {
            MetricState::Euclidean => 0.0,
            _ => (self.relevances().sum() - 1.0).abs(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: Model = serde_json::from_str(s).map_err(|e| Error::json("<model>", e))?;
        Model::new(model.metric, model.prototypes)
    }
}

/// Fraction of entries of `rel` that are below `threshold`.
pub fn sparsity_of_relevances(rel: ArrayView1<'_, f64>, threshold: f64) -> f64 {
    if rel.is_empty() {
        return 0.0;
    }
    rel.iter().filter(|&&r| r < threshold).count() as f64 / rel.len() as f64
}

/// Fraction of dimensions with `λ_i² < threshold`.
pub fn sparsity_of(rel: &RelevanceProfile, threshold: f64) -> f64 {
    sparsity_of_relevances(rel.relevances().view(), threshold)
}

/// Hyperparameters of a training run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model_kind: ModelKind,
    pub epochs: usize,
    pub rate_proto: f64,
    pub rate_metric: f64,
    /// Learning rates at epoch `t` are `rate / (1 + t·decay)`.
    pub decay: f64,
    pub alpha: SmoothingParam,
    pub seed: u64,
    pub transfer: TransferFn,
    /// Rows `m` of `Ω` (GMLVQ only); `None` means square.
    pub omega_rows: Option<usize>,
    pub prototypes_per_class: usize,
    /// Threshold on `λ_i²` below which a dimension counts as pruned.
    pub sparsity_threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            model_kind: ModelKind::Grlvq,
            epochs: 50,
            rate_proto: 1e-2,
            rate_metric: 1e-3,
            decay: 1e-3,
            alpha: SmoothingParam::default(),
            seed: 0,
            transfer: TransferFn::Identity,
            omega_rows: None,
            prototypes_per_class: 1,
            sparsity_threshold: 1e-4,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        for (name, rate) in [("rate_proto", self.rate_proto), ("rate_metric", self.rate_metric), ("decay", self.decay)] {
            if !(rate >= 0.0 && rate.is_finite()) {
                return bad(format!("{name} must be finite and non-negative, got {rate}"));
            }
        }
        if self.prototypes_per_class == 0 {
            return bad("prototypes per class must be >= 1".into());
        }
        if self.sparsity_threshold.is_nan() || self.sparsity_threshold <= 0.0 {
            return bad(format!("sparsity threshold must be positive, got {}", self.sparsity_threshold));
        }
        if self.omega_rows == Some(0) {
            return bad("omega rows must be >= 1".into());
        }
        self.transfer.validate()
    }
}

/// Linear ramp of the penalty weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSchedule {
    pub reg_weight_start: f64,
    pub reg_weight_end: f64,
    pub steps: usize,
    pub epochs_per_step: usize,
}

impl Default for PathSchedule {
    fn default() -> Self {
        Self {
            reg_weight_start: 0.0,
            reg_weight_end: 1.0,
            steps: 20,
            epochs_per_step: 10,
        }
    }
}

impl PathSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = self.reg_weight_start >= 0.0
            && self.reg_weight_end.is_finite()
            && self.reg_weight_end >= self.reg_weight_start
            && self.steps >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "path needs 0 <= start <= end and steps >= 1, got {self:?}"
            )))
        }
    }

    /// Penalty weight of each step, from start to end inclusive.
    pub fn weights(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.reg_weight_start];
        }
        let span = self.reg_weight_end - self.reg_weight_start;
        (0..self.steps)
            .map(|k| self.reg_weight_start + span * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Measurements taken after one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    /// 1-based count of epochs trained so far.
    pub epoch: usize,
    pub reg_weight: f64,
    pub train_accuracy: f64,
    /// `None` when no test set was supplied.
    pub test_accuracy: Option<f64>,
    /// GLVQ cost `E` on the training set.
    pub cost: f64,
    /// Smooth penalty `R`.
    pub reg_term: f64,
    /// `E + reg_weight · R`.
    pub objective: f64,
    /// Exact l1 (or matrix 1-) norm of the metric parameters.
    pub l1_norm: f64,
    pub sparsity: f64,
}

/// One step of a regularization path: the last epoch's metrics and a model
/// snapshot taken at the end of the step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub step: usize,
    pub reg_weight: f64,
    pub metrics: EpochMetrics,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathRun {
    pub epochs: Vec<EpochMetrics>,
    pub steps: Vec<PathStep>,
}

/// Owns a model and the random stream used for sample ordering.
#[derive(Debug, Clone)]
pub struct Trainer {
    config: TrainConfig,
    model: Model,
    rng: ChaCha8Rng,
    epochs_done: usize,
}

impl Trainer {
    /// Initializes prototypes at the class means of `train` and the metric at
    /// uniform relevance (`λ_i = 1/√n`) or a diagonal-dominant `Ω`.
    pub fn new(config: TrainConfig, train: &LabeledDataset) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let n = train.n_dims();
        let prototypes = PrototypeSet::init_class_means(train, config.prototypes_per_class, &mut rng)?;
        let metric = match config.model_kind {
            ModelKind::Glvq => MetricState::Euclidean,
            ModelKind::Grlvq => MetricState::Relevance { relevance: RelevanceProfile::uniform(n) },
            ModelKind::Gmlvq => {
                let m = config.omega_rows.unwrap_or(n);
                if m > n {
                    return Err(Error::InvalidConfig(format!("omega rows {m} exceed dimension {n}")));
                }
                MetricState::Matrix { omega: OmegaMatrix::init_diag_dominant(m, n, 1e-3, &mut rng)? }
            }
        };
        Ok(Self { config, model: Model::new(metric, prototypes)?, rng, epochs_done: 0 })
    }

    /// Continues training an existing model.
    pub fn from_model(config: TrainConfig, model: Model) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            model,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            epochs_done: 0,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn into_model(self) -> Model {
        self.model
    }

    pub fn epochs_done(&self) -> usize {
        self.epochs_done
    }

    fn check_training_data(&self, train: &LabeledDataset) -> Result<()> {
        self.model.check_data(train)?;
        self.model.prototypes.covers_classes(train.n_classes())?;
        Ok(())
    }

    /// Runs `config.epochs` epochs without penalty.
    pub fn fit(&mut self, train: &LabeledDataset, test: Option<&LabeledDataset>) -> Result<Vec<EpochMetrics>> {
        (0..self.config.epochs).map(|_| self.train_epoch(train, test, 0.0)).collect()
    }

    /// One pass over a random permutation of `train`.
    pub fn train_epoch(
        &mut self,
        train: &LabeledDataset,
        test: Option<&LabeledDataset>,
        reg_weight: f64,
    ) -> Result<EpochMetrics> {
        self.check_training_data(train)?;
        if let Some(test) = test {
            self.model.check_data(test)?;
        }
        if !(reg_weight >= 0.0 && reg_weight.is_finite()) {
            return Err(Error::InvalidConfig(format!("reg weight must be finite and >= 0, got {reg_weight}")));
        }
        let cfg = self.config;
        let schedule = 1.0 / (1.0 + self.epochs_done as f64 * cfg.decay);
        let rate_proto = cfg.rate_proto * schedule;
        let rate_metric = cfg.rate_metric * schedule;
        let reg_scale = if train.is_empty() { 0.0 } else { 2.0 * reg_weight / train.n_samples() as f64 };
        let epoch = self.epochs_done + 1;

        let mut order: Vec<usize> = (0..train.n_samples()).collect();
        order.shuffle(&mut self.rng);
        for (step, &i) in order.iter().enumerate() {
            let v = train.features().row(i);
            let y = train.labels()[i];
            self.sgd_step(v, y, rate_proto, rate_metric, reg_scale)
                .map_err(|detail| Error::NonFiniteUpdate { epoch, step, detail })?;
        }
        self.epochs_done = epoch;

        if let MetricState::Matrix { omega } = &self.model.metric {
            if omega.is_degenerate() {
                log::warn!("epoch {epoch}: det(ΩᵀΩ) below {:e}", metric::DET_WARN_THRESHOLD);
            }
        }
        self.measure(train, test, reg_weight)
    }

    /// Single stochastic step. Errors carry a diagnostic description.
    fn sgd_step(
        &mut self,
        v: ArrayView1<'_, f64>,
        y: usize,
        rate_proto: f64,
        rate_metric: f64,
        reg_scale: f64,
    ) -> std::result::Result<(), String> {
        let model = &mut self.model;
        let win = glvq::find_winners(v, y, &model.prototypes, &model.metric).map_err(|e| e.to_string())?;
        let Ok(xi) = glvq::xi_factors(win.d_plus, win.d_minus, self.config.transfer) else {
            // sample coincides with both winners: no gradient
            return Ok(());
        };
        let w_plus = model.prototypes.row(win.idx_plus).to_owned();
        let w_minus = model.prototypes.row(win.idx_minus).to_owned();
        let g_plus = model.metric.proto_gradient(v, w_plus.view());
        let g_minus = model.metric.proto_gradient(v, w_minus.view());
        glvq::update_prototypes(&mut model.prototypes, &win, xi, g_plus.view(), g_minus.view(), rate_proto);

        let alpha = self.config.alpha;
        match &mut model.metric {
            _ if rate_metric == 0.0 => {}
            MetricState::Euclidean => {}
            MetricState::Relevance { relevance } => {
                let dp = metric::grad_lambda_unchecked(v, w_plus.view(), relevance);
                let dm = metric::grad_lambda_unchecked(v, w_minus.view(), relevance);
                let reg = l1smooth::l1_smooth_grad(relevance.lambda().view(), alpha);
                let lambda = relevance.lambda_mut();
                for j in 0..lambda.len() {
                    lambda[j] -= rate_metric * (xi.plus * dp[j] + xi.minus * dm[j] + reg_scale * reg[j]);
                }
                if lambda.iter().any(|l| !l.is_finite()) {
                    return Err(format!("relevance profile became non-finite (d+={}, d-={})", win.d_plus, win.d_minus));
                }
                relevance.clamp_in_place().map_err(|e| e.to_string())?;
                relevance.normalize_in_place().map_err(|e| e.to_string())?;
            }
            MetricState::Matrix { omega } => {
                let dp = metric::grad_omega_unchecked(v, w_plus.view(), omega);
                let dm = metric::grad_omega_unchecked(v, w_minus.view(), omega);
                let reg = if reg_scale > 0.0 {
                    Some(l1smooth::matrix_l1_smooth_grad(omega, alpha))
                } else {
                    None
                };
                let om = omega.omega_mut();
                ndarray::Zip::from(&mut *om).and(&dp).and(&dm).for_each(|o, &a, &b| {
                    *o -= rate_metric * (xi.plus * a + xi.minus * b);
                });
                if let Some(reg) = reg {
                    om.scaled_add(-rate_metric * reg_scale, &reg);
                }
                if om.iter().any(|x| !x.is_finite()) {
                    return Err(format!("omega became non-finite (d+={}, d-={})", win.d_plus, win.d_minus));
                }
                omega.normalize_in_place().map_err(|e| e.to_string())?;
            }
        }

        for k in [win.idx_plus, win.idx_minus] {
            if model.prototypes.row(k).iter().any(|x| !x.is_finite()) {
                return Err(format!("prototype {k} became non-finite (ξ⁺={}, ξ⁻={})", xi.plus, xi.minus));
            }
        }
        Ok(())
    }

    fn measure(&self, train: &LabeledDataset, test: Option<&LabeledDataset>, reg_weight: f64) -> Result<EpochMetrics> {
        let cost = self.model.cost(train, self.config.transfer)?;
        let reg_term = self.model.reg_term(self.config.alpha);
        Ok(EpochMetrics {
            epoch: self.epochs_done,
            reg_weight,
            train_accuracy: self.model.evaluate(train)?,
            test_accuracy: test.map(|t| self.model.evaluate(t)).transpose()?,
            cost,
            reg_term,
            objective: cost + reg_weight * reg_term,
            l1_norm: self.model.l1_norm(),
            sparsity: self.model.sparsity(self.config.sparsity_threshold),
        })
    }

    /// Trains `epochs_per_step` epochs at each penalty weight of the
    /// schedule, snapshotting the model after every step.
    pub fn run_path(
        &mut self,
        train: &LabeledDataset,
        test: Option<&LabeledDataset>,
        schedule: &PathSchedule,
    ) -> Result<PathRun> {
        schedule.validate()?;
        let mut run = PathRun::default();
        for (step, reg_weight) in schedule.weights().into_iter().enumerate() {
            for _ in 0..schedule.epochs_per_step {
                run.epochs.push(self.train_epoch(train, test, reg_weight)?);
            }
            let metrics = match run.epochs.last() {
                Some(m) if schedule.epochs_per_step > 0 => *m,
                _ => self.measure(train, test, reg_weight)?,
            };
            run.steps.push(PathStep { step, reg_weight, metrics, model: self.model.clone() });
        }
        Ok(run)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn blobs() -> LabeledDataset {
        crate::dataset::synth_sparse(&crate::dataset::SynthSpec {
            n_dims: 2,
            n_informative: 2,
            classes: 2,
            per_class: 40,
            noise_sigma: 0.3,
            seed: 3,
        })
        .unwrap()
        .dataset
    }

    #[test]
    fn schedule_weights() {
        let s = PathSchedule { reg_weight_start: 0.0, reg_weight_end: 1.0, steps: 5, epochs_per_step: 1 };
        assert_eq!(s.weights(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let s = PathSchedule { reg_weight_start: 0.0, reg_weight_end: 0.0, steps: 1, epochs_per_step: 1 };
        assert_eq!(s.weights(), vec![0.0]);
        assert!(PathSchedule { reg_weight_start: 1.0, reg_weight_end: 0.5, ..s }.validate().is_err());
        assert!(PathSchedule { steps: 0, ..s }.validate().is_err());
    }

    #[test]
    fn sparsity_values() {
        let uniform = RelevanceProfile::uniform(200);
        assert_eq!(sparsity_of(&uniform, 1e-4), 0.0);
        let mut one_hot = Array1::zeros(10);
        one_hot[3] = 1.0;
        let r = RelevanceProfile::new(one_hot).unwrap();
        assert!((sparsity_of(&r, 1e-4) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn zero_rates_leave_state_unchanged() {
        let data = blobs();
        let cfg = TrainConfig { rate_proto: 0.0, rate_metric: 0.0, ..TrainConfig::default() };
        let mut t = Trainer::new(cfg, &data).unwrap();
        let before = t.model().clone();
        let m = t.train_epoch(&data, None, 0.5).unwrap();
        assert_eq!(t.model(), &before);
        assert!(m.train_accuracy > 0.5 && m.cost.is_finite());
        assert_eq!(m.test_accuracy, None);
    }

    #[test]
    fn separable_blobs_are_learned() {
        let data = blobs();
        for kind in [ModelKind::Glvq, ModelKind::Grlvq, ModelKind::Gmlvq] {
            let cfg = TrainConfig { model_kind: kind, epochs: 50, ..TrainConfig::default() };
            let mut t = Trainer::new(cfg, &data).unwrap();
            let hist = t.fit(&data, Some(&data)).unwrap();
            let last = hist.last().unwrap();
            assert!(last.train_accuracy >= 0.95, "{kind}: {last:?}");
            assert!(t.model().normalization_error() < 1e-10);
        }
    }

    #[test]
    fn frozen_uniform_relevance_follows_glvq() {
        let data = blobs();
        let base = TrainConfig { rate_metric: 0.0, epochs: 5, seed: 9, ..TrainConfig::default() };
        let mut glvq = Trainer::new(TrainConfig { model_kind: ModelKind::Glvq, ..base }, &data).unwrap();
        let mut grlvq = Trainer::new(TrainConfig { model_kind: ModelKind::Grlvq, ..base }, &data).unwrap();
        glvq.fit(&data, None).unwrap();
        grlvq.fit(&data, None).unwrap();
        let a = glvq.model().prototypes.vectors();
        let b = grlvq.model().prototypes.vectors();
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-10, "{x} {y}");
        }
    }

    #[test]
    fn determinism() {
        let data = blobs();
        let cfg = TrainConfig { model_kind: ModelKind::Gmlvq, epochs: 3, seed: 4, ..TrainConfig::default() };
        let run = |_| {
            let mut t = Trainer::new(cfg, &data).unwrap();
            let sched = PathSchedule { reg_weight_start: 0.0, reg_weight_end: 1.0, steps: 3, epochs_per_step: 2 };
            let mut h = t.fit(&data, None).unwrap();
            h.extend(t.run_path(&data, None, &sched).unwrap().epochs);
            serde_json::to_string(&h).unwrap()
        };
        assert_eq!(run(0), run(1));
    }

    #[test]
    fn evaluate_matches_brute_force() {
        let data = blobs();
        let protos = PrototypeSet::new(array![[1.0, -1.0], [0.5, 0.5], [-1.0, 0.2]], vec![0, 1, 1]).unwrap();
        let rel = RelevanceProfile::new(array![0.8, 0.6]).unwrap();
        let model = Model::new(MetricState::Relevance { relevance: rel }, protos.clone()).unwrap();
        let mut hits = 0;
        for (v, &l) in data.features().rows().into_iter().zip(data.labels()) {
            let d: Vec<f64> = (0..3)
                .map(|k| 0.64 * (v[0] - protos.row(k)[0]).powi(2) + 0.36 * (v[1] - protos.row(k)[1]).powi(2))
                .collect();
            let best = (0..3).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
            assert_eq!(model.predict(v), protos.labels()[best]);
            hits += usize::from(protos.labels()[best] == l);
        }
        let acc = model.evaluate(&data).unwrap();
        assert!((acc - hits as f64 / data.n_samples() as f64).abs() < 1e-15);
    }

    #[test]
    fn class_mean_prototypes_are_perfect_on_noiseless_data() {
        let s = crate::dataset::synth_sparse(&crate::dataset::SynthSpec {
            n_dims: 6,
            n_informative: 3,
            classes: 4,
            per_class: 5,
            noise_sigma: 0.0,
            seed: 2,
        })
        .unwrap();
        let protos = PrototypeSet::new(s.class_means.clone(), vec![0, 1, 2, 3]).unwrap();
        let model = Model::new(MetricState::Euclidean, protos).unwrap();
        assert_eq!(model.evaluate(&s.dataset).unwrap(), 1.0);
    }

    #[test]
    fn boundary_tie_goes_to_lowest_index() {
        let protos = PrototypeSet::new(array![[1.0], [-1.0]], vec![1, 0]).unwrap();
        let model = Model::new(MetricState::Euclidean, protos).unwrap();
        assert_eq!(model.predict(array![0.0].view()), 1);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let protos = PrototypeSet::new(Array2::zeros((2, 3)), vec![0, 1]).unwrap();
        let model = Model::new(MetricState::Euclidean, protos).unwrap();
        let err = model.evaluate(&blobs()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { model: 3, data: 2 }));
        assert!(err.to_string().contains("n_model=3") && err.to_string().contains("n_data=2"));
    }

    #[test]
    fn model_json_round_trip() {
        let data = blobs();
        for kind in [ModelKind::Glvq, ModelKind::Grlvq, ModelKind::Gmlvq] {
            let t = Trainer::new(TrainConfig { model_kind: kind, ..TrainConfig::default() }, &data).unwrap();
            let json = t.model().to_json();
            assert!(json.starts_with(&format!("{{\"kind\":\"{kind}\"")), "{json}");
            assert_eq!(&Model::from_json(&json).unwrap(), t.model());
        }
    }

    #[test]
    fn heavy_penalty_stays_finite() {
        let data = blobs();
        let cfg = TrainConfig { epochs: 2, ..TrainConfig::default() };
        let mut t = Trainer::new(cfg, &data).unwrap();
        let sched = PathSchedule { reg_weight_start: 10.0, reg_weight_end: 1e4, steps: 4, epochs_per_step: 3 };
        let run = t.run_path(&data, None, &sched).unwrap();
        assert_eq!(run.steps.len(), 4);
        assert!(t.model().normalization_error() < 1e-10);
        assert!(t.model().relevances().iter().all(|r| r.is_finite() && *r >= 0.0));
    }
}
