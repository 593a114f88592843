//! Prototype-based classification with Generalized LVQ and adaptive metrics.
//!
//! Relevance learning (GRLVQ) adapts a diagonal metric, matrix learning
//! (GMLVQ) a full metric `ΩᵀΩ`. Sparsity of the learned relevance profile is
//! encouraged by an l1 (LASSO) penalty, made differentiable through the
//! smooth absolute value in [`l1smooth`], and explored along a linearly
//! ramped regularization path ([`trainer::Trainer::run_path`]).

pub mod cli;
pub mod dataset;
pub mod error;
pub mod glvq;
pub mod l1smooth;
pub mod metric;
pub mod run;
pub mod trainer;

#[cfg(test)]
mod testing;

pub use dataset::{LabeledDataset, SplitSpec, SynthSpec};
pub use error::{Error, Result};
pub use glvq::{Dissimilarity, PrototypeSet, TransferFn, WinnerPair};
pub use l1smooth::SmoothingParam;
pub use metric::{OmegaMatrix, RelevanceProfile, SquaredEuclidean};
pub use trainer::{EpochMetrics, Model, ModelKind, PathSchedule, TrainConfig, Trainer};
