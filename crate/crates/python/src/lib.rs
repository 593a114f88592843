//! Python bindings for sparselvq.
//!
//! Exposes datasets, training (including the regularization path), models and
//! the smooth l1 helpers. Matrices cross the boundary as lists of rows.

use ndarray::{Array1, Array2};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sparselvq::dataset::{self, BandSelection, LabelColumn};
use sparselvq::glvq::{self, TransferFn};
use sparselvq::l1smooth::{self, SmoothingParam};
use sparselvq::trainer::{self, EpochMetrics, ModelKind, PathSchedule, TrainConfig};
use sparselvq::OmegaMatrix;

fn py_err(e: sparselvq::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn alpha(a: f64) -> PyResult<SmoothingParam> {
    SmoothingParam::new(a).map_err(py_err)
}

fn to_array2(rows: Vec<Vec<f64>>) -> PyResult<Array2<f64>> {
    let n = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("rows must all have the same length"));
    }
    let m = rows.len();
    Array2::from_shape_vec((m, n), rows.into_iter().flatten().collect())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_rows(a: &Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn omega(rows: Vec<Vec<f64>>) -> PyResult<OmegaMatrix> {
    OmegaMatrix::new(to_array2(rows)?).map_err(py_err)
}

fn metrics_dict<'py>(py: Python<'py>, m: &EpochMetrics) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("epoch", m.epoch)?;
    d.set_item("reg_weight", m.reg_weight)?;
    d.set_item("train_accuracy", m.train_accuracy)?;
    d.set_item("test_accuracy", m.test_accuracy)?;
    d.set_item("cost", m.cost)?;
    d.set_item("reg_term", m.reg_term)?;
    d.set_item("objective", m.objective)?;
    d.set_item("l1_norm", m.l1_norm)?;
    d.set_item("sparsity", m.sparsity)?;
    Ok(d)
}

/// Labeled feature matrix.
#[pyclass(name = "Dataset", from_py_object)]
#[derive(Clone)]
struct PyDataset {
    inner: dataset::LabeledDataset,
}

#[pymethods]
impl PyDataset {
    #[new]
    fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, n_classes: usize) -> PyResult<Self> {
        let inner = dataset::LabeledDataset::new(to_array2(features)?, labels, n_classes).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, label_col = "label"))]
    fn load_csv(path: &str, label_col: &str) -> PyResult<Self> {
        let inner = dataset::load_csv(path.as_ref(), &LabelColumn::parse(label_col)).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Returns `(dataset, informative_indices)`.
    #[staticmethod]
    #[pyo3(signature = (n_dims, n_informative, classes, per_class, noise_sigma = 1.0, seed = 0))]
    fn synth_sparse(
        n_dims: usize,
        n_informative: usize,
        classes: usize,
        per_class: usize,
        noise_sigma: f64,
        seed: u64,
    ) -> PyResult<(Self, Vec<usize>)> {
        let spec = dataset::SynthSpec { n_dims, n_informative, classes, per_class, noise_sigma, seed };
        let s = dataset::synth_sparse(&spec).map_err(py_err)?;
        Ok((Self { inner: s.dataset }, s.informative))
    }

    fn write_csv(&self, path: &str, label_col: &str) -> PyResult<()> {
        dataset::write_csv(path.as_ref(), &self.inner, label_col).map_err(py_err)
    }

    fn l2_normalize(&self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.l2_normalize().map_err(py_err)? })
    }

    fn select_bands(&self, keep: Vec<usize>) -> PyResult<Self> {
        let inner = self.inner.select_bands(&BandSelection::List(keep)).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[pyo3(signature = (train_fraction = 0.7, stratified = true, seed = 0))]
    fn split(&self, train_fraction: f64, stratified: bool, seed: u64) -> PyResult<(Self, Self)> {
        let spec = dataset::SplitSpec { train_fraction, stratified, seed };
        let (a, b) = self.inner.split(&spec).map_err(py_err)?;
        Ok((Self { inner: a }, Self { inner: b }))
    }

    #[getter]
    fn n_samples(&self) -> usize {
        self.inner.n_samples()
    }

    #[getter]
    fn n_dims(&self) -> usize {
        self.inner.n_dims()
    }

    #[getter]
    fn n_classes(&self) -> usize {
        self.inner.n_classes()
    }

    #[getter]
    fn labels(&self) -> Vec<usize> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn features(&self) -> Vec<Vec<f64>> {
        to_rows(self.inner.features())
    }

    fn __len__(&self) -> usize {
        self.inner.n_samples()
    }
}

/// Trained prototype model.
#[pyclass(name = "Model", from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: trainer::Model,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self { inner: trainer::Model::from_json(s).map_err(py_err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    fn predict(&self, sample: Vec<f64>) -> PyResult<usize> {
        if sample.len() != self.inner.n_dims() {
            return Err(py_err(sparselvq::Error::DimensionMismatch {
                model: self.inner.n_dims(),
                data: sample.len(),
            }));
        }
        Ok(self.inner.predict(Array1::from(sample).view()))
    }

    fn evaluate(&self, data: &PyDataset) -> PyResult<f64> {
        self.inner.evaluate(&data.inner).map_err(py_err)
    }

    fn confusion(&self, data: &PyDataset) -> PyResult<Vec<Vec<usize>>> {
        self.inner.confusion(&data.inner).map_err(py_err)
    }

    /// Diagonal of the metric matrix (`λ_i²`).
    fn relevances(&self) -> Vec<f64> {
        self.inner.relevances().to_vec()
    }

    #[pyo3(signature = (threshold = 1e-4))]
    fn sparsity(&self, threshold: f64) -> f64 {
        self.inner.sparsity(threshold)
    }

    #[getter]
    fn prototypes(&self) -> (Vec<Vec<f64>>, Vec<usize>) {
        (to_rows(self.inner.prototypes.vectors()), self.inner.prototypes.labels().to_vec())
    }
}

/// Stochastic gradient trainer bound to one model.
#[pyclass(name = "Trainer")]
struct PyTrainer {
    inner: trainer::Trainer,
}

#[pymethods]
impl PyTrainer {
    #[new]
    #[pyo3(signature = (
        train,
        model = "grlvq",
        epochs = 50,
        rate_proto = 1e-2,
        rate_metric = 1e-3,
        decay = 1e-3,
        alpha = 5.0,
        seed = 0,
        omega_rows = None,
        prototypes_per_class = 1,
        sparsity_threshold = 1e-4,
        sigmoid_slope = None,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        train: &PyDataset,
        model: &str,
        epochs: usize,
        rate_proto: f64,
        rate_metric: f64,
        decay: f64,
        alpha: f64,
        seed: u64,
        omega_rows: Option<usize>,
        prototypes_per_class: usize,
        sparsity_threshold: f64,
        sigmoid_slope: Option<f64>,
    ) -> PyResult<Self> {
        let model_kind = match model {
            "glvq" => ModelKind::Glvq,
            "grlvq" => ModelKind::Grlvq,
            "gmlvq" => ModelKind::Gmlvq,
            other => return Err(PyValueError::new_err(format!("unknown model kind {other:?}"))),
        };
        let config = TrainConfig {
            model_kind,
            epochs,
            rate_proto,
            rate_metric,
            decay,
            alpha: self::alpha(alpha)?,
            seed,
            transfer: sigmoid_slope.map_or(TransferFn::Identity, |slope| TransferFn::Sigmoid { slope }),
            omega_rows,
            prototypes_per_class,
            sparsity_threshold,
        };
        let inner = trainer::Trainer::new(config, &train.inner).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Unpenalized training for the configured number of epochs.
    #[pyo3(signature = (train, test = None))]
    fn fit<'py>(
        &mut self,
        py: Python<'py>,
        train: &PyDataset,
        test: Option<PyRef<'_, PyDataset>>,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let hist = self.inner.fit(&train.inner, test.as_ref().map(|t| &t.inner)).map_err(py_err)?;
        hist.iter().map(|m| metrics_dict(py, m)).collect()
    }

    #[pyo3(signature = (train, test = None, reg_weight = 0.0))]
    fn train_epoch<'py>(
        &mut self,
        py: Python<'py>,
        train: &PyDataset,
        test: Option<PyRef<'_, PyDataset>>,
        reg_weight: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let m = self
            .inner
            .train_epoch(&train.inner, test.as_ref().map(|t| &t.inner), reg_weight)
            .map_err(py_err)?;
        metrics_dict(py, &m)
    }

    /// Ramps the penalty weight; returns `(step_metrics, step_models)`.
    #[pyo3(signature = (train, test = None, reg_start = 0.0, reg_end = 1.0, steps = 20, epochs_per_step = 10))]
    #[allow(clippy::too_many_arguments)]
    fn run_path<'py>(
        &mut self,
        py: Python<'py>,
        train: &PyDataset,
        test: Option<PyRef<'_, PyDataset>>,
        reg_start: f64,
        reg_end: f64,
        steps: usize,
        epochs_per_step: usize,
    ) -> PyResult<(Vec<Bound<'py, PyDict>>, Vec<PyModel>)> {
        let schedule = PathSchedule {
            reg_weight_start: reg_start,
            reg_weight_end: reg_end,
            steps,
            epochs_per_step,
        };
        let run = self
            .inner
            .run_path(&train.inner, test.as_ref().map(|t| &t.inner), &schedule)
            .map_err(py_err)?;
        let metrics = run.steps.iter().map(|s| metrics_dict(py, &s.metrics)).collect::<PyResult<_>>()?;
        let models = run.steps.into_iter().map(|s| PyModel { inner: s.model }).collect();
        Ok((metrics, models))
    }

    #[getter]
    fn model(&self) -> PyModel {
        PyModel { inner: self.inner.model().clone() }
    }
}

#[pyfunction]
#[pyo3(signature = (x, alpha = 5.0))]
fn abs_smooth(x: f64, alpha: f64) -> PyResult<f64> {
    Ok(l1smooth::abs_smooth(x, self::alpha(alpha)?))
}

#[pyfunction]
#[pyo3(signature = (x, alpha = 5.0))]
fn abs_smooth_grad(x: f64, alpha: f64) -> PyResult<f64> {
    Ok(l1smooth::abs_smooth_grad(x, self::alpha(alpha)?))
}

#[pyfunction]
#[pyo3(signature = (lam, alpha = 5.0))]
fn l1_smooth(lam: Vec<f64>, alpha: f64) -> PyResult<f64> {
    Ok(l1smooth::l1_smooth(Array1::from(lam).view(), self::alpha(alpha)?))
}

#[pyfunction]
#[pyo3(signature = (x, y, alpha = 5.0))]
fn smooth_max(x: f64, y: f64, alpha: f64) -> PyResult<f64> {
    Ok(l1smooth::smooth_max(x, y, self::alpha(alpha)?))
}

#[pyfunction]
#[pyo3(signature = (rows, alpha = 5.0))]
fn matrix_l1_smooth(rows: Vec<Vec<f64>>, alpha: f64) -> PyResult<f64> {
    Ok(l1smooth::matrix_l1_smooth(&omega(rows)?, self::alpha(alpha)?))
}

#[pyfunction]
#[pyo3(signature = (rows, alpha = 5.0))]
fn matrix_l1_smooth_grad(rows: Vec<Vec<f64>>, alpha: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(to_rows(&l1smooth::matrix_l1_smooth_grad(&omega(rows)?, self::alpha(alpha)?)))
}

/// Returns `(lower, middle, upper, holds)`.
#[pyfunction]
fn sandwich_check(rows: Vec<Vec<f64>>) -> PyResult<(f64, f64, f64, bool)> {
    let r = l1smooth::sandwich_check(&to_array2(rows)?);
    Ok((r.lower, r.middle, r.upper, r.holds))
}

#[pyfunction]
fn classifier_mu(d_plus: f64, d_minus: f64) -> f64 {
    glvq::classifier_mu(d_plus, d_minus)
}

/// Returns `(xi_plus, xi_minus)` for the identity transfer function.
#[pyfunction]
fn xi_factors(d_plus: f64, d_minus: f64) -> PyResult<(f64, f64)> {
    let xi = glvq::xi_factors(d_plus, d_minus, TransferFn::Identity).map_err(py_err)?;
    Ok((xi.plus, xi.minus))
}

#[pymodule]
fn pysparselvq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyTrainer>()?;
    m.add_function(wrap_pyfunction!(abs_smooth, m)?)?;
    m.add_function(wrap_pyfunction!(abs_smooth_grad, m)?)?;
    m.add_function(wrap_pyfunction!(l1_smooth, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_max, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_l1_smooth, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_l1_smooth_grad, m)?)?;
    m.add_function(wrap_pyfunction!(sandwich_check, m)?)?;
    m.add_function(wrap_pyfunction!(classifier_mu, m)?)?;
    m.add_function(wrap_pyfunction!(xi_factors, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
