//! Generalized LVQ: cost function, classifier function, winner search and
//! the stochastic prototype update, for any dissimilarity implementing
//! [`Dissimilarity`].

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};

/// A dissimilarity `d(v, w)` that is differentiable in the prototype `w`.
///
/// Implementations may assume `v` and `w` have the same length; callers check
/// dimensions once per model rather than per evaluation.
pub trait Dissimilarity {
    fn distance(&self, v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>) -> f64;

    /// Gradient of [`Dissimilarity::distance`] with respect to `w`.
    fn proto_gradient(&self, v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>) -> Array1<f64>;

    /// Input dimension, when the dissimilarity is parametrized for one.
    fn dims(&self) -> Option<usize> {
        None
    }
}

/// Labeled prototype vectors, one per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PrototypeSetRepr", into = "PrototypeSetRepr")]
pub struct PrototypeSet {
    vectors: Array2<f64>,
    labels: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PrototypeSetRepr {
    labels: Vec<usize>,
    vectors: Vec<Vec<f64>>,
}

impl From<PrototypeSet> for PrototypeSetRepr {
    fn from(p: PrototypeSet) -> Self {
        Self {
            vectors: p.vectors.rows().into_iter().map(|r| r.to_vec()).collect(),
            labels: p.labels,
        }
    }
}

impl TryFrom<PrototypeSetRepr> for PrototypeSet {
    type Error = Error;

    fn try_from(r: PrototypeSetRepr) -> Result<Self> {
        let n = r.vectors.first().map_or(0, Vec::len);
        if r.vectors.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidDataset("ragged prototype vectors".into()));
        }
        let flat: Vec<f64> = r.vectors.into_iter().flatten().collect();
        let vectors = Array2::from_shape_vec((r.labels.len(), n), flat)
            .map_err(|e| Error::InvalidDataset(e.to_string()))?;
        PrototypeSet::new(vectors, r.labels)
    }
}

impl PrototypeSet {
    pub fn new(vectors: Array2<f64>, labels: Vec<usize>) -> Result<Self> {
        if vectors.nrows() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} prototype vectors but {} labels",
                vectors.nrows(),
                labels.len()
            )));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidDataset("empty prototype set".into()));
        }
        if vectors.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDataset("non-finite prototype entry".into()));
        }
        Ok(Self { vectors, labels })
    }

    /// `per_class` prototypes for every class, placed at the class mean plus
    /// Gaussian jitter of `0.01 · std_j` in each dimension `j`.
    pub fn init_class_means<R: Rng>(data: &LabeledDataset, per_class: usize, rng: &mut R) -> Result<Self> {
        if per_class == 0 {
            return Err(Error::InvalidConfig("prototypes per class must be >= 1".into()));
        }
        let counts = data.class_counts();
        if let Some(c) = counts.iter().position(|&k| k == 0) {
            return Err(Error::InvalidDataset(format!("class {c} has no training samples")));
        }
        let n = data.n_dims();
        let c = data.n_classes();
        let mut means = Array2::<f64>::zeros((c, n));
        for (row, &l) in data.features().rows().into_iter().zip(data.labels()) {
            let mut m = means.row_mut(l);
            m += &row;
        }
        for (mut m, &k) in means.axis_iter_mut(Axis(0)).zip(&counts) {
            m /= k as f64;
        }
        let std = data.features().std_axis(Axis(0), 0.0);

        let mut vectors = Array2::zeros((c * per_class, n));
        let mut labels = Vec::with_capacity(c * per_class);
        for class in 0..c {
            for k in 0..per_class {
                let mut w = vectors.row_mut(class * per_class + k);
                for j in 0..n {
                    let z: f64 = rng.sample(StandardNormal);
                    w[j] = means[[class, j]] + 0.01 * std[j] * z;
                }
                labels.push(class);
            }
        }
        Self::new(vectors, labels)
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_dims(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn row(&self, k: usize) -> ArrayView1<'_, f64> {
        self.vectors.row(k)
    }

    /// Checks that every class in `0..n_classes` owns at least one prototype.
    pub fn covers_classes(&self, n_classes: usize) -> Result<()> {
        for c in 0..n_classes {
            if !self.labels.contains(&c) {
                return Err(Error::NoSameClassPrototype(c));
            }
        }
        Ok(())
    }

    /// Index of the nearest prototype over all classes; ties go to the lower index.
    pub fn nearest<D: Dissimilarity + ?Sized>(&self, sample: ArrayView1<'_, f64>, dist: &D) -> usize {
        let mut best = (0, f64::INFINITY);
        for (k, w) in self.vectors.rows().into_iter().enumerate() {
            let d = dist.distance(sample, w);
            if d < best.1 {
                best = (k, d);
            }
        }
        best.0
    }
}

/// Best matching prototypes of the correct class (`plus`) and of any other
/// class (`minus`) for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinnerPair {
    pub idx_plus: usize,
    pub idx_minus: usize,
    pub d_plus: f64,
    pub d_minus: f64,
}

/// Monotone transfer function applied to the classifier function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TransferFn {
    #[default]
    Identity,
    Sigmoid { slope: f64 },
}

impl TransferFn {
    pub fn apply(&self, mu: f64) -> f64 {
        match *self {
            TransferFn::Identity => mu,
            TransferFn::Sigmoid { slope } => 1.0 / (1.0 + (-slope * mu).exp()),
        }
    }

    pub fn derivative(&self, mu: f64) -> f64 {
        match *self {
            TransferFn::Identity => 1.0,
            TransferFn::Sigmoid { slope } => {
                let s = self.apply(mu);
                slope * s * (1.0 - s)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TransferFn::Sigmoid { slope } if !(slope > 0.0 && slope.is_finite()) => {
                Err(Error::InvalidConfig(format!("sigmoid slope must be positive, got {slope}")))
            }
            _ => Ok(()),
        }
    }
}

/// Finds the closest same-class and closest other-class prototypes.
/// Ties are broken by the lowest prototype index.
pub fn find_winners<D: Dissimilarity + ?Sized>(
    sample: ArrayView1<'_, f64>,
    label: usize,
    protos: &PrototypeSet,
    dist: &D,
) -> Result<WinnerPair> {
    let mut plus: Option<(usize, f64)> = None;
    let mut minus: Option<(usize, f64)> = None;
    for (k, (w, &y)) in protos.vectors.rows().into_iter().zip(&protos.labels).enumerate() {
        let d = dist.distance(sample, w);
        let slot = if y == label { &mut plus } else { &mut minus };
        if slot.is_none_or(|(_, best)| d < best) {
            *slot = Some((k, d));
        }
    }
    let (idx_plus, d_plus) = plus.ok_or(Error::NoSameClassPrototype(label))?;
    let (idx_minus, d_minus) = minus.ok_or(Error::NoOtherClassPrototype(label))?;
    Ok(WinnerPair { idx_plus, idx_minus, d_plus, d_minus })
}

/// `μ = (d⁺ − d⁻) / (d⁺ + d⁻)`, negative for a correctly classified sample.
/// Defined as 0 when both distances vanish.
pub fn classifier_mu(d_plus: f64, d_minus: f64) -> f64 {
    let sum = d_plus + d_minus;
    if sum == 0.0 {
        0.0
    } else {
        (d_plus - d_minus) / sum
    }
}

/// GLVQ cost `½ Σ f(μ(v))` over the dataset.
pub fn cost<D: Dissimilarity + ?Sized>(
    data: &LabeledDataset,
    protos: &PrototypeSet,
    dist: &D,
    f: TransferFn,
) -> Result<f64> {
    let mut total = 0.0;
    for (v, &y) in data.features().rows().into_iter().zip(data.labels()) {
        let win = find_winners(v, y, protos, dist)?;
        total += f.apply(classifier_mu(win.d_plus, win.d_minus));
    }
    Ok(0.5 * total)
}

/// Scaling factors of the stochastic prototype gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiFactors {
    pub plus: f64,
    pub minus: f64,
}

/// `ξ⁺ = f′(μ)·2d⁻/(d⁺+d⁻)²` and `ξ⁻ = −f′(μ)·2d⁺/(d⁺+d⁻)²`.
///
/// These are the partial derivatives of `f(μ)` with respect to `d⁺` and `d⁻`.
pub fn xi_factors(d_plus: f64, d_minus: f64, f: TransferFn) -> Result<XiFactors> {
    let sum = d_plus + d_minus;
    if sum == 0.0 {
        return Err(Error::DegenerateDistances);
    }
    let fprime = f.derivative(classifier_mu(d_plus, d_minus));
    let denom = sum * sum;
    Ok(XiFactors {
        plus: fprime * 2.0 * d_minus / denom,
        minus: -fprime * 2.0 * d_plus / denom,
    })
}

/// Gradient step on the two winners: `w± ← w± − rate·ξ±·∂d±/∂w±`.
/// All other prototypes are left untouched.
pub fn update_prototypes(
    protos: &mut PrototypeSet,
    winners: &WinnerPair,
    xi: XiFactors,
    grad_plus: ArrayView1<'_, f64>,
    grad_minus: ArrayView1<'_, f64>,
    learning_rate: f64,
) {
    let mut w = protos.vectors.row_mut(winners.idx_plus);
    w.scaled_add(-learning_rate * xi.plus, &grad_plus);
    let mut w = protos.vectors.row_mut(winners.idx_minus);
    w.scaled_add(-learning_rate * xi.minus, &grad_minus);
}
