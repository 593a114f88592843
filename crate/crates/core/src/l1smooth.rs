//! Differentiable surrogates of the absolute value, the vector l1 norm and the
//! matrix 1-norm (maximum absolute column sum).
//!
//! The smooth absolute value is
//!
//! ```text
//! |x|_α = (1/α) ln(2 + e^{−αx} + e^{αx}) = |x| + (2/α) ln(1 + e^{−α|x|})
//! ```
//!
//! with `0 ≤ |x|_α − |x| ≤ 2 ln 2 / α` and derivative `tanh(αx/2)`. The second
//! form is the one evaluated; it never overflows.
//!
//! The matrix norm is smoothed by replacing every `|Ω_ij|` with `|Ω_ij|_α` and
//! the maximum over columns with a nested smooth maximum
//! `max(c_1, max(c_2, … max(c_{n−1}, c_n)))`, where
//! `max(x, y) = ½(x + y + |x − y|_α)`.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::OmegaMatrix;

/// Sharpness `α > 0` of the smooth absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SmoothingParam(f64);

impl SmoothingParam {
    pub const DEFAULT: f64 = 5.0;

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidConfig(format!("alpha must be finite and positive, got {alpha}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for SmoothingParam {
    fn default() -> Self {
        Self(Self::DEFAULT)
    }
}

impl TryFrom<f64> for SmoothingParam {
    type Error = Error;

    fn try_from(a: f64) -> Result<Self> {
        Self::new(a)
    }
}

impl From<SmoothingParam> for f64 {
    fn from(a: SmoothingParam) -> f64 {
        a.0
    }
}

/// `|x|_α`.
pub fn abs_smooth(x: f64, alpha: SmoothingParam) -> f64 {
    let a = alpha.0;
    let ax = x.abs();
    ax + 2.0 / a * (-a * ax).exp().ln_1p()
}

/// `d|x|_α/dx = tanh(αx/2)`.
pub fn abs_smooth_grad(x: f64, alpha: SmoothingParam) -> f64 {
    (0.5 * alpha.0 * x).tanh()
}

/// `Σ_i |λ_i|_α`.
pub fn l1_smooth(lambda: ArrayView1<'_, f64>, alpha: SmoothingParam) -> f64 {
    lambda.iter().map(|&x| abs_smooth(x, alpha)).sum()
}

/// Gradient of [`l1_smooth`]: `tanh(αλ_j/2)` per component.
pub fn l1_smooth_grad(lambda: ArrayView1<'_, f64>, alpha: SmoothingParam) -> Array1<f64> {
    lambda.mapv(|x| abs_smooth_grad(x, alpha))
}

/// `½(x + y + |x − y|_α)`, an upper approximation of `max(x, y)` within
/// `ln 2 / α`.
pub fn smooth_max(x: f64, y: f64, alpha: SmoothingParam) -> f64 {
    0.5 * (x + y + abs_smooth(x - y, alpha))
}

/// Partial derivatives of [`smooth_max`] in `x` and `y`.
pub fn smooth_max_grad(x: f64, y: f64, alpha: SmoothingParam) -> (f64, f64) {
    let t = abs_smooth_grad(x - y, alpha);
    (0.5 * (1.0 + t), 0.5 * (1.0 - t))
}

fn smooth_column_sums(omega: &Array2<f64>, alpha: SmoothingParam) -> Array1<f64> {
    omega.map_axis(Axis(0), |col| l1_smooth(col, alpha))
}

/// Nested smooth maximum, innermost pair last: returns the partial folds
/// `acc[j] = max_α(c_j, acc[j+1])`, `acc[n−1] = c_{n−1}`.
fn fold_partials(cols: &Array1<f64>, alpha: SmoothingParam) -> Vec<f64> {
    let n = cols.len();
    let mut acc = vec![0.0; n];
    acc[n - 1] = cols[n - 1];
    for j in (0..n - 1).rev() {
        acc[j] = smooth_max(cols[j], acc[j + 1], alpha);
    }
    acc
}

/// Smooth surrogate of `‖Ω‖₁ = max_j Σ_i |Ω_ij|`.
pub fn matrix_l1_smooth(om: &OmegaMatrix, alpha: SmoothingParam) -> f64 {
    matrix_l1_smooth_raw(om.omega(), alpha)
}

pub(crate) fn matrix_l1_smooth_raw(omega: &Array2<f64>, alpha: SmoothingParam) -> f64 {
    let cols = smooth_column_sums(omega, alpha);
    fold_partials(&cols, alpha)[0]
}

/// Exact gradient of [`matrix_l1_smooth`], obtained by the chain rule through
/// the nested smooth maximum and the smooth absolute values.
pub fn matrix_l1_smooth_grad(om: &OmegaMatrix, alpha: SmoothingParam) -> Array2<f64> {
    matrix_l1_smooth_grad_raw(om.omega(), alpha)
}

pub(crate) fn matrix_l1_smooth_grad_raw(omega: &Array2<f64>, alpha: SmoothingParam) -> Array2<f64> {
    let cols = smooth_column_sums(omega, alpha);
    let acc = fold_partials(&cols, alpha);
    let n = cols.len();

    // weight of each column sum in the fold result
    let mut col_weight = vec![0.0; n];
    let mut upstream = 1.0;
    for j in 0..n - 1 {
        let (dx, dy) = smooth_max_grad(cols[j], acc[j + 1], alpha);
        col_weight[j] = upstream * dx;
        upstream *= dy;
    }
    col_weight[n - 1] = upstream;

    let mut grad = omega.mapv(|x| abs_smooth_grad(x, alpha));
    for (mut col, w) in grad.axis_iter_mut(Axis(1)).zip(col_weight) {
        col *= w;
    }
    grad
}

/// Alternative closed-form approximation of `∂R(Ω)/∂Ω_st`:
///
/// ```text
/// ½ tanh(αΩ_st/2) − T/2,
/// T = e^{−α(Ω+Ω̄)}(e^{2αΩ} − 1)(e^{2αΩ̄} − e^{2αΩ}/(1+e^{αΩ})⁴)
///     / (2 + e^{−α(Ω−Ω̄)} + e^{α(Ω+Ω̄)} + e^{α(Ω−Ω̄)}/(1+e^{αΩ})²),
/// Ω̄_st = Σ_{i≠s} |Ω_it|_α − max_{j≠t} Σ_i |Ω_ij|_α,
/// ```
///
/// with `Ω = Ω_st`. The maximum over an empty column set is taken as 0.
/// Evaluated as written, so large `α·Ω` can overflow to non-finite values.
/// This form is only compared against [`matrix_l1_smooth_grad`]; it does not
/// drive training.
pub fn closed_form_matrix_grad(om: &OmegaMatrix, alpha: SmoothingParam) -> Array2<f64> {
    let a = alpha.get();
    let omega = om.omega();
    let cols = smooth_column_sums(omega, alpha);
    Array2::from_shape_fn(omega.dim(), |(s, t)| {
        let x = omega[[s, t]];
        let others_in_col = cols[t] - abs_smooth(x, alpha);
        let max_other = cols
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != t)
            .map(|(_, &c)| c)
            .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |m| m.max(c))))
            .unwrap_or(0.0);
        let bar = others_in_col - max_other;
        let q = 1.0 + (a * x).exp();
        let num = (-a * (x + bar)).exp() * ((2.0 * a * x).exp() - 1.0) * ((2.0 * a * bar).exp() - (2.0 * a * x).exp() / q.powi(4));
        let den = 2.0 + (-a * (x - bar)).exp() + (a * (x + bar)).exp() + (a * (x - bar)).exp() / (q * q);
        let t_term = num / den;
        0.5 * abs_smooth_grad(x, alpha) - 0.5 * t_term
    })
}

/// `Σ_i |λ_i|`.
pub fn l1_exact(lambda: ArrayView1<'_, f64>) -> f64 {
    lambda.iter().map(|x| x.abs()).sum()
}

/// Maximum absolute column sum.
pub fn matrix_l1_exact(a: &Array2<f64>) -> f64 {
    a.map_axis(Axis(0), |col| l1_exact(col)).fold(0.0, |m, &c| m.max(c))
}

/// The three terms of `(1/m)‖Ω‖₁² ≤ ‖ΩᵀΩ‖₁ ≤ n‖Ω‖₁²`, computed with exact norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    pub holds: bool,
}

/// Evaluates the norm sandwich for `Ω` (m×n). Comparisons allow a relative
/// rounding slack of `1e−12` so that exact equality cases are not rejected on
/// the last bit.
pub fn sandwich_check(om: &Array2<f64>) -> SandwichReport {
    let (m, n) = om.dim();
    let norm = matrix_l1_exact(om);
    let lambda = om.t().dot(om);
    let middle = matrix_l1_exact(&lambda);
    let lower = norm * norm / m as f64;
    let upper = norm * norm * n as f64;
    let slack = 1e-12 * upper.abs().max(f64::MIN_POSITIVE);
    SandwichReport {
        lower,
        middle,
        upper,
        holds: lower <= middle + slack && middle <= upper + slack,
    }
}
