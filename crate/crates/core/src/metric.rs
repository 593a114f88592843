//! Adaptive dissimilarities.
//!
//! * [`RelevanceProfile`]: diagonal metric `d_Λ(v,w) = Σ λ_i² (v_i − w_i)²`.
//! * [`OmegaMatrix`]: full metric `d_Ω(v,w) = ‖Ω(v − w)‖²`, i.e. `Λ = ΩᵀΩ`.
//!
//! Both come with gradients in the prototype and in their own parameters,
//! and with the normalizations `Σ λ_i² = 1` and `Σ Ω_ij² = 1`.

use ndarray::{Array1, Array2, ArrayView1, Axis, Zip};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glvq::Dissimilarity;

/// Below this value `det(ΩᵀΩ)` is reported as degenerate.
pub const DET_WARN_THRESHOLD: f64 = 1e-12;

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { model: a, data: b })
    }
}

/// Plain squared Euclidean distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SquaredEuclidean;

impl Dissimilarity for SquaredEuclidean {
    fn distance(&self, v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>) -> f64 {
        Zip::from(&v).and(&w).fold(0.0, |acc, &a, &b| acc + (a - b) * (a - b))
    }

    fn proto_gradient(&self, v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>) -> Array1<f64> {
        Zip::from(&v).and(&w).map_collect(|&a, &b| -2.0 * (a - b))
    }
}

/// Per-dimension relevance weights `λ`; the metric matrix is `diag(λ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RelevanceProfile {
    lambda: Array1<f64>,
}

impl TryFrom<Vec<f64>> for RelevanceProfile {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        RelevanceProfile::new(Array1::from(v))
    }
}

impl From<RelevanceProfile> for Vec<f64> {
    fn from(r: RelevanceProfile) -> Self {
        r.lambda.to_vec()
    }
}

impl RelevanceProfile {
    pub fn new(lambda: Array1<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidConfig("empty relevance profile".into()));
        }
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("non-finite relevance value".into()));
        }
        Ok(Self { lambda })
    }

    /// `λ_i = 1/√n` for all `i`.
    pub fn uniform(n: usize) -> Self {
        Self {
            lambda: Array1::from_elem(n, 1.0 / (n as f64).sqrt()),
        }
    }

    pub fn lambda(&self) -> &Array1<f64> {
        &self.lambda
    }

    pub(crate) fn lambda_mut(&mut self) -> &mut Array1<f64> {
        &mut self.lambda
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Diagonal of the metric matrix, `λ_i²`.
    pub fn relevances(&self) -> Array1<f64> {
        self.lambda.mapv(|l| l * l)
    }

    /// Rescales so that `Σ λ_i² = 1`.
    pub fn normalize(&self) -> Result<Self> {
        let mut out = self.clone();
        out.normalize_in_place()?;
        Ok(out)
    }

    pub(crate) fn normalize_in_place(&mut self) -> Result<()> {
        let norm = self.lambda.dot(&self.lambda).sqrt();
        if norm == 0.0 {
            return Err(Error::AllZeroParameters);
        }
        self.lambda /= norm;
        Ok(())
    }

    /// Sets negative components to zero.
    pub fn clamp(&self) -> Result<Self> {
        let mut out = self.clone();
        out.clamp_in_place()?;
        Ok(out)
    }

    pub(crate) fn clamp_in_place(&mut self) -> Result<()> {
        self.lambda.mapv_inplace(|l| l.max(0.0));
        if self.lambda.iter().all(|&l| l == 0.0) {
            return Err(Error::AllZeroParameters);
        }
        Ok(())
    }
}

impl Dissimilarity for RelevanceProfile {
    fn distance(&self, v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>) -> f64 {
        Zip::from(&v)
            .and(&w)
            .and(&self.lambda)
            .fold(0.0, |acc, &a, &b, &l| acc + l * l * (a - b) * (a - b))
    }

    fn proto_gradient(&self, v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>) -> Array1<f64> {
        Zip::from(&v)
            .and(&w)
            .and(&self.lambda)
            .map_collect(|&a, &b, &l| -2.0 * l * l * (a - b))
    }

    fn dims(&self) -> Option<usize> {
        Some(self.lambda.len())
    }
}

pub fn d_lambda(v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>, rel: &RelevanceProfile) -> Result<f64> {
    check_dims(rel.len(), v.len())?;
    check_dims(rel.len(), w.len())?;
    Ok(rel.distance(v, w))
}

/// `∂d_Λ/∂w = −2 diag(λ²)(v − w)`.
pub fn grad_proto_lambda(
    v: ArrayView1<'_, f64>,
    w: ArrayView1<'_, f64>,
    rel: &RelevanceProfile,
) -> Result<Array1<f64>> {
    check_dims(rel.len(), v.len())?;
    check_dims(rel.len(), w.len())?;
    Ok(rel.proto_gradient(v, w))
}

/// `∂d_Λ/∂λ_j = 2 λ_j (v_j − w_j)²`.
pub fn grad_lambda(v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>, rel: &RelevanceProfile) -> Result<Array1<f64>> {
    check_dims(rel.len(), v.len())?;
    check_dims(rel.len(), w.len())?;
    Ok(grad_lambda_unchecked(v, w, rel))
}

pub(crate) fn grad_lambda_unchecked(
    v: ArrayView1<'_, f64>,
    w: ArrayView1<'_, f64>,
    rel: &RelevanceProfile,
) -> Array1<f64> {
    Zip::from(&v)
        .and(&w)
        .and(&rel.lambda)
        .map_collect(|&a, &b, &l| 2.0 * l * (a - b) * (a - b))
}

/// Projection matrix `Ω ∈ ℝ^{m×n}` with `m ≤ n`; the metric matrix is `ΩᵀΩ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct OmegaMatrix {
    omega: Array2<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for OmegaMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidConfig("ragged omega matrix".into()));
        }
        let m = rows.len();
        let flat = rows.into_iter().flatten().collect();
        let omega = Array2::from_shape_vec((m, n), flat).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        OmegaMatrix::new(omega)
    }
}

impl From<OmegaMatrix> for Vec<Vec<f64>> {
    fn from(o: OmegaMatrix) -> Self {
        o.omega.rows().into_iter().map(|r| r.to_vec()).collect()
    }
}

impl OmegaMatrix {
    pub fn new(omega: Array2<f64>) -> Result<Self> {
        let (m, n) = omega.dim();
        if m == 0 || n == 0 || m > n {
            return Err(Error::InvalidConfig(format!("omega must be m×n with 1 ≤ m ≤ n, got {m}×{n}")));
        }
        if omega.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("non-finite omega entry".into()));
        }
        Ok(Self { omega })
    }

    pub fn identity(n: usize) -> Self {
        Self { omega: Array2::eye(n) }
    }

    /// `Ω = diag(λ)`, for which `d_Ω` coincides with `d_Λ`.
    pub fn from_relevance(rel: &RelevanceProfile) -> Self {
        Self {
            omega: Array2::from_diag(rel.lambda()),
        }
    }

    /// Diagonal `1/√n` on the leading `m×m` block plus uniform jitter in
    /// `[−jitter, jitter]`, then Frobenius-normalized.
    pub fn init_diag_dominant<R: Rng>(m: usize, n: usize, jitter: f64, rng: &mut R) -> Result<Self> {
        let diag = 1.0 / (n as f64).sqrt();
        let omega = Array2::from_shape_fn((m, n), |(i, j)| {
            let base = if i == j { diag } else { 0.0 };
            base + jitter * (2.0 * rng.random::<f64>() - 1.0)
        });
        Self::new(omega)?.normalize()
    }

    pub fn omega(&self) -> &Array2<f64> {
        &self.omega
    }

    pub(crate) fn omega_mut(&mut self) -> &mut Array2<f64> {
        &mut self.omega
    }

    pub fn rows(&self) -> usize {
        self.omega.nrows()
    }

    pub fn cols(&self) -> usize {
        self.omega.ncols()
    }

    /// `Λ = ΩᵀΩ`.
    pub fn lambda_matrix(&self) -> Array2<f64> {
        self.omega.t().dot(&self.omega)
    }

    /// Diagonal of `ΩᵀΩ`: squared column norms of `Ω`.
    pub fn relevances(&self) -> Array1<f64> {
        self.omega.map_axis(Axis(0), |col| col.dot(&col))
    }

    /// Rescales so that `Σ Ω_ij² = 1`.
    pub fn normalize(&self) -> Result<Self> {
        let mut out = self.clone();
        out.normalize_in_place()?;
        Ok(out)
    }

    pub(crate) fn normalize_in_place(&mut self) -> Result<()> {
        let norm = self.omega.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::AllZeroParameters);
        }
        self.omega /= norm;
        Ok(())
    }

    /// `ln |det(ΩᵀΩ)|` for square `Ω` (`−∞` when singular); `None` otherwise,
    /// where `ΩᵀΩ` is rank deficient by construction.
    pub fn log_det_lambda(&self) -> Option<f64> {
        (self.rows() == self.cols()).then(|| 2.0 * log_abs_det(self.omega.clone()))
    }

    /// Whether `det(ΩᵀΩ)` falls below [`DET_WARN_THRESHOLD`] (square `Ω` only).
    pub fn is_degenerate(&self) -> bool {
        self.log_det_lambda().is_some_and(|ld| ld < DET_WARN_THRESHOLD.ln())
    }

    fn projected_diff(&self, v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>) -> (Array1<f64>, Array1<f64>) {
        let diff = &v - &w;
        let proj = self.omega.dot(&diff);
        (diff, proj)
    }
}

/// Log of `|det(a)|` by Gaussian elimination with partial pivoting.
fn log_abs_det(mut a: Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| a[[i, k]].abs().total_cmp(&a[[j, k]].abs())).unwrap();
        let p = a[[pivot, k]];
        if p == 0.0 {
            return f64::NEG_INFINITY;
        }
        if pivot != k {
            for j in 0..n {
                a.swap([pivot, j], [k, j]);
            }
        }
        acc += p.abs().ln();
        for i in k + 1..n {
            let factor = a[[i, k]] / p;
            if factor != 0.0 {
                for j in k..n {
                    a[[i, j]] -= factor * a[[k, j]];
                }
            }
        }
    }
    acc
}

impl Dissimilarity for OmegaMatrix {
    fn distance(&self, v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>) -> f64 {
        let (_, proj) = self.projected_diff(v, w);
        proj.dot(&proj)
    }

    fn proto_gradient(&self, v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>) -> Array1<f64> {
        let (_, proj) = self.projected_diff(v, w);
        self.omega.t().dot(&proj) * -2.0
    }

    fn dims(&self) -> Option<usize> {
        Some(self.cols())
    }
}

pub fn d_omega(v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>, om: &OmegaMatrix) -> Result<f64> {
    check_dims(om.cols(), v.len())?;
    check_dims(om.cols(), w.len())?;
    Ok(om.distance(v, w))
}

/// `∂d_Ω/∂w = −2 ΩᵀΩ (v − w)`.
pub fn grad_proto_omega(v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>, om: &OmegaMatrix) -> Result<Array1<f64>> {
    check_dims(om.cols(), v.len())?;
    check_dims(om.cols(), w.len())?;
    Ok(om.proto_gradient(v, w))
}

/// `∂d_Ω/∂Ω_rs = 2 [Ω(v − w)]_r (v − w)_s`.
pub fn grad_omega(v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>, om: &OmegaMatrix) -> Result<Array2<f64>> {
    check_dims(om.cols(), v.len())?;
    check_dims(om.cols(), w.len())?;
    Ok(grad_omega_unchecked(v, w, om))
}

pub(crate) fn grad_omega_unchecked(v: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>, om: &OmegaMatrix) -> Array2<f64> {
    let (diff, proj) = om.projected_diff(v, w);
    Array2::from_shape_fn(om.omega.dim(), |(r, s)| 2.0 * proj[r] * diff[s])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::central_diff;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
        Array1::from_shape_fn(n, |_| rng.random::<f64>() * 2.0 - 1.0)
    }

    fn rand_mat(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Array2<f64> {
        Array2::from_shape_fn((m, n), |_| rng.random::<f64>() * 2.0 - 1.0)
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn d_lambda_basic() {
        let rel = RelevanceProfile::new(array![1.0, 0.0]).unwrap();
        let v = array![1.0, 5.0];
        assert_eq!(d_lambda(v.view(), v.view(), &rel).unwrap(), 0.0);
        assert_eq!(d_lambda(array![0.0, 5.0].view(), array![0.0, 0.0].view(), &rel).unwrap(), 0.0);
        assert!(matches!(
            d_lambda(array![1.0].view(), array![1.0, 2.0].view(), &rel),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn d_lambda_matches_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (v, w, l) = (rand_vec(&mut rng, 6), rand_vec(&mut rng, 6), rand_vec(&mut rng, 6));
            let rel = RelevanceProfile::new(l.clone()).unwrap();
            let big = Array2::from_diag(&l.mapv(|x| x * x));
            let diff = &v - &w;
            let expected = diff.dot(&big.dot(&diff));
            assert!(rel_close(d_lambda(v.view(), w.view(), &rel).unwrap(), expected, 1e-12));
        }
    }

    #[test]
    fn d_omega_basic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (v, w) = (rand_vec(&mut rng, 4), rand_vec(&mut rng, 4));
        let eye = OmegaMatrix::identity(4);
        let sq = SquaredEuclidean.distance(v.view(), w.view());
        assert!((d_omega(v.view(), w.view(), &eye).unwrap() - sq).abs() < 1e-14);
        assert_eq!(d_omega(v.view(), v.view(), &eye).unwrap(), 0.0);
    }

    #[test]
    fn d_omega_matches_bilinear_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let om = OmegaMatrix::new(rand_mat(&mut rng, 3, 5)).unwrap();
            let (v, w) = (rand_vec(&mut rng, 5), rand_vec(&mut rng, 5));
            let big = om.lambda_matrix();
            let diff = &v - &w;
            let expected = diff.dot(&big.dot(&diff));
            assert!(rel_close(d_omega(v.view(), w.view(), &om).unwrap(), expected, 1e-12));
        }
    }

    #[test]
    fn omega_diag_equals_relevance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let n = rng.random_range(1..=8);
            let rel = RelevanceProfile::new(rand_vec(&mut rng, n)).unwrap();
            let om = OmegaMatrix::from_relevance(&rel);
            let (v, w) = (rand_vec(&mut rng, n), rand_vec(&mut rng, n));
            let a = d_omega(v.view(), w.view(), &om).unwrap();
            let b = d_lambda(v.view(), w.view(), &rel).unwrap();
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn proto_gradients_basic() {
        let v = array![1.0, -2.0, 0.5];
        let rel = RelevanceProfile::new(array![1.0, 1.0, 1.0]).unwrap();
        assert!(grad_proto_lambda(v.view(), v.view(), &rel).unwrap().iter().all(|&g| g == 0.0));
        let w = array![0.0, 0.0, 0.0];
        assert_eq!(grad_proto_lambda(v.view(), w.view(), &rel).unwrap(), array![-2.0, 4.0, -1.0]);
        let eye = OmegaMatrix::identity(3);
        assert_eq!(grad_proto_omega(v.view(), w.view(), &eye).unwrap(), array![-2.0, 4.0, -1.0]);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-6;
        for _ in 0..100 {
            let n = 5;
            let (v, w) = (rand_vec(&mut rng, n), rand_vec(&mut rng, n));
            let rel = RelevanceProfile::new(rand_vec(&mut rng, n)).unwrap();
            let om = OmegaMatrix::new(rand_mat(&mut rng, 3, n)).unwrap();

            let gw = grad_proto_lambda(v.view(), w.view(), &rel).unwrap();
            let gl = grad_lambda(v.view(), w.view(), &rel).unwrap();
            let gwo = grad_proto_omega(v.view(), w.view(), &om).unwrap();
            let go = grad_omega(v.view(), w.view(), &om).unwrap();
            for j in 0..n {
                let fd = central_diff(
                    |x| {
                        let mut w2 = w.clone();
                        w2[j] = x;
                        d_lambda(v.view(), w2.view(), &rel).unwrap()
                    },
                    w[j],
                    h,
                );
                assert!(rel_close(gw[j], fd, 1e-5), "{} {}", gw[j], fd);
                let fd = central_diff(
                    |x| {
                        let mut l2 = rel.lambda().clone();
                        l2[j] = x;
                        d_lambda(v.view(), w.view(), &RelevanceProfile::new(l2).unwrap()).unwrap()
                    },
                    rel.lambda()[j],
                    h,
                );
                assert!(rel_close(gl[j], fd, 1e-5), "{} {}", gl[j], fd);
                let fd = central_diff(
                    |x| {
                        let mut w2 = w.clone();
                        w2[j] = x;
                        d_omega(v.view(), w2.view(), &om).unwrap()
                    },
                    w[j],
                    h,
                );
                assert!(rel_close(gwo[j], fd, 1e-5), "{} {}", gwo[j], fd);
                for r in 0..3 {
                    let fd = central_diff(
                        |x| {
                            let mut o2 = om.omega().clone();
                            o2[[r, j]] = x;
                            d_omega(v.view(), w.view(), &OmegaMatrix::new(o2).unwrap()).unwrap()
                        },
                        om.omega()[[r, j]],
                        h,
                    );
                    assert!(rel_close(go[[r, j]], fd, 1e-5), "{} {}", go[[r, j]], fd);
                }
            }
        }
    }

    #[test]
    fn grad_lambda_edge_cases() {
        let rel = RelevanceProfile::new(array![0.0, 0.5]).unwrap();
        let v = array![1.0, 2.0];
        let g = grad_lambda(v.view(), array![0.0, 0.0].view(), &rel).unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 2.0 * 0.5 * 4.0);
        assert!(grad_lambda(v.view(), v.view(), &rel).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn grad_omega_scalar_case() {
        let om = OmegaMatrix::new(array![[0.7]]).unwrap();
        let g = grad_omega(array![3.0].view(), array![1.0].view(), &om).unwrap();
        assert!((g[[0, 0]] - 2.0 * 0.7 * 4.0).abs() < 1e-14);
        let v = array![1.0];
        assert_eq!(grad_omega(v.view(), v.view(), &om).unwrap()[[0, 0]], 0.0);
    }

    #[test]
    fn normalization() {
        let rel = RelevanceProfile::new(array![3.0, 4.0]).unwrap().normalize().unwrap();
        assert!((rel.lambda()[0] - 0.6).abs() < 1e-15 && (rel.lambda()[1] - 0.8).abs() < 1e-15);
        let again = rel.normalize().unwrap();
        assert!((&again.lambda - &rel.lambda).iter().all(|d| d.abs() < 1e-12));

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let om = OmegaMatrix::new(rand_mat(&mut rng, 3, 4)).unwrap().normalize().unwrap();
        let fro: f64 = om.omega().iter().map(|x| x * x).sum();
        assert!((fro - 1.0).abs() < 1e-12);

        assert!(matches!(
            RelevanceProfile::new(array![0.0, 0.0]).unwrap().normalize(),
            Err(Error::AllZeroParameters)
        ));
        assert!(matches!(
            OmegaMatrix::new(Array2::zeros((2, 2))).unwrap().normalize(),
            Err(Error::AllZeroParameters)
        ));
    }

    #[test]
    fn clamping() {
        let r = RelevanceProfile::new(array![0.5, -0.1]).unwrap().clamp().unwrap();
        assert_eq!(r.lambda(), &array![0.5, 0.0]);
        assert!(matches!(
            RelevanceProfile::new(array![-1.0, -0.1]).unwrap().clamp(),
            Err(Error::AllZeroParameters)
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = rand_vec(&mut rng, 8);
            if x.iter().all(|&v| v <= 0.0) {
                continue;
            }
            let c = RelevanceProfile::new(x.clone()).unwrap().clamp().unwrap();
            for (a, b) in c.lambda().iter().zip(&x) {
                assert_eq!(*a, b.max(0.0));
            }
        }
    }

    #[test]
    fn determinant_monitoring() {
        assert!(!OmegaMatrix::identity(3).is_degenerate());
        assert!((OmegaMatrix::identity(3).log_det_lambda().unwrap()).abs() < 1e-15);
        let singular = OmegaMatrix::new(array![[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(singular.is_degenerate());
        let rect = OmegaMatrix::new(array![[1.0, 0.0, 0.0]]).unwrap();
        assert!(rect.log_det_lambda().is_none());
        assert!(!rect.is_degenerate());
        let om = OmegaMatrix::new(array![[2.0, 1.0], [1.0, 3.0]]).unwrap();
        assert!((om.log_det_lambda().unwrap() - 25f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn omega_shape_rules() {
        assert!(OmegaMatrix::new(Array2::zeros((3, 2))).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let om = OmegaMatrix::init_diag_dominant(2, 5, 1e-3, &mut rng).unwrap();
        assert_eq!((om.rows(), om.cols()), (2, 5));
        assert!((om.relevances().sum() - 1.0).abs() < 1e-12);
        assert!(om.omega()[[0, 0]] > 0.6 && om.omega()[[0, 3]].abs() < 0.01);
    }

    #[test]
    fn json_shapes() {
        let rel = RelevanceProfile::new(array![0.6, 0.8]).unwrap();
        assert_eq!(serde_json::to_string(&rel).unwrap(), "[0.6,0.8]");
        let om: OmegaMatrix = serde_json::from_str("[[1.0,0.5],[0.0,2.0]]").unwrap();
        assert_eq!(om.omega(), &array![[1.0, 0.5], [0.0, 2.0]]);
    }
}
