#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `‖a − b‖∞ / max(‖a‖∞, ‖b‖∞)`, with a tiny floor so an all-zero pair
/// compares equal.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = a.iter().chain(b).map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
    diff / scale
}

pub fn randn_vec<R: Rng>(rng: &mut R, n: usize) -> Array1<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn randn_mat<R: Rng>(rng: &mut R, m: usize, n: usize) -> Array2<f64> {
    Array2::from_shape_fn((m, n), |_| rng.sample::<f64, _>(StandardNormal))
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sparselvq")
}
