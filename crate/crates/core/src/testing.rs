//! Finite-difference helpers for unit tests.

/// Central difference `(f(x+h) − f(x−h)) / 2h`.
pub(crate) fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
