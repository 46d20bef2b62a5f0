//! Helpers shared across the integration-test targets.
#![allow(dead_code)] // each test binary uses its own subset

/// Relative comparison against the larger magnitude, floored so that exact
/// zeros compare absolutely.
pub fn rel_dev(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(1e-300);
    (a - b).abs() / scale
}

#[track_caller]
pub fn assert_rel(actual: f64, expected: f64, tol: f64) {
    let dev = rel_dev(actual, expected);
    assert!(
        dev <= tol,
        "got {actual:.17e}, want {expected:.17e} (rel dev {dev:.3e} > tol {tol:.1e})"
    );
}

#[track_caller]
pub fn assert_abs(actual: f64, expected: f64, tol: f64) {
    let dev = (actual - expected).abs();
    assert!(
        dev <= tol,
        "got {actual:.17e}, want {expected:.17e} (abs dev {dev:.3e} > tol {tol:.1e})"
    );
}

/// Central-difference k-th derivative of `f` at `x` with step `h`
/// (k = 1, 2, 3; truncation error O(h²) in each case).
pub fn central_diff(f: &dyn Fn(f64) -> f64, k: usize, x: f64, h: f64) -> f64 {
    match k {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => {
            (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h)
        }
        _ => panic!("central_diff supports k = 1..=3, got {k}"),
    }
}

/// One Richardson extrapolation step over `central_diff`: the shared
/// error expansion a·h² + b·h⁴ + … leaves O(h⁴).
pub fn richardson_diff(f: &dyn Fn(f64) -> f64, k: usize, x: f64, h: f64) -> f64 {
    (4.0 * central_diff(f, k, x, 0.5 * h) - central_diff(f, k, x, h)) / 3.0
}

/// Largest relative deviation between two equal-length series, measured
/// against the sup norm of the pair (suits series that pass through zero).
pub fn sup_rel_dev(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "series lengths differ");
    let sup = a
        .iter()
        .chain(b.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1e-300);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max)
        / sup
}
