//! Composite Simpson quadrature on uniform grids with a Richardson-style
//! grid-refinement error estimate.

use super::kahan::KahanSum;

/// Simpson sum over pre-evaluated values on a uniform grid of step `h`.
/// `values.len()` must be odd (even interval count >= 2).
pub fn simpson_sum(values: &[f64], h: f64) -> f64 {
    assert!(values.len() >= 3 && values.len() % 2 == 1);
    let mut acc = KahanSum::new();
    acc.add(values[0]);
    acc.add(values[values.len() - 1]);
    for (i, &v) in values.iter().enumerate().skip(1).take(values.len() - 2) {
        acc.add(if i % 2 == 1 { 4.0 * v } else { 2.0 * v });
    }
    acc.value() * h / 3.0
}

/// Simpson value plus |S_h - S_2h|/15 as the refinement error estimate.
/// The coarse value reuses the even-indexed entries, so the estimate is free.
pub fn simpson_with_estimate(values: &[f64], h: f64) -> (f64, f64) {
    let fine = simpson_sum(values, h);
    if values.len() < 5 || (values.len() - 1) % 4 != 0 {
        return (fine, f64::NAN);
    }
    let coarse: Vec<f64> = values.iter().step_by(2).cloned().collect();
    let s2h = simpson_sum(&coarse, 2.0 * h);
    (fine, (fine - s2h).abs() / 15.0)
}

/// Number of grid points for Simpson over [a, b] with step at most `step`:
/// interval count rounded up to the next multiple of 4 so the refinement
/// estimate is available.
pub fn simpson_grid_len(a: f64, b: f64, step: f64) -> usize {
    let n = (((b - a) / step).ceil() as usize).max(4);
    let n = n.div_ceil(4) * 4;
    n + 1
}
