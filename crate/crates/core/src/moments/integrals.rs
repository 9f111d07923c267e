//! Grid quadrature of the moment integrals: M_k(T) and the twisted first
//! moment I(T). Grids evaluate in parallel blocks with a deterministic
//! sequential reduction; outputs do not depend on the thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::construction::{build_poly_a, build_poly_b, CoefficientVector, ConstructionParams};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::numerics::simpson::{simpson_grid_len, simpson_sum, simpson_with_estimate};
use crate::numerics::KahanSum;
use crate::zeta::{zeta_em_half, zeta_rs_with, RsTables, RS_T_MIN};

/// A quadrature value with a grid-refinement error estimate.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub err: f64,
}

/// Complex quadrature of I(T) with separated error sources.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ComplexQuadrature {
    pub re: f64,
    pub im: f64,
    /// Grid-refinement estimate.
    pub quad_err: f64,
    /// Integrated zeta-evaluator error bound.
    pub eval_err: f64,
    /// Quadrature of the Euler-Maclaurin tail zeta(s) - sum_{n<=T} n^{-s}
    /// against the same weight: I - I_truncated.
    pub trunc_diff_re: f64,
    pub trunc_diff_im: f64,
}

impl ComplexQuadrature {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.value().norm()
    }
}

/// Dirichlet polynomial prepared for repeated evaluation at s = 1/2 + it.
#[derive(Debug, Clone)]
pub struct PolyEvaluator {
    weights: Vec<f64>, // c(n)/sqrt(n), n = 1.. (index 0 is n=1)
    ln_n: Vec<f64>,
}

impl PolyEvaluator {
    pub fn new(coeffs: &CoefficientVector) -> Self {
        let mut weights = Vec::with_capacity(coeffs.support());
        let mut ln_n = Vec::with_capacity(coeffs.support());
        for n in 1..=coeffs.support() {
            let c = coeffs.get(n);
            if c != 0.0 {
                weights.push(c / (n as f64).sqrt());
                ln_n.push((n as f64).ln());
            }
        }
        Self { weights, ln_n }
    }

    /// Value at s = 1/2 + it.
    #[inline]
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (w, ln) in self.weights.iter().zip(&self.ln_n) {
            let (s, c) = (t * ln).sin_cos();
            re += w * c;
            im -= w * s;
        }
        Complex64::new(re, im)
    }

    /// sum_n c(n)/sqrt(n), a sup bound for |poly| on the half line.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// |zeta(1/2+it)| and its error bound on a uniform grid.
fn abs_zeta_grid(t0: f64, step: f64, len: usize) -> Result<Vec<(f64, f64)>> {
    let t_max = t0 + step * (len - 1) as f64;
    let tables = RsTables::for_height(t_max + 1.0);
    (0..len)
        .into_par_iter()
        .map(|i| {
            let t = t0 + i as f64 * step;
            let zv = if t < RS_T_MIN {
                zeta_em_half(t)?
            } else {
                zeta_rs_with(&tables, t)?
            };
            Ok((zv.value.norm(), zv.err))
        })
        .collect()
}

/// M_k(T) = int_0^T |zeta(1/2+it)|^{2k} dt by composite Simpson.
pub fn moment_mk(k: f64, t: f64, step: f64) -> Result<QuadratureResult> {
    Ok(moment_mk_multi(&[k], t, step)?.pop().unwrap())
}

/// Several powers on one shared |zeta| grid.
pub fn moment_mk_multi(ks: &[f64], t: f64, step: f64) -> Result<Vec<QuadratureResult>> {
    if t < 0.0 {
        return Err(Error::invalid("T must be nonnegative"));
    }
    if t == 0.0 {
        return Ok(ks.iter().map(|_| QuadratureResult { value: 0.0, err: 0.0 }).collect());
    }
    if step > 0.05 {
        return Err(Error::precision(format!(
            "step {step} too coarse to resolve |zeta| oscillation (need <= 0.05)"
        )));
    }
    let len = simpson_grid_len(0.0, t, step);
    let h = t / (len - 1) as f64;
    let grid = abs_zeta_grid(0.0, h, len)?;
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        if !(k > 0.0) {
            return Err(Error::invalid("moment order k must be positive"));
        }
        let values: Vec<f64> = grid.par_iter().map(|&(a, _)| a.powf(2.0 * k)).collect();
        let (value, quad_err) = simpson_with_estimate(&values, h);
        // Integrated evaluator error: d|z|^{2k} = 2k |z|^{2k-1} d|z|.
        let mut eval_err = KahanSum::new();
        for &(a, e) in &grid {
            eval_err.add(2.0 * k * a.powf(2.0 * k - 1.0) * e);
        }
        let err = quad_err + eval_err.value() * h;
        out.push(QuadratureResult { value, err });
    }
    Ok(out)
}

/// Euler-Maclaurin tail zeta(s) - sum_{n<=N} n^{-s} at s = 1/2 + it
/// for N = floor(T); the corrections beyond the two explicit Bernoulli terms
/// are ~(t/N)^4 N^{-7/2} here and are folded into the result error elsewhere.
fn em_tail(t: f64, n_floor: f64) -> Complex64 {
    let s = Complex64::new(0.5, t);
    let ln_n = n_floor.ln();
    let n_pow_minus_s = (-s * ln_n).exp();
    let mut tail = n_pow_minus_s * n_floor / (s - 1.0) - n_pow_minus_s * 0.5;
    // B2/2! s N^{-s-1} and B4/4! s(s+1)(s+2) N^{-s-3}
    tail += n_pow_minus_s / n_floor * s * (1.0 / 12.0);
    tail -= n_pow_minus_s / (n_floor * n_floor * n_floor) * s * (s + 1.0) * (s + 2.0) / 720.0;
    tail
}

/// I(T) = int_0^T K(t/T) zeta(1/2+it) prod_l A_l(1/2+it) B_l(1/2-it) dt.
///
/// Also integrates the sharp-truncation tail against the same weight, so the
/// run can audit |I - I_truncated| against the T^{1/2} budget.
pub fn compute_i(
    params: &ConstructionParams,
    kernel: &Kernel,
    step: f64,
) -> Result<ComplexQuadrature> {
    if step > 0.05 {
        return Err(Error::precision("step too coarse for I(T) (need <= 0.05)"));
    }
    let t = params.t();
    let polys_a: Vec<PolyEvaluator> = (1..=params.active_a())
        .map(|l| build_poly_a(params, l).map(|c| PolyEvaluator::new(&c)))
        .collect::<Result<_>>()?;
    let polys_b: Vec<PolyEvaluator> = (1..=params.active_b())
        .map(|l| build_poly_b(params, l).map(|c| PolyEvaluator::new(&c)))
        .collect::<Result<_>>()?;

    let lo = kernel.theta() * t;
    let hi = (1.0 - kernel.theta()) * t;
    let len = simpson_grid_len(lo, hi, step);
    let h = (hi - lo) / (len - 1) as f64;
    let tables = RsTables::for_height(hi + 1.0);
    let n_floor = t.floor();

    struct Point {
        re: f64,
        im: f64,
        tail_re: f64,
        tail_im: f64,
        err_weighted: f64,
    }
    let points: Vec<Point> = (0..len)
        .into_par_iter()
        .map(|i| {
            let ti = lo + i as f64 * h;
            let w = kernel.eval(ti / t);
            if w == 0.0 {
                return Ok(Point {
                    re: 0.0,
                    im: 0.0,
                    tail_re: 0.0,
                    tail_im: 0.0,
                    err_weighted: 0.0,
                });
            }
            let zv = if ti < RS_T_MIN {
                zeta_em_half(ti)?
            } else {
                zeta_rs_with(&tables, ti)?
            };
            let mut prod = Complex64::new(1.0, 0.0);
            for p in &polys_a {
                prod *= p.eval(ti);
            }
            for p in &polys_b {
                prod *= p.eval(ti).conj();
            }
            let full = w * zv.value * prod;
            let tail = w * em_tail(ti, n_floor) * prod;
            Ok(Point {
                re: full.re,
                im: full.im,
                tail_re: tail.re,
                tail_im: tail.im,
                err_weighted: w * zv.err * prod.norm(),
            })
        })
        .collect::<Result<_>>()?;

    let res: Vec<f64> = points.iter().map(|p| p.re).collect();
    let ims: Vec<f64> = points.iter().map(|p| p.im).collect();
    let (re, re_err) = simpson_with_estimate(&res, h);
    let (im, im_err) = simpson_with_estimate(&ims, h);
    let tail_re = simpson_sum(&points.iter().map(|p| p.tail_re).collect::<Vec<_>>(), h);
    let tail_im = simpson_sum(&points.iter().map(|p| p.tail_im).collect::<Vec<_>>(), h);
    let mut eval_err = KahanSum::new();
    for p in &points {
        eval_err.add(p.err_weighted);
    }
    Ok(ComplexQuadrature {
        re,
        im,
        quad_err: (re_err * re_err + im_err * im_err).sqrt(),
        eval_err: eval_err.value() * h,
        trunc_diff_re: tail_re,
        trunc_diff_im: tail_im,
    })
}

/// int_0^T K(t/T) |poly(1/2+it)|^{2a} dt in log space (robust for large 2a),
/// returning (log value, refinement estimate of the log).
pub fn weighted_power_integral_log(
    kernel: &Kernel,
    t: f64,
    poly: &PolyEvaluator,
    two_a: f64,
    step: f64,
) -> (f64, f64) {
    let lo = kernel.theta() * t;
    let hi = (1.0 - kernel.theta()) * t;
    let len = simpson_grid_len(lo, hi, step);
    let h = (hi - lo) / (len - 1) as f64;
    let log_values: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|i| {
            let ti = lo + i as f64 * h;
            let w = kernel.eval(ti / t);
            if w == 0.0 {
                return f64::NEG_INFINITY;
            }
            let norm_sq = poly.eval(ti).norm_sqr();
            w.ln() + (two_a / 2.0) * norm_sq.ln()
        })
        .collect();
    (
        log_simpson(&log_values, h),
        log_simpson_refinement(&log_values, h),
    )
}

/// Same integral for |zeta|^{2k}.
pub fn weighted_zeta_power_integral_log(
    kernel: &Kernel,
    t: f64,
    two_k: f64,
    step: f64,
) -> Result<(f64, f64)> {
    let lo = kernel.theta() * t;
    let hi = (1.0 - kernel.theta()) * t;
    let len = simpson_grid_len(lo, hi, step);
    let h = (hi - lo) / (len - 1) as f64;
    let grid = abs_zeta_grid(lo, h, len)?;
    let log_values: Vec<f64> = (0..len)
        .map(|i| {
            let ti = lo + i as f64 * h;
            let w = kernel.eval(ti / t);
            if w == 0.0 || grid[i].0 == 0.0 {
                f64::NEG_INFINITY
            } else {
                w.ln() + two_k * grid[i].0.ln()
            }
        })
        .collect();
    Ok((
        log_simpson(&log_values, h),
        log_simpson_refinement(&log_values, h),
    ))
}

/// log of a Simpson sum whose integrand is given in logs (all weights > 0).
fn log_simpson(log_values: &[f64], h: f64) -> f64 {
    let n = log_values.len();
    let hi = log_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = KahanSum::new();
    for (i, &lv) in log_values.iter().enumerate() {
        let w = if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(w * (lv - hi).exp());
    }
    hi + (acc.value() * h / 3.0).ln()
}

fn log_simpson_refinement(log_values: &[f64], h: f64) -> f64 {
    if (log_values.len() - 1) % 4 != 0 {
        return f64::NAN;
    }
    let coarse: Vec<f64> = log_values.iter().step_by(2).cloned().collect();
    let fine = log_simpson(log_values, h);
    let s2h = log_simpson(&coarse, 2.0 * h);
    (fine - s2h).abs() / 15.0
}
