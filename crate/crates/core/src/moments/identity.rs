//! The exact mean-square identity for smoothed Dirichlet polynomials:
//!
//!   int K(t/T) |sum_n c(n) n^{-1/2-it}|^2 dt
//!     = T sum_{m,n} (c(m) c(n) / sqrt(mn)) K̂(T log(n/m)).
//!
//! Both sides are computed independently: the left by Simpson quadrature of
//! the oscillating square, the right by the pair sum with exact transform
//! values. Disagreement beyond the combined numerical error is a bug, not a
//! tolerance matter.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::construction::CoefficientVector;
use crate::error::Result;
use crate::kernel::Kernel;
use crate::numerics::simpson::{simpson_grid_len, simpson_with_estimate};
use crate::numerics::KahanSum;

/// Memoized kernel transform values for one (kernel, T) pair, plus the
/// audited decay envelope used to skip pairs whose contribution cannot reach
/// the target accuracy.
pub struct FourierCache<'a> {
    kernel: &'a Kernel,
    t: f64,
    pub khat0: f64,
    pub c4: f64,
    map: HashMap<(u64, u64), Complex64>,
    pub skipped_mass: f64,
    pub evals: usize,
}

impl<'a> FourierCache<'a> {
    pub fn new(kernel: &'a Kernel, t: f64) -> Result<Self> {
        Ok(Self {
            kernel,
            t,
            khat0: kernel.fourier(0.0)?.re,
            c4: kernel.decay_constant(4)?,
            map: HashMap::new(),
            skipped_mass: 0.0,
            evals: 0,
        })
    }

    /// K̂(T log(n/m)) for a reduced ratio key.
    fn transform(&mut self, n_red: u64, m_red: u64) -> Result<Complex64> {
        if let Some(&v) = self.map.get(&(n_red, m_red)) {
            return Ok(v);
        }
        let xi = self.t * (n_red as f64 / m_red as f64).ln();
        let v = self.kernel.fourier(xi)?;
        self.evals += 1;
        self.map.insert((n_red, m_red), v);
        Ok(v)
    }

    /// Decay envelope C4 (1+|xi|)^{-4} at xi = T log(n/m).
    fn envelope(&self, n: u64, m: u64) -> f64 {
        let xi = self.t * (n as f64 / m as f64).ln();
        self.c4 * (1.0 + xi.abs()).powi(-4)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Result of one identity check.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_err: f64,
    pub rhs_err: f64,
}

impl IdentityCheck {
    /// |lhs - rhs| against the combined error with a floor of `rel_tol`
    /// relative to the right side.
    pub fn consistent(&self, rel_tol: f64) -> bool {
        (self.lhs - self.rhs).abs() <= (self.lhs_err + self.rhs_err).max(rel_tol * self.rhs.abs())
    }

    pub fn rel_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(1e-300)
    }
}

/// Both sides of the mean-square identity.
pub fn mean_square_identity(
    coeffs: &CoefficientVector,
    t: f64,
    cache: &mut FourierCache,
) -> Result<IdentityCheck> {
    let (lhs, lhs_err) = quadrature_side(coeffs, t, cache.kernel)?;
    let (rhs, rhs_err) = pair_sum_side(coeffs, t, cache)?;
    Ok(IdentityCheck {
        lhs,
        rhs,
        lhs_err,
        rhs_err,
    })
}

/// Left side: Simpson quadrature of K(t/T) |D(t)|^2 over the kernel support.
fn quadrature_side(coeffs: &CoefficientVector, t: f64, kernel: &Kernel) -> Result<(f64, f64)> {
    let support = coeffs.support().max(2) as f64;
    // Resolve the highest beat frequency log(support) with ~125 points per
    // period; refinement estimate reports what is left.
    let step = (0.05 / support.ln()).min(0.01);
    let lo = kernel.theta() * t;
    let hi = (1.0 - kernel.theta()) * t;
    let len = simpson_grid_len(lo, hi, step);
    let h = (hi - lo) / (len - 1) as f64;

    let terms: Vec<(f64, f64)> = (1..=coeffs.support())
        .filter(|&n| coeffs.get(n) != 0.0)
        .map(|n| (coeffs.get(n) / (n as f64).sqrt(), (n as f64).ln()))
        .collect();

    // Blocks of the grid evaluate independently; within a block each term
    // advances by a complex multiplicative recurrence re-seeded exactly at
    // the block start.
    const BLOCK: usize = 4096;
    let values: Vec<f64> = (0..len.div_ceil(BLOCK))
        .into_par_iter()
        .flat_map_iter(|blk| {
            let start = blk * BLOCK;
            let count = BLOCK.min(len - start);
            let mut re = vec![0.0f64; count];
            let mut im = vec![0.0f64; count];
            let t_start = lo + start as f64 * h;
            for &(w, ln_n) in &terms {
                let (s0, c0) = (t_start * ln_n).sin_cos();
                let (sd, cd) = (h * ln_n).sin_cos();
                let mut zr = w * c0;
                let mut zi = -w * s0;
                for j in 0..count {
                    re[j] += zr;
                    im[j] += zi;
                    let nr = zr * cd + zi * sd;
                    zi = zi * cd - zr * sd;
                    zr = nr;
                }
            }
            (0..count)
                .map(|j| {
                    let ti = t_start + j as f64 * h;
                    kernel.eval(ti / t) * (re[j] * re[j] + im[j] * im[j])
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let (value, est) = simpson_with_estimate(&values, h);
    // Recurrence drift: ~BLOCK rounding steps per term per block.
    let drift = 4.0 * BLOCK as f64 * f64::EPSILON * value.abs();
    Ok((value, est + drift))
}

/// Right side: T [ K̂(0) sum c^2/n + 2 sum_{m<n} c(m)c(n)/sqrt(mn) Re K̂(T log n/m) ].
fn pair_sum_side(
    coeffs: &CoefficientVector,
    t: f64,
    cache: &mut FourierCache,
) -> Result<(f64, f64)> {
    let diag = coeffs.diagonal_mass();
    let scale = t * cache.khat0 * diag; // magnitude reference for skipping
    let mut acc = KahanSum::new();
    acc.add(cache.khat0 * diag);
    let mut err = 0.0;
    let support = coeffs.support() as u64;
    for n in 2..=support {
        let cn = coeffs.get(n as usize);
        if cn == 0.0 {
            continue;
        }
        for m in 1..n {
            let cm = coeffs.get(m as usize);
            if cm == 0.0 {
                continue;
            }
            let pair_mass = 2.0 * cm * cn / ((m * n) as f64).sqrt();
            let bound = pair_mass.abs() * cache.envelope(n, m);
            if t * bound < 1e-15 * scale.abs().max(1e-300) {
                err += t * bound;
                cache.skipped_mass += pair_mass.abs();
                continue;
            }
            let g = gcd(n, m);
            let k_hat = cache.transform(n / g, m / g)?;
            acc.add(pair_mass * k_hat.re);
            err += pair_mass.abs() * 1e-12; // per-evaluation transform budget
        }
    }
    Ok((t * acc.value(), t * err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::CoeffLabel;

    fn vector(entries: &[(usize, f64)]) -> CoefficientVector {
        let n = entries.iter().map(|&(n, _)| n).max().unwrap();
        let mut v = vec![0.0; n + 1];
        for &(i, c) in entries {
            v[i] = c;
        }
        CoefficientVector::new(v, CoeffLabel::Unit)
    }

    #[test]
    fn single_term_is_kernel_mass() {
        let kernel = Kernel::from_theta(0.3).unwrap();
        let t = 750.0;
        let mut cache = FourierCache::new(&kernel, t).unwrap();
        let c = vector(&[(1, 1.0)]);
        let chk = mean_square_identity(&c, t, &mut cache).unwrap();
        let expect = t * kernel.integral();
        assert!((chk.rhs - expect).abs() < 1e-9 * expect);
        assert!((chk.lhs - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn two_term_closed_form() {
        let kernel = Kernel::from_theta(0.3).unwrap();
        let t = 600.0;
        let mut cache = FourierCache::new(&kernel, t).unwrap();
        let c = vector(&[(1, 1.0), (2, 1.0)]);
        let chk = mean_square_identity(&c, t, &mut cache).unwrap();
        let khat = kernel.fourier(t * 2f64.ln()).unwrap();
        let expect = t * (1.5 * cache.khat0 + 2.0 * khat.re / 2f64.sqrt());
        assert!((chk.rhs - expect).abs() < 1e-8 * expect.abs().max(1.0));
        assert!(chk.consistent(1e-6), "gap={}", chk.rel_gap());
    }

    #[test]
    fn random_vectors_agree() {
        let kernel = Kernel::from_theta(0.3).unwrap();
        let mut state = 0x243f6a8885a308d3u64;
        let mut rand = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..4 {
            let support = 20 + (rand() * 80.0) as usize;
            let t = 500.0 + rand() * 1500.0;
            let mut entries = vec![(1, 0.2 + rand())];
            for n in 2..=support {
                if rand() < 0.6 {
                    entries.push((n, rand()));
                }
            }
            let c = vector(&entries);
            let mut cache = FourierCache::new(&kernel, t).unwrap();
            let chk = mean_square_identity(&c, t, &mut cache).unwrap();
            assert!(
                chk.consistent(1e-6),
                "trial {trial}: lhs={} rhs={} gap={}",
                chk.lhs,
                chk.rhs,
                chk.rel_gap()
            );
        }
    }
}
