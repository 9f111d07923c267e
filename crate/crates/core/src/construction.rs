//! The resonator construction: parameter pack, Dirichlet polynomial
//! coefficients, truncated convolutions and the prime weight f(p).
//!
//! For exact rational k > 1 and height T, set T0 = T^{1-theta}. The A-side
//! polynomials carry d_{k/a_l}(n) up to T0^{1/a_l} (a_l the greedy expansion
//! of 1 - 1/k, with the convention a_0 = k for the zeta surrogate), the
//! B-side carries d_{k/b_l}(n) up to T0^{1/b_l} (b_l expanding 1). Weights
//! are `W_A[0] = 20 k^3`, `W_A[l] = 20 k^3 a_l^2`, `W_B[l] = 20 k^3 b_l^2`, and the
//! shifts divide by log T0.

use std::io::Write;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::divisor::{sieve_divisor, PrimeTable};
use crate::error::{Error, Result};
use crate::numerics::{logaddexp, KahanSum};
use crate::sylvester::{active_length, construction_exponents, ExponentPair, DEFAULT_TERMS};

/// Terms with log below this underflow double precision and are dropped.
const LOG_UNDERFLOW: f64 = -760.0;

/// Default cap on dense coefficient arrays (8 * this bytes of memory).
pub const DEFAULT_COEFF_BUDGET: usize = 1 << 25;

/// Full parameter pack of one construction run.
#[derive(Debug, Clone)]
pub struct ConstructionParams {
    k: BigRational,
    k_f64: f64,
    t: f64,
    theta: f64,
    t0: f64,
    log_t0: f64,
    exponents: ExponentPair,
    active_a: usize,
    active_b: usize,
}

impl ConstructionParams {
    pub fn k_rational(&self) -> &BigRational {
        &self.k
    }

    pub fn k(&self) -> f64 {
        self.k_f64
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn log_t0(&self) -> f64 {
        self.log_t0
    }

    pub fn exponents(&self) -> &ExponentPair {
        &self.exponents
    }

    /// Number of A-side polynomials with at least one term n >= 2.
    pub fn active_a(&self) -> usize {
        self.active_a
    }

    pub fn active_b(&self) -> usize {
        self.active_b
    }

    /// Exponent a_j with the a_0 = k convention, as f64 (+inf when huge).
    pub fn exponent_a(&self, j: usize) -> f64 {
        if j == 0 {
            self.k_f64
        } else {
            self.exponents.a.term_f64(j)
        }
    }

    pub fn exponent_b(&self, l: usize) -> f64 {
        self.exponents.b.term_f64(l)
    }

    /// ln a_j, finite for every stored index.
    pub fn ln_exponent_a(&self, j: usize) -> f64 {
        if j == 0 {
            self.k_f64.ln()
        } else {
            self.exponents.a.term_ln(j)
        }
    }

    pub fn ln_exponent_b(&self, l: usize) -> f64 {
        self.exponents.b.term_ln(l)
    }

    /// `ln W_A[j]`; `W_A[0] = 20k^3`, `W_A[j] = 20 k^3 a_j^2`.
    pub fn ln_weight_a(&self, j: usize) -> f64 {
        let base = (20.0 * self.k_f64.powi(3)).ln();
        if j == 0 {
            base
        } else {
            base + 2.0 * self.ln_exponent_a(j)
        }
    }

    pub fn ln_weight_b(&self, l: usize) -> f64 {
        (20.0 * self.k_f64.powi(3)).ln() + 2.0 * self.ln_exponent_b(l)
    }

    /// `W_A[j]` as f64 (+inf once a_j^2 overflows).
    pub fn weight_a(&self, j: usize) -> f64 {
        let base = 20.0 * self.k_f64.powi(3);
        if j == 0 {
            return base;
        }
        let a = self.exponent_a(j);
        if a < 1e150 {
            base * a * a
        } else {
            self.ln_weight_a(j).exp()
        }
    }

    pub fn weight_b(&self, l: usize) -> f64 {
        let b = self.exponent_b(l);
        if b < 1e150 {
            20.0 * self.k_f64.powi(3) * b * b
        } else {
            self.ln_weight_b(l).exp()
        }
    }

    /// Shift `alpha_j = W_A[j] / log T0`.
    pub fn shift_alpha(&self, j: usize) -> f64 {
        self.weight_a(j) / self.log_t0
    }

    pub fn shift_beta(&self, l: usize) -> f64 {
        self.weight_b(l) / self.log_t0
    }

    /// Stored sequence length (indices beyond this are never materialized).
    pub fn stored_terms(&self) -> usize {
        self.exponents.b.len()
    }
}

/// Largest integer n with n^a <= limit (log comparison with a relative guard
/// so exact integer boundaries like 1000^{1/3} = 10 stay included).
pub fn coefficient_cutoff(limit: f64, a: f64) -> u64 {
    if limit < 1.0 || !a.is_finite() {
        return 1;
    }
    let log_limit = limit.ln() * (1.0 + 1e-12) + 1e-12;
    let guess = (limit.powf(1.0 / a)).floor() as u64;
    let fits = |n: u64| n >= 1 && a * (n as f64).ln() <= log_limit;
    let mut n = guess.max(1);
    while fits(n + 1) {
        n += 1;
    }
    while n > 1 && !fits(n) {
        n -= 1;
    }
    n
}

pub fn build_params(k: &BigRational, t: f64, theta: f64) -> Result<ConstructionParams> {
    let k_f64 = k.to_f64().ok_or_else(|| Error::invalid("k out of range"))?;
    if k_f64 <= 1.0 {
        return Err(Error::invalid(format!("need k > 1, got {k}")));
    }
    if !(t >= 100.0) {
        return Err(Error::invalid(format!("need T >= 100, got {t}")));
    }
    if !(theta > 0.0 && theta < 0.45) {
        return Err(Error::invalid(format!(
            "need theta in (0, 0.45), got {theta}"
        )));
    }
    let exponents = construction_exponents(k, DEFAULT_TERMS)?;
    let t0 = t.powf(1.0 - theta);
    let log_t0 = (1.0 - theta) * t.ln();
    let active_a = active_length(t0, &exponents.a);
    let active_b = active_length(t0, &exponents.b);
    Ok(ConstructionParams {
        k: k.clone(),
        k_f64,
        t,
        theta,
        t0,
        log_t0,
        exponents,
        active_a,
        active_b,
    })
}

/// What a coefficient vector represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffLabel {
    /// d_{k/a_l} cut at T0^{1/a_l}.
    PolyA(usize),
    /// d_{k/b_l} cut at T0^{1/b_l}.
    PolyB(usize),
    /// a-fold truncated self-convolution of one polynomial.
    PowerTruncated(u64),
    /// Ones up to T convolved with every active A polynomial.
    AlphaConv,
    /// Product of every active B polynomial.
    BetaConv,
    /// The vector {1 -> 1}.
    Unit,
}

/// Dense non-negative Dirichlet-series coefficients c(1..=N).
#[derive(Debug, Clone)]
pub struct CoefficientVector {
    coeffs: Vec<f64>, // index 0 unused
    label: CoeffLabel,
}

impl CoefficientVector {
    pub fn new(coeffs: Vec<f64>, label: CoeffLabel) -> Self {
        debug_assert!(coeffs.len() >= 2);
        Self { coeffs, label }
    }

    pub fn unit() -> Self {
        Self {
            coeffs: vec![0.0, 1.0],
            label: CoeffLabel::Unit,
        }
    }

    pub fn label(&self) -> CoeffLabel {
        self.label
    }

    pub fn support(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        if n < self.coeffs.len() {
            self.coeffs[n]
        } else {
            0.0
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_trivial(&self) -> bool {
        self.support() == 1 && (self.coeffs[1] - 1.0).abs() < 1e-15
    }

    /// sum_n c(n)/sqrt(n).
    pub fn mass_over_sqrt(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (n, &c) in self.coeffs.iter().enumerate().skip(1) {
            acc.add(c / (n as f64).sqrt());
        }
        acc.value()
    }

    /// sum_n c(n)^2/n.
    pub fn diagonal_mass(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (n, &c) in self.coeffs.iter().enumerate().skip(1) {
            acc.add(c * c / n as f64);
        }
        acc.value()
    }

    /// Truncated Dirichlet convolution of two coefficient vectors.
    pub fn convolve(&self, other: &Self, support: usize, label: CoeffLabel) -> Self {
        let n_out = support.min(self.support() * other.support());
        let mut out = vec![0.0f64; n_out + 1];
        for (d, &cd) in other.coeffs.iter().enumerate().skip(1) {
            if cd == 0.0 {
                continue;
            }
            let m_max = n_out / d;
            for m in 1..=m_max.min(self.support()) {
                let c = self.coeffs[m];
                if c != 0.0 {
                    out[d * m] += cd * c;
                }
            }
        }
        Self {
            coeffs: out,
            label,
        }
    }

    /// Plain CSV dump: header then one `n,c` row per nonzero coefficient.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,c")?;
        for (n, &c) in self.coeffs.iter().enumerate().skip(1) {
            if c != 0.0 {
                writeln!(w, "{n},{c}")?;
            }
        }
        Ok(())
    }
}

/// A_l coefficients: d_{k/a_l}(n) for n <= T0^{1/a_l}; identically 1 beyond
/// the active range.
pub fn build_poly_a(params: &ConstructionParams, ell: usize) -> Result<CoefficientVector> {
    build_poly(params, ell, true)
}

/// B_l coefficients, same shape with the b-sequence.
pub fn build_poly_b(params: &ConstructionParams, ell: usize) -> Result<CoefficientVector> {
    build_poly(params, ell, false)
}

fn build_poly(params: &ConstructionParams, ell: usize, a_side: bool) -> Result<CoefficientVector> {
    if ell == 0 {
        return Err(Error::invalid("polynomial index starts at 1"));
    }
    let (active, label) = if a_side {
        (params.active_a, CoeffLabel::PolyA(ell))
    } else {
        (params.active_b, CoeffLabel::PolyB(ell))
    };
    if ell > active {
        return Ok(CoefficientVector {
            coeffs: vec![0.0, 1.0],
            label,
        });
    }
    let exponent = if a_side {
        params.exponents.a.term_f64(ell)
    } else {
        params.exponents.b.term_f64(ell)
    };
    let cut = coefficient_cutoff(params.t0, exponent) as usize;
    let order = params.k_f64 / exponent;
    let table = sieve_divisor(order, cut)?;
    Ok(CoefficientVector {
        coeffs: table.values().to_vec(),
        label,
    })
}

/// The a-fold truncated power: coefficients of
/// (sum_{n <= T0^{1/a}} d_{k/a}(n) n^{-s})^a, supported below T0.
pub fn power_truncated(
    k: f64,
    a: u64,
    t0: f64,
    budget: usize,
) -> Result<CoefficientVector> {
    if a == 0 {
        return Err(Error::invalid("power exponent must be >= 1"));
    }
    let cut = coefficient_cutoff(t0, a as f64) as usize;
    let support = (t0.floor() as usize).min(cut.saturating_pow(a.min(64) as u32).max(cut));
    if support + 1 > budget {
        return Err(Error::resource(format!(
            "power_truncated support {support} exceeds coefficient budget {budget}"
        )));
    }
    let base = sieve_divisor(k / a as f64, cut)?;
    let factor = CoefficientVector {
        coeffs: base.values().to_vec(),
        label: CoeffLabel::PowerTruncated(a),
    };
    let mut acc = factor.clone();
    for _ in 1..a {
        acc = acc.convolve(&factor, support, CoeffLabel::PowerTruncated(a));
    }
    Ok(acc)
}

/// alpha = ones-up-to-T convolved with all active A_l; beta = product of all
/// active B_l. Supports stay below T * prod(cuts) <= T^2 and T0 respectively.
pub fn build_alpha_beta(
    params: &ConstructionParams,
    budget: usize,
) -> Result<(CoefficientVector, CoefficientVector)> {
    // beta first: product of active B polynomials.
    let mut beta = CoefficientVector {
        coeffs: vec![0.0, 1.0],
        label: CoeffLabel::BetaConv,
    };
    let mut beta_support = 1usize;
    for ell in 1..=params.active_b {
        let poly = build_poly_b(params, ell)?;
        beta_support = beta_support.saturating_mul(poly.support());
        beta = beta.convolve(&poly, beta_support, CoeffLabel::BetaConv);
    }
    debug_assert!(beta.support() as f64 <= params.t0 * (1.0 + 1e-9));

    // alpha: ones up to T, then the active A polynomials.
    let t_len = params.t.floor() as usize;
    let mut alpha_support = t_len;
    let mut cuts = Vec::new();
    for ell in 1..=params.active_a {
        let poly = build_poly_a(params, ell)?;
        alpha_support = alpha_support.saturating_mul(poly.support());
        cuts.push(poly);
    }
    if alpha_support + 1 > budget {
        return Err(Error::resource(format!(
            "alpha support {alpha_support} exceeds coefficient budget {budget}; lower T or theta"
        )));
    }
    let mut alpha = CoefficientVector {
        coeffs: {
            let mut v = vec![1.0; t_len + 1];
            v[0] = 0.0;
            v
        },
        label: CoeffLabel::AlphaConv,
    };
    for poly in &cuts {
        alpha = alpha.convolve(poly, alpha_support, CoeffLabel::AlphaConv);
    }
    Ok((alpha, beta))
}

/// f(p) = sum_{j>=0} sum_{l>=1} (k^2/(a_j b_l)) p^{-alpha_j - beta_l}, with
/// a_0 = k; term-by-term in log space, truncated at double-precision
/// underflow.
pub fn f_at_prime(params: &ConstructionParams, p: u64) -> f64 {
    let ln_p = (p as f64).ln();
    let ln_k2 = 2.0 * params.k_f64.ln();
    let mut acc = KahanSum::new();
    for j in 0..=params.stored_terms() {
        let ln_aj = params.ln_exponent_a(j);
        let lwa = params.ln_weight_a(j);
        let mut any = false;
        for l in 1..=params.stored_terms() {
            let ln_bl = params.ln_exponent_b(l);
            let lw_sum = logaddexp(lwa, params.ln_weight_b(l));
            // exponent of p^{-alpha_j-beta_l} = -(W_A[j]+W_B[l]) ln p / log T0
            let shift_log = if lw_sum > 700.0 {
                f64::NEG_INFINITY
            } else {
                -lw_sum.exp() * ln_p / params.log_t0
            };
            let ln_term = ln_k2 - ln_aj - ln_bl + shift_log;
            if ln_term > LOG_UNDERFLOW {
                acc.add(ln_term.exp());
                any = true;
            } else {
                break; // beta shifts grow with l
            }
        }
        if !any && j > 0 {
            break; // alpha shifts grow with j
        }
    }
    acc.value()
}

/// Multiplicative extension of f on squarefree n with factors below T0.
pub fn f_squarefree(params: &ConstructionParams, n: u64, primes: &PrimeTable) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("f is defined on positive integers"));
    }
    let factors = primes.factorize(n as usize);
    let mut value = 1.0;
    for (p, e) in factors {
        if e > 1 {
            return Err(Error::invalid(format!("{n} is not squarefree")));
        }
        if p as f64 > params.t0 {
            return Err(Error::invalid(format!(
                "prime factor {p} exceeds T0 = {}",
                params.t0
            )));
        }
        value *= f_at_prime(params, p);
    }
    Ok(value)
}

/// JSON-ready construction summary for the `construct` CLI output.
#[derive(Debug, serde::Serialize)]
pub struct ConstructionSummary {
    pub k: String,
    pub t: f64,
    pub theta: f64,
    pub t0: f64,
    pub log_t0: f64,
    pub paper_faithful_theta: bool,
    pub active_a: usize,
    pub active_b: usize,
    pub exponents_a: Vec<String>,
    pub exponents_b: Vec<String>,
    pub weights_a: Vec<f64>,
    pub weights_b: Vec<f64>,
    pub shifts_alpha: Vec<f64>,
    pub shifts_beta: Vec<f64>,
    pub poly_supports_a: Vec<usize>,
    pub poly_supports_b: Vec<usize>,
    pub alpha_support: Option<usize>,
    pub beta_support: Option<usize>,
}

pub fn summarize(params: &ConstructionParams, budget: usize) -> Result<ConstructionSummary> {
    let show = (params.active_a.max(params.active_b) + 2).min(params.stored_terms());
    let mut poly_supports_a = Vec::new();
    let mut poly_supports_b = Vec::new();
    for ell in 1..=show {
        poly_supports_a.push(build_poly_a(params, ell)?.support());
        poly_supports_b.push(build_poly_b(params, ell)?.support());
    }
    let ab = build_alpha_beta(params, budget).ok();
    Ok(ConstructionSummary {
        k: params.k.to_string(),
        t: params.t,
        theta: params.theta,
        t0: params.t0,
        log_t0: params.log_t0,
        paper_faithful_theta: params.theta < 0.1,
        active_a: params.active_a,
        active_b: params.active_b,
        exponents_a: (1..=show)
            .map(|j| params.exponents.a.term(j).to_string())
            .collect(),
        exponents_b: (1..=show)
            .map(|l| params.exponents.b.term(l).to_string())
            .collect(),
        weights_a: (0..=show).map(|j| params.weight_a(j)).collect(),
        weights_b: (1..=show).map(|l| params.weight_b(l)).collect(),
        shifts_alpha: (0..=show).map(|j| params.shift_alpha(j)).collect(),
        shifts_beta: (1..=show).map(|l| params.shift_beta(l)).collect(),
        poly_supports_a,
        poly_supports_b,
        alpha_support: ab.as_ref().map(|(a, _)| a.support()),
        beta_support: ab.as_ref().map(|(_, b)| b.support()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sylvester::ratio;

    fn params_k2() -> ConstructionParams {
        build_params(&ratio(2, 1), 1000.0, 0.3).unwrap()
    }

    #[test]
    fn weights_match_definition() {
        let p = build_params(&ratio(2, 1), 1e4, 0.3).unwrap();
        assert!((p.weight_a(0) - 160.0).abs() < 1e-10); // 20 k^3
        assert!((p.weight_a(1) - 1440.0).abs() < 1e-9); // 20 k^3 a_1^2, a_1 = 3
        assert!((p.weight_b(1) - 640.0).abs() < 1e-10); // b_1 = 2
    }

    #[test]
    fn shift_alpha_at_log_t0_ten() {
        // T = e^10 with theta -> 0 gives log T0 = 10 and alpha_0 = 160/10.
        let t = (10.0f64).exp();
        let p = build_params(&ratio(2, 1), t, 1e-9).unwrap();
        assert!((p.shift_alpha(0) - 16.0).abs() < 1e-6);
    }

    #[test]
    fn cutoff_handles_exact_integer_boundaries() {
        assert_eq!(coefficient_cutoff(1000.0, 3.0), 10);
        assert_eq!(coefficient_cutoff(999.0, 3.0), 9);
        assert_eq!(coefficient_cutoff(1024.0, 10.0), 2);
        assert_eq!(coefficient_cutoff(1.5, 2.0), 1);
        assert_eq!(coefficient_cutoff(100.0, f64::INFINITY), 1);
    }

    #[test]
    fn poly_coefficients_match_divisor_values() {
        // T0 = 1000^{0.7}? use explicit small case: k=2, T chosen so T0=1000.
        let t = 1000.0f64.powf(1.0 / 0.7);
        let p = build_params(&ratio(2, 1), t, 0.3).unwrap();
        assert!((p.t0() - 1000.0).abs() < 1e-9);
        // a_1 = 3 for k = 2: coefficients d_{2/3}(n), n <= 10.
        let a1 = build_poly_a(&p, 1).unwrap();
        assert_eq!(a1.support(), 10);
        assert!((a1.get(2) - 2.0 / 3.0).abs() < 1e-14);
        assert!((a1.get(4) - 5.0 / 9.0).abs() < 1e-14); // binom(2/3+1, 2)
        // Beyond the active range the polynomial is {1 -> 1}.
        let far = build_poly_a(&p, 7).unwrap();
        assert!(far.is_trivial());
    }

    #[test]
    fn power_truncated_examples() {
        // a = 1: identical to the single polynomial.
        let single = power_truncated(1.5, 1, 100.0, 1 << 20).unwrap();
        let table = sieve_divisor(1.5, 100).unwrap();
        for n in 1..=100 {
            assert_eq!(single.get(n), table.value(n));
        }
        // a(1) = 1 always.
        let squared = power_truncated(2.0, 2, 100.0, 1 << 20).unwrap();
        assert_eq!(squared.get(1), 1.0);
        // Dominance a(n) <= d_k(n), strict when a factorization needs a part
        // above the cutoff T0^{1/2} = 10.
        let d2 = sieve_divisor(2.0, 100).unwrap();
        for n in 1..=100usize {
            assert!(squared.get(n) <= d2.value(n) + 1e-12, "n={n}");
            if n > 10 {
                assert!(
                    squared.get(n) < d2.value(n) - 1e-12 || squared.get(n) == 0.0,
                    "n={n} should be strict"
                );
            } else {
                assert!((squared.get(n) - d2.value(n)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn power_truncated_matches_tuple_enumeration() {
        // Brute-force oracle: enumerate ordered factorizations with each part
        // below the per-factor cutoff.
        fn oracle(k: f64, a: u64, t0: f64) -> Vec<f64> {
            let cut = coefficient_cutoff(t0, a as f64) as usize;
            let table = sieve_divisor(k / a as f64, cut).unwrap();
            let support = t0.floor() as usize;
            let mut out = vec![0.0; support + 1];
            fn recurse(
                table: &crate::divisor::DivisorTable,
                cut: usize,
                depth: u64,
                n: usize,
                weight: f64,
                support: usize,
                out: &mut [f64],
            ) {
                if depth == 0 {
                    out[n] += weight;
                    return;
                }
                for part in 1..=cut {
                    if n * part > support {
                        break;
                    }
                    recurse(
                        table,
                        cut,
                        depth - 1,
                        n * part,
                        weight * table.value(part),
                        support,
                        out,
                    );
                }
            }
            recurse(&table, cut, a, 1, 1.0, support, &mut out);
            out
        }
        for &(k, a, t0) in &[(1.5f64, 2u64, 80.0f64), (2.0, 3, 60.0), (3.0, 2, 50.0)] {
            let fast = power_truncated(k, a, t0, 1 << 20).unwrap();
            let slow = oracle(k, a, t0);
            for n in 1..slow.len() {
                assert!(
                    (fast.get(n) - slow[n]).abs() <= 1e-12 * slow[n].abs().max(1.0),
                    "k={k} a={a} n={n}: {} vs {}",
                    fast.get(n),
                    slow[n]
                );
            }
        }
    }

    #[test]
    fn alpha_beta_bounds_and_supports() {
        let p = build_params(&ratio(3, 2), 2000.0, 0.3).unwrap();
        let (alpha, beta) = build_alpha_beta(&p, 1 << 22).unwrap();
        assert!(beta.support() as f64 <= p.t0());
        assert!((alpha.support() as f64) <= p.t() * p.t());
        assert_eq!(alpha.get(1), 1.0);
        assert_eq!(beta.get(1), 1.0);
        // 0 <= alpha(n), beta(n) <= d_k(n) exhaustively.
        let dk = sieve_divisor(1.5, alpha.support()).unwrap();
        for n in 1..=alpha.support() {
            assert!(alpha.get(n) >= -1e-15);
            assert!(alpha.get(n) <= dk.value(n) + 1e-9 * dk.value(n).max(1.0), "n={n}");
        }
        for n in 1..=beta.support() {
            assert!(beta.get(n) >= -1e-15);
            assert!(beta.get(n) <= dk.value(n) + 1e-9 * dk.value(n).max(1.0));
        }
    }

    #[test]
    fn alpha_beta_match_tuple_enumeration() {
        // Brute-force oracle over factorization tuples: alpha(n) sums
        // prod d_{k/a_l}(m_l) over n = m_0 prod m_l with m_0 <= T and
        // m_l <= T0^{1/a_l}; beta likewise without the m_0 factor.
        let p = build_params(&ratio(3, 2), 150.0, 0.3).unwrap();
        let (alpha, beta) = build_alpha_beta(&p, 1 << 22).unwrap();

        fn enumerate(polys: &[CoefficientVector], support: usize, seed: Vec<f64>) -> Vec<f64> {
            let mut acc = seed;
            for poly in polys {
                let mut next = vec![0.0; acc.len()];
                for (m, c) in acc.iter().enumerate() {
                    if *c == 0.0 {
                        continue;
                    }
                    for part in 1..=poly.support() {
                        if m * part >= next.len() {
                            break;
                        }
                        next[m * part] += c * poly.get(part);
                    }
                }
                acc = next;
            }
            acc.truncate(support + 1);
            acc
        }

        let polys_a: Vec<_> = (1..=p.active_a()).map(|l| build_poly_a(&p, l).unwrap()).collect();
        let mut ones = vec![1.0; alpha.support() + 1];
        ones[0] = 0.0;
        for v in ones.iter_mut().skip(151) {
            *v = 0.0;
        }
        let alpha_oracle = enumerate(&polys_a, alpha.support(), ones);
        for n in 1..=alpha.support() {
            assert!((alpha.get(n) - alpha_oracle[n]).abs() <= 1e-12 * alpha_oracle[n].max(1.0));
        }

        let polys_b: Vec<_> = (1..=p.active_b()).map(|l| build_poly_b(&p, l).unwrap()).collect();
        let mut unit = vec![0.0; beta.support() + 1];
        unit[1] = 1.0;
        let beta_oracle = enumerate(&polys_b, beta.support(), unit);
        for n in 1..=beta.support() {
            assert!((beta.get(n) - beta_oracle[n]).abs() <= 1e-12 * beta_oracle[n].max(1.0));
        }
    }

    #[test]
    fn alpha_degenerates_when_a_side_inactive() {
        // theta near the cap kills the A side (a_1 = 4 needs T0 >= 16);
        // alpha then reduces to the plain ones vector up to T. The B side
        // keeps b_1 = 2 active for any admissible T, theta.
        let p = build_params(&ratio(3, 2), 100.0, 0.44).unwrap();
        assert_eq!(p.active_a(), 0);
        assert!(p.active_b() >= 1);
        let (alpha, beta) = build_alpha_beta(&p, 1 << 20).unwrap();
        assert_eq!(alpha.support(), 100);
        for n in 1..=100 {
            assert_eq!(alpha.get(n), 1.0);
        }
        assert!(beta.support() as f64 <= p.t0());
        assert_eq!(beta.get(1), 1.0);
    }

    #[test]
    fn f_mass_identity_and_example() {
        // Total coefficient mass sum k^2/(a_j b_l) = k^2 (partial sums track
        // the exact remainders of both expansions).
        let p = params_k2();
        let k2 = 4.0;
        let mut mass = 0.0;
        for j in 0..=p.stored_terms() {
            for l in 1..=p.stored_terms() {
                mass += k2 / (p.exponent_a(j) * p.exponent_b(l));
            }
        }
        assert!((mass - k2).abs() < 1e-9, "mass={mass}");

        // Dominant term check at k=2, log T0 = 10, p = 2.
        let t = (10.0f64).exp();
        let pp = build_params(&ratio(2, 1), t, 1e-9).unwrap();
        let f2 = f_at_prime(&pp, 2);
        assert!(f2 > 8.2e-25 && f2 < 8.4e-25, "f(2)={f2:e}");
        // f(p) strictly positive and below k^2.
        for &q in &[2u64, 3, 5, 97] {
            let v = f_at_prime(&pp, q);
            assert!(v > 0.0 && v < 4.0);
        }
    }

    #[test]
    fn f_multiplicative_on_squarefree() {
        let p = params_k2();
        let primes = PrimeTable::sieve(1000);
        let f6 = f_squarefree(&p, 6, &primes).unwrap();
        let expect = f_at_prime(&p, 2) * f_at_prime(&p, 3);
        assert!((f6 - expect).abs() <= 1e-18 * expect.abs().max(1e-300));
        assert!(f_squarefree(&p, 4, &primes).is_err());
    }

    #[test]
    fn monotone_mass_in_active_polynomials() {
        // Adding an active polynomial (constant term 1, nonnegative) cannot
        // decrease sum alpha(n) beta(n)/n.
        let p_small = build_params(&ratio(3, 2), 2000.0, 0.42).unwrap();
        let p_big = build_params(&ratio(3, 2), 2000.0, 0.3).unwrap();
        assert!(p_big.active_b() > p_small.active_b());
        let sum_ab = |params: &ConstructionParams| {
            let (alpha, beta) = build_alpha_beta(params, 1 << 22).unwrap();
            let mut acc = KahanSum::new();
            for n in 1..=beta.support() {
                acc.add(alpha.get(n) * beta.get(n) / n as f64);
            }
            acc.value()
        };
        assert!(sum_ab(&p_big) >= sum_ab(&p_small) - 1e-12);
    }

    #[test]
    fn coefficient_csv_rows() {
        let v = CoefficientVector::new(vec![0.0, 1.0, 0.5, 0.0, 0.25], CoeffLabel::Unit);
        let mut buf = Vec::new();
        v.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "n,c\n1,1\n2,0.5\n4,0.25\n");
    }

    #[test]
    fn budget_guard() {
        let p = build_params(&ratio(3, 2), 5000.0, 0.3).unwrap();
        assert!(matches!(
            build_alpha_beta(&p, 64),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(build_params(&ratio(1, 1), 1000.0, 0.3).is_err());
        assert!(build_params(&ratio(3, 2), 50.0, 0.3).is_err());
        assert!(build_params(&ratio(3, 2), 1000.0, 0.5).is_err());
    }
}
