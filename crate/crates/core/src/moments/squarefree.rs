//! The squarefree restriction device: the multiplicative identity behind the
//! product expansion and the pointwise inequality driving the lower bound.
//!
//! For tuples (m_0, m_l, n_l) the quantity
//!   m_0^{-alpha_0} prod_l m_l^{-alpha_l} n_l^{-beta_l} - e^{-A_0}
//!     - sum_l (e^{-A_l/a_l} + e^{-B_l/b_l})
//! is always < 1, and < 0 as soon as m_0 > T or any factor exceeds its
//! cutoff: the power drops below the matching subtracted exponential.

use crate::construction::{f_at_prime, ConstructionParams};
use crate::divisor::PrimeTable;
use crate::error::Result;
use crate::numerics::{logsumexp, KahanSum};

#[derive(Debug, Clone, serde::Serialize)]
pub struct SquarefreeCheck {
    /// Relative gap of sum_{n squarefree} f(n)/n vs prod (1 + f(p)/p) on the
    /// small exact prime set.
    pub product_identity_rel_gap: f64,
    pub tuples_checked: usize,
    pub violated_tuples: usize,
    /// Every tuple satisfied device < 1 (strictly, via S > 0).
    pub all_below_one: bool,
    /// Every cutoff-violating tuple satisfied device < 0.
    pub violated_below_zero: bool,
}

pub fn squarefree_lower_check(
    params: &ConstructionParams,
    sample_budget: usize,
    seed: u64,
) -> Result<SquarefreeCheck> {
    // (a) Exact product identity on a small prime set: sum over squarefree n
    // composed of those primes of f(n)/n equals prod (1 + f(p)/p).
    let small: Vec<u64> = [2u64, 3, 5, 7]
        .iter()
        .copied()
        .filter(|&p| (p as f64) <= params.t0())
        .collect();
    let fs: Vec<f64> = small.iter().map(|&p| f_at_prime(params, p)).collect();
    let mut direct = KahanSum::new();
    for mask in 0..(1usize << small.len()) {
        let mut n = 1.0;
        let mut fv = 1.0;
        for (i, (&p, &f)) in small.iter().zip(&fs).enumerate() {
            if mask & (1 << i) != 0 {
                n *= p as f64;
                fv *= f;
            }
        }
        direct.add(fv / n);
    }
    let product: f64 = small
        .iter()
        .zip(&fs)
        .map(|(&p, &f)| 1.0 + f / p as f64)
        .product();
    let product_identity_rel_gap = (direct.value() - product).abs() / product;

    // (b) Random factorization tuples in log space.
    let k3 = params.k().powi(3);
    let base = 20.0 * k3;
    let stored = params.stored_terms();
    let mut s_terms = vec![-base];
    for l in 1..=stored {
        s_terms.push(-base * params.exponents().a.term_f64(l));
        s_terms.push(-base * params.exponents().b.term_f64(l));
    }
    let log_s = logsumexp(&s_terms);

    let active = params.active_a().max(params.active_b()).max(1);
    let mut state = seed | 1;
    let mut rand = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };

    let mut all_below_one = true;
    let mut violated_below_zero = true;
    let mut violated = 0usize;
    for _ in 0..sample_budget {
        // m_0 log-uniform on [1, 2T]; polynomial factors on [1, 2 cutoff].
        let m0 = (1.0 + rand() * (2.0 * params.t() - 1.0)).floor();
        let mut log_power = -params.shift_alpha(0) * m0.ln();
        let mut is_violated = m0 > params.t();
        for l in 1..=active {
            let cut_a = params.t0().powf(1.0 / params.exponent_a(l));
            let cut_b = params.t0().powf(1.0 / params.exponent_b(l));
            let m_l = (1.0 + rand() * (2.0 * cut_a).max(2.0)).floor();
            let n_l = (1.0 + rand() * (2.0 * cut_b).max(2.0)).floor();
            log_power += -params.shift_alpha(l) * m_l.ln() - params.shift_beta(l) * n_l.ln();
            is_violated |= m_l > cut_a || n_l > cut_b;
        }
        // device < 1 strictly: the power part never exceeds 1 and the
        // subtracted total is strictly positive (finite log).
        if !(log_power <= 0.0 && log_s.is_finite()) {
            all_below_one = false;
        }
        if is_violated {
            violated += 1;
            // device < 0 iff log power < log S.
            if !(log_power < log_s) {
                violated_below_zero = false;
            }
        }
    }

    Ok(SquarefreeCheck {
        product_identity_rel_gap,
        tuples_checked: sample_budget,
        violated_tuples: violated,
        all_below_one,
        violated_below_zero,
    })
}

/// Direct-versus-product identity over an exact squarefree enumeration,
/// exposed for the two-prime unit example.
pub fn product_identity_gap(params: &ConstructionParams, prime_cap: u64) -> Result<f64> {
    let primes = PrimeTable::sieve(prime_cap.min(params.t0() as u64) as usize);
    let ps: Vec<u64> = primes.primes().to_vec();
    let fs: Vec<f64> = ps.iter().map(|&p| f_at_prime(params, p)).collect();
    let mut direct = KahanSum::new();
    for mask in 0..(1usize << ps.len().min(20)) {
        let mut n = 1.0;
        let mut fv = 1.0;
        for i in 0..ps.len().min(20) {
            if mask & (1 << i) != 0 {
                n *= ps[i] as f64;
                fv *= fs[i];
            }
        }
        direct.add(fv / n);
    }
    let product: f64 = ps
        .iter()
        .zip(&fs)
        .map(|(&p, &f)| 1.0 + f / p as f64)
        .product();
    Ok((direct.value() - product).abs() / product)
}
