//! The lower-bound chain for the twisted moment, assembled link by link in
//! log space and audited against each inequality used to prove it:
//!
//!   sum alpha(n) beta(n)/n
//!     >= prod_{p<=T0} (1 + f(p)/p) - S prod_{p<=T0} (1 + k^2/p)      (squarefree step)
//!     >= prod_{p<=T0} (1 + k^2/p) (exp(-D) - S)                       (pointwise exp step)
//!   with D <= E + k^2 (gamma + slack),  E <= k^2 (6 + log 20k^3) <= 10 k^3,
//!   S = e^{-20k^3} + sum_l (e^{-20k^3 a_l} + e^{-20k^3 b_l}) <= 2 e^{-20k^3},
//!   exp(-E) - S >= e^{-12 k^3},
//!   prod (1 + k^2/p) >= e^{-2k^3} (log T)^{k^2} (1 - eps_T),
//! and the lemma-level statement I(T) >= e^{-15 k^3} T (log T)^{k^2}.

use crate::construction::{f_at_prime, ConstructionParams};
use crate::divisor::{mertens_prime_sum_with, PrimeTable, EULER_GAMMA, MERTENS_B1};
use crate::error::Result;
use crate::moments::Audit;
use crate::numerics::{logsubexp, logsumexp, KahanSum};

/// Finite-size slack added to the per-shift prime-deficit bound
/// 1 + log(alpha log x) + gamma (the o(1) of the asymptotic statement).
pub const DEFICIT_SLACK: f64 = 0.1;

#[derive(Debug, Clone, serde::Serialize)]
pub struct Lemma1Chain {
    /// log prod_{p<=T0} (1 + f(p)/p).
    pub log_euler_f: f64,
    /// log prod_{p<=T0} (1 + k^2/p).
    pub log_euler_k2: f64,
    /// `E = sum_{j,l} (k^2/(a_j b_l)) (log(W_A[j]+W_B[l]) + 1)`.
    pub exp_correction: f64,
    /// D = sum_{j,l} (k^2/(a_j b_l)) sum_{p<=T0} (1/p - p^{-1-alpha_j-beta_l}).
    pub prime_deficit_total: f64,
    /// log S, S = e^{-A_0} + sum_l (e^{-A_l/a_l} + e^{-B_l/b_l}).
    pub log_subtraction: f64,
    /// log(exp(-E) - S).
    pub log_main_minus_subtraction: f64,
    /// max_p f(p).
    pub f_max: f64,
    /// min over p of the pointwise comparison margin
    /// log(1+f/p) - log(1+k^2/p) - (f-k^2)/p.
    pub pointwise_min_margin: f64,
    /// Chain value: log [ T K̂(0) (1+f/p product - S k^2 product) ].
    pub log_chain_lower: f64,
    /// Mertens finite-size deficit max(0, loglog T - loglog T0 - B1).
    pub mertens_deficit: f64,
    pub audits: Vec<Audit>,
}

pub fn lemma1_lower(
    params: &ConstructionParams,
    khat0: f64,
    sum_alpha_beta: Option<f64>,
    diagonal_value: Option<f64>,
) -> Result<Lemma1Chain> {
    let k = params.k();
    let k2 = k * k;
    let k3 = k * k * k;
    let t = params.t();
    let t0 = params.t0();
    let primes = PrimeTable::sieve(t0.floor() as usize);

    // Euler products over p <= T0 in log space.
    let mut log_f_acc = KahanSum::new();
    let mut log_k2_acc = KahanSum::new();
    let mut f_max: f64 = 0.0;
    let mut pointwise_min = f64::INFINITY;
    for &p in primes.primes() {
        let pf = p as f64;
        let f = f_at_prime(params, p);
        f_max = f_max.max(f);
        log_f_acc.add((f / pf).ln_1p());
        let lk2 = (k2 / pf).ln_1p();
        log_k2_acc.add(lk2);
        // (1 + f/p) >= (1 + k^2/p) exp((f - k^2)/p)
        pointwise_min = pointwise_min.min((f / pf).ln_1p() - lk2 - (f - k2) / pf);
    }
    let log_euler_f = log_f_acc.value();
    let log_euler_k2 = log_k2_acc.value();

    // E and D over the (j, l) double sum, truncated at underflow.
    let stored = params.stored_terms();
    let mut e_acc = KahanSum::new();
    let mut d_acc = KahanSum::new();
    let log_t0 = params.log_t0();
    for j in 0..=stored {
        let a_j = params.exponent_a(j);
        if !a_j.is_finite() {
            break;
        }
        let mut row = 0.0;
        for l in 1..=stored {
            let b_l = params.exponent_b(l);
            if !b_l.is_finite() {
                break;
            }
            let coeff = k2 / (a_j * b_l);
            if coeff < 1e-300 {
                break;
            }
            let lw_sum = crate::numerics::logaddexp(params.ln_weight_a(j), params.ln_weight_b(l));
            let term = coeff * (lw_sum + 1.0);
            e_acc.add(term);
            row += term;
            // Deficit for this shift pair; huge shifts reduce to the full
            // Mertens sum.
            let shift = (params.ln_weight_a(j).exp() + params.ln_weight_b(l).exp()) / log_t0;
            let deficit = if shift.is_finite() {
                crate::divisor::prime_deficit_sum_with(&primes, t0, shift).sum
            } else {
                mertens_prime_sum_with(&primes, t0)
            };
            d_acc.add(coeff * deficit);
            if term < 1e-18 * e_acc.value() {
                break;
            }
        }
        if j > 0 && row < 1e-18 * e_acc.value() {
            break;
        }
    }
    let exp_correction = e_acc.value();
    let prime_deficit_total = d_acc.value();

    // S in log space: A_0 = 20k^3, A_l/a_l = 20 k^3 a_l, B_l/b_l = 20 k^3 b_l.
    let base = 20.0 * k3;
    let mut s_terms = vec![-base];
    for l in 1..=stored {
        let a_l = params.exponents().a.term_f64(l);
        let b_l = params.exponents().b.term_f64(l);
        s_terms.push(-base * a_l);
        s_terms.push(-base * b_l);
    }
    let log_subtraction = logsumexp(&s_terms);
    let log_main_minus_subtraction = logsubexp(-exp_correction, log_subtraction);

    // Chain value: T K̂(0) [prod(1+f/p) - S prod(1+k^2/p)] in log space.
    // prod(1+f/p) >= 1 and S prod(1+k^2/p) is microscopic at desk scale.
    let log_squarefree_lower = logsubexp(log_euler_f, log_subtraction + log_euler_k2);
    let log_chain_lower = t.ln() + khat0.ln() + log_squarefree_lower;

    let mertens_deficit =
        (t.ln().ln() - (params.log_t0().ln() + MERTENS_B1)).max(0.0);

    let mut audits = Vec::new();
    audits.push(Audit::le("f_le_k2", f_max, k2));
    audits.push(Audit::ge("pointwise_exp_compare_margin", pointwise_min, 0.0));
    if let Some(sum_ab) = sum_alpha_beta {
        audits.push(Audit::log_ge(
            "alpha_beta_sum_ge_squarefree_bound",
            sum_ab.ln(),
            log_squarefree_lower,
        ));
    }
    // Squarefree product step vs the pointwise-exponential step.
    let log_eq44_lower = log_euler_k2 + logsubexp(-prime_deficit_total, log_subtraction);
    audits.push(Audit::log_ge(
        "squarefree_ge_exp_step",
        log_squarefree_lower,
        log_eq44_lower - 1e-12,
    ));
    audits.push(Audit::le(
        "deficit_le_weighted_log_bound",
        prime_deficit_total,
        exp_correction + k2 * (EULER_GAMMA + DEFICIT_SLACK),
    ));
    let analytic_e_bound = k2 * (6.0 + (20.0 * k3).ln());
    audits.push(Audit::le(
        "double_sum_le_analytic",
        exp_correction,
        analytic_e_bound,
    ));
    audits.push(Audit::le("analytic_le_10k3", analytic_e_bound, 10.0 * k3));
    audits.push(Audit::log_le(
        "subtraction_le_2_exp_20k3",
        log_subtraction,
        std::f64::consts::LN_2 - 20.0 * k3,
    ));
    audits.push(Audit::log_ge(
        "main_minus_subtraction_ge_12k3",
        log_main_minus_subtraction,
        -12.0 * k3,
    ));
    // prod(1+k^2/p) >= e^{-2k^3} (log T)^{k^2} (1 - eps_T), with the epsilon
    // read off the Mertens remainder at T0.
    audits.push(Audit::log_ge(
        "mertens_product_step",
        log_euler_k2,
        -2.0 * k3 + k2 * t.ln().ln() - k2 * mertens_deficit,
    ));
    if let Some(diag) = diagonal_value {
        audits.push(Audit::log_ge(
            "lemma_lower_bound_numeric",
            diag.ln(),
            -15.0 * k3 + t.ln() + k2 * t.ln().ln(),
        ));
    }

    Ok(Lemma1Chain {
        log_euler_f,
        log_euler_k2,
        exp_correction,
        prime_deficit_total,
        log_subtraction,
        log_main_minus_subtraction,
        f_max,
        pointwise_min_margin: pointwise_min,
        log_chain_lower,
        mertens_deficit,
        audits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_alpha_beta, build_params};
    use crate::kernel::Kernel;
    use crate::moments::diagonal_i;
    use crate::sylvester::{parse_rational, ratio};

    #[test]
    fn chain_audits_pass_across_k() {
        for ks in ["1.1", "1.5", "2", "3", "5"] {
            let k = parse_rational(ks).unwrap();
            let params = build_params(&k, 10_000.0, 0.3).unwrap();
            let kernel = Kernel::from_theta(0.3).unwrap();
            let chain = lemma1_lower(&params, kernel.integral(), None, None).unwrap();
            for a in &chain.audits {
                assert!(a.pass, "k={ks}: audit {} failed ({} vs {})", a.name, a.lhs, a.rhs);
            }
            assert!(chain.log_subtraction.is_finite());
            assert!(chain.log_main_minus_subtraction.is_finite());
            assert!(chain.log_chain_lower.is_finite());
        }
    }

    #[test]
    fn full_chain_with_alpha_beta() {
        let params = build_params(&ratio(3, 2), 5000.0, 0.3).unwrap();
        let kernel = Kernel::from_theta(0.3).unwrap();
        let (alpha, beta) = build_alpha_beta(&params, 1 << 22).unwrap();
        let model = diagonal_i(&params, &kernel, &alpha, &beta).unwrap();
        let chain = lemma1_lower(
            &params,
            kernel.integral(),
            Some(model.sum_alpha_beta),
            Some(model.value),
        )
        .unwrap();
        for a in &chain.audits {
            assert!(a.pass, "audit {} failed ({} vs {})", a.name, a.lhs, a.rhs);
        }
        // The chain lower value is a genuine lower bound for the diagonal.
        assert!(model.value.ln() >= chain.log_chain_lower);
    }

    #[test]
    fn log_space_survives_k6() {
        let params = build_params(&ratio(6, 1), 10_000.0, 0.3).unwrap();
        let chain = lemma1_lower(&params, 0.2, None, None).unwrap();
        // e^{-20 k^3} = e^{-4320}: underflows linearly, finite in log space.
        assert!(chain.log_subtraction < -4000.0);
        assert!(chain.log_subtraction.is_finite());
        assert!(chain.log_chain_lower.is_finite());
        for a in &chain.audits {
            assert!(a.slack_log.is_finite());
        }
    }
}
