//! The Hoelder factorization of the twisted moment:
//!
//!   |I(T)| <= (int K |zeta|^{2k})^{1/2k}
//!             * prod_l (int K |A_l|^{2a_l})^{1/2a_l} (int K |B_l|^{2b_l})^{1/2b_l},
//!
//! with the inactive factors collapsing to powers of T K̂(0) whose exponent
//! mass is the exact rational remainder of the two expansions.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::construction::{build_poly_a, build_poly_b, ConstructionParams};
use crate::error::Result;
use crate::kernel::Kernel;
use crate::moments::integrals::{
    compute_i, weighted_power_integral_log, weighted_zeta_power_integral_log, PolyEvaluator,
};
use crate::numerics::KahanSum;

#[derive(Debug, Clone, serde::Serialize)]
pub struct HolderCheck {
    /// log |I|.
    pub lhs_log: f64,
    /// log of the Hoelder product.
    pub rhs_log: f64,
    /// log-space slack rhs - lhs (nonnegative iff the inequality holds).
    pub slack_log: f64,
    /// Combined quadrature tolerance in log space.
    pub tol_log: f64,
    pub pass: bool,
    /// 1/2k + active exponent mass + inactive remainder mass (must be 1).
    pub exponent_mass_gap: f64,
    pub zeta_factor_log: f64,
    pub poly_factor_logs: Vec<(String, f64)>,
    pub inactive_exponent_mass: f64,
}

pub fn holder_chain(
    params: &ConstructionParams,
    kernel: &Kernel,
    step: f64,
) -> Result<HolderCheck> {
    let t = params.t();
    let k = params.k();
    let i_quad = compute_i(params, kernel, step)?;
    let lhs_log = i_quad.norm().ln();

    let (j_zeta_log, j_zeta_err) = weighted_zeta_power_integral_log(kernel, t, 2.0 * k, step)?;
    let mut rhs_log = KahanSum::new();
    let mut tol_log = j_zeta_err / (2.0 * k);
    rhs_log.add(j_zeta_log / (2.0 * k));

    let mut poly_factor_logs = Vec::new();
    for l in 1..=params.active_a() {
        let a_l = params.exponent_a(l);
        let poly = PolyEvaluator::new(&build_poly_a(params, l)?);
        let (log_j, err) = weighted_power_integral_log(kernel, t, &poly, 2.0 * a_l, step);
        rhs_log.add(log_j / (2.0 * a_l));
        tol_log += err / (2.0 * a_l);
        poly_factor_logs.push((format!("A{l}^{}", 2.0 * a_l), log_j));
    }
    for l in 1..=params.active_b() {
        let b_l = params.exponent_b(l);
        let poly = PolyEvaluator::new(&build_poly_b(params, l)?);
        let (log_j, err) = weighted_power_integral_log(kernel, t, &poly, 2.0 * b_l, step);
        rhs_log.add(log_j / (2.0 * b_l));
        tol_log += err / (2.0 * b_l);
        poly_factor_logs.push((format!("B{l}^{}", 2.0 * b_l), log_j));
    }

    // Inactive factors: each contributes (T K̂(0))^{1/2a_l} or ^{1/2b_l};
    // the total exponent is half the sum of the exact remainders.
    let exponents = params.exponents();
    let rem_a = if params.active_a() == 0 {
        BigRational::one() - params.k_rational().recip()
    } else {
        exponents.a.remainder(params.active_a()).clone()
    };
    let rem_b = if params.active_b() == 0 {
        BigRational::one()
    } else {
        exponents.b.remainder(params.active_b()).clone()
    };
    let inactive_mass = (rem_a.to_f64().unwrap() + rem_b.to_f64().unwrap()) / 2.0;
    let khat0 = kernel.fourier(0.0)?.re;
    rhs_log.add(inactive_mass * (t * khat0).ln());

    // Exponent bookkeeping: 1/2k + sum_active (1/2a + 1/2b) + inactive = 1.
    let mut mass = 1.0 / (2.0 * k) + inactive_mass;
    for l in 1..=params.active_a() {
        mass += 1.0 / (2.0 * params.exponent_a(l));
    }
    for l in 1..=params.active_b() {
        mass += 1.0 / (2.0 * params.exponent_b(l));
    }
    let exponent_mass_gap = (mass - 1.0).abs();

    let rhs_log = rhs_log.value();
    // Quadrature tolerance on the I side as relative error.
    tol_log += (i_quad.quad_err + i_quad.eval_err) / i_quad.norm().max(1e-300);
    let pass = lhs_log <= rhs_log + tol_log + 1e-9;
    Ok(HolderCheck {
        lhs_log,
        rhs_log,
        slack_log: rhs_log - lhs_log,
        tol_log,
        pass,
        exponent_mass_gap,
        zeta_factor_log: j_zeta_log,
        poly_factor_logs,
        inactive_exponent_mass: inactive_mass,
    })
}
