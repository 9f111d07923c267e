//! The final inequality pair, evaluated in log space:
//!
//!   M_k(T) >= I(T)^{2k} / (T (log T)^{k^2})^{2k-1} >= e^{-30 k^4} T (log T)^{k^2}.

use crate::construction::ConstructionParams;
use crate::moments::Audit;

#[derive(Debug, Clone, serde::Serialize)]
pub struct TheoremAudit {
    /// log M_k(T) from quadrature.
    pub log_moment: f64,
    /// log of I^{2k} / (T (log T)^{k^2})^{2k-1}.
    pub log_holder_power: f64,
    /// log of e^{-30 k^4} T (log T)^{k^2}.
    pub log_theorem_rhs: f64,
    pub audits: Vec<Audit>,
}

pub fn theorem_bound(params: &ConstructionParams, log_moment: f64, log_i_norm: f64) -> TheoremAudit {
    let k = params.k();
    let t = params.t();
    let k2 = k * k;
    let x = t.ln() + k2 * t.ln().ln(); // log(T (log T)^{k^2})
    let log_holder_power = 2.0 * k * log_i_norm - (2.0 * k - 1.0) * x;
    let log_theorem_rhs = -30.0 * k2 * k2 + x;

    let mut audits = vec![
        Audit::log_ge("moment_ge_holder_power", log_moment, log_holder_power),
        Audit::log_ge("holder_power_ge_theorem_rhs", log_holder_power, log_theorem_rhs),
        Audit::log_ge("theorem_full", log_moment, log_theorem_rhs),
    ];
    // The theorem constant decreases in k at fixed T:
    // d/dk (-30 k^4 + k^2 loglog T) < 0 on a k grid.
    let lld = t.ln().ln();
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for i in 0..40 {
        let kk = 1.05 + 0.15 * i as f64;
        let v = -30.0 * kk.powi(4) + kk * kk * lld;
        if v >= prev {
            monotone = false;
        }
        prev = v;
    }
    audits.push(Audit {
        name: "theorem_rhs_monotone_decreasing_in_k".into(),
        lhs: if monotone { 1.0 } else { 0.0 },
        rhs: 1.0,
        pass: monotone,
        slack_log: 0.0,
    });
    TheoremAudit {
        log_moment,
        log_holder_power,
        log_theorem_rhs,
        audits,
    }
}
