//! One full verification run assembled into a serializable report.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::construction::{build_alpha_beta, build_params, ConstructionParams, DEFAULT_COEFF_BUDGET};
use crate::error::Result;
use crate::kernel::Kernel;
use crate::moments::diagonal::diagonal_i;
use crate::moments::holder::holder_chain;
use crate::moments::integrals::{compute_i, moment_mk};
use crate::moments::lemma1::lemma1_lower;
use crate::moments::lemma2::lemma2_all_active;
use crate::moments::squarefree::squarefree_lower_check;
use crate::moments::theorem::theorem_bound;
use crate::moments::{Audit, HolderCheck, Lemma1Chain, Lemma2Link, SquarefreeCheck, TheoremAudit};

/// Pipeline knobs; every run embeds them for reproducibility.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub step: f64,
    pub coeff_budget: usize,
    pub squarefree_samples: usize,
    pub seed: u64,
    /// Skip the M_k quadrature (the most expensive stage) when only the
    /// construction-level audits are wanted.
    pub with_moment: bool,
    pub with_lemma2_numeric: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            step: 0.01,
            coeff_budget: DEFAULT_COEFF_BUDGET,
            squarefree_samples: 2000,
            seed: 0x5eed,
            with_moment: true,
            with_lemma2_numeric: true,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct KernelSummary {
    pub theta: f64,
    pub paper_faithful: bool,
    pub khat0: f64,
    pub decay_c2: f64,
    pub decay_c4: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct GridSummary {
    pub step: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

/// Results of one verification run. Field names are the stable JSON schema.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MomentReport {
    pub run_config: BTreeMap<String, String>,
    pub k: String,
    pub t: f64,
    pub theta: f64,
    pub t0: f64,
    pub active_a: usize,
    pub active_b: usize,
    pub kernel: KernelSummary,
    pub grid: GridSummary,
    pub m_k_numeric: Option<f64>,
    pub m_k_err: Option<f64>,
    pub i_re: f64,
    pub i_im: f64,
    pub i_quad_err: f64,
    pub i_eval_err: f64,
    pub i_trunc_diff_re: f64,
    pub i_trunc_diff_im: f64,
    pub i_diagonal: f64,
    pub sum_alpha_beta: f64,
    pub offdiag_bound: f64,
    pub trunc_budget: f64,
    pub lemma2: Vec<Lemma2Link>,
    pub lemma1: Lemma1Chain,
    pub squarefree: SquarefreeCheck,
    pub holder: HolderCheck,
    pub theorem: TheoremAudit,
    pub audits: Vec<Audit>,
    pub tolerances: BTreeMap<String, f64>,
    pub all_pass: bool,
}

impl MomentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn write_audit_csv<W: std::io::Write>(&self, w: W) -> std::io::Result<()> {
        super::write_audit_csv(&self.audits, w)
    }
}

/// Run the full pipeline at (k, T, theta).
pub fn run_verification(
    k: &BigRational,
    t: f64,
    theta: f64,
    opts: &VerifyOptions,
) -> Result<MomentReport> {
    let params = build_params(k, t, theta)?;
    let kernel = Kernel::from_theta(theta)?;
    run_verification_with(&params, &kernel, opts)
}

pub fn run_verification_with(
    params: &ConstructionParams,
    kernel: &Kernel,
    opts: &VerifyOptions,
) -> Result<MomentReport> {
    let t = params.t();
    let k = params.k();

    let khat0 = kernel.fourier(0.0)?.re;
    let kernel_summary = KernelSummary {
        theta: kernel.theta(),
        paper_faithful: kernel.spec().paper_faithful(),
        khat0,
        decay_c2: kernel.decay_constant(2)?,
        decay_c4: kernel.decay_constant(4)?,
    };

    // Construction-level objects.
    let (alpha, beta) = build_alpha_beta(params, opts.coeff_budget)?;
    let model = diagonal_i(params, kernel, &alpha, &beta)?;

    // Quadratures.
    let i_quad = compute_i(params, kernel, opts.step)?;
    let m_k = if opts.with_moment {
        Some(moment_mk(k, t, opts.step)?)
    } else {
        None
    };

    // Chains.
    let lemma2 = if opts.with_lemma2_numeric {
        lemma2_all_active(params, kernel, opts.step)?
    } else {
        Vec::new()
    };
    let lemma1 = lemma1_lower(params, khat0, Some(model.sum_alpha_beta), Some(model.value))?;
    let squarefree = squarefree_lower_check(params, opts.squarefree_samples, opts.seed)?;
    let holder = holder_chain(params, kernel, opts.step)?;
    let log_moment = m_k
        .as_ref()
        .map(|m| m.value.ln())
        .unwrap_or(f64::INFINITY);
    let theorem = theorem_bound(params, log_moment, i_quad.norm().ln());

    // Collected audit rows.
    let mut audits = Vec::new();
    // Diagonal model: |I - diagonal| within off-diagonal + quadrature +
    // audited truncation budget; imaginary part within the same budget.
    let budget = model.offdiag_bound + i_quad.quad_err + i_quad.eval_err + model.trunc_budget;
    audits.push(Audit::le(
        "diagonal_model_gap",
        (i_quad.value() - model.value).norm(),
        budget,
    ));
    audits.push(Audit::le("imaginary_part_small", i_quad.im.abs(), budget));
    // The two I variants (true zeta vs truncated sum) agree within the
    // audited swap budget.
    audits.push(Audit::le(
        "zeta_vs_truncated_variant",
        (i_quad.trunc_diff_re.powi(2) + i_quad.trunc_diff_im.powi(2)).sqrt(),
        model.trunc_budget,
    ));
    audits.push(Audit::ge(
        "diagonal_at_least_kernel_mass",
        model.value,
        t * khat0 - 1e-9,
    ));
    for link in &lemma2 {
        let name = format!(
            "lemma2_{}_{}",
            match link.side {
                super::PolySide::A => "a",
                super::PolySide::B => "b",
            },
            link.exponent
        );
        if let (Some(v), Some(e)) = (link.numeric, link.numeric_err) {
            audits.push(Audit::le(
                format!("{name}_numeric_le_diagonal"),
                v,
                link.diagonal + link.offdiag_bound + e,
            ));
        }
        audits.push(Audit::le(
            format!("{name}_diagonal_le_cap"),
            link.diagonal + link.offdiag_bound,
            link.cap,
        ));
        audits.push(Audit::le(
            format!("{name}_diagonal_le_divisor"),
            link.diagonal,
            link.divisor_bound,
        ));
        audits.push(Audit::le(
            format!("{name}_divisor_le_cap"),
            link.divisor_bound,
            link.cap,
        ));
    }
    audits.extend(lemma1.audits.iter().cloned());
    audits.push(Audit::le(
        "squarefree_product_identity",
        squarefree.product_identity_rel_gap,
        1e-12,
    ));
    audits.push(Audit {
        name: "squarefree_device_below_one".into(),
        lhs: squarefree.all_below_one as u8 as f64,
        rhs: 1.0,
        pass: squarefree.all_below_one,
        slack_log: 0.0,
    });
    audits.push(Audit {
        name: "squarefree_device_negative_when_violated".into(),
        lhs: squarefree.violated_below_zero as u8 as f64,
        rhs: 1.0,
        pass: squarefree.violated_below_zero,
        slack_log: 0.0,
    });
    audits.push(Audit::log_le(
        "holder_inequality",
        holder.lhs_log,
        holder.rhs_log + holder.tol_log + 1e-9,
    ));
    audits.push(Audit::le(
        "holder_exponent_bookkeeping",
        holder.exponent_mass_gap,
        1e-12,
    ));
    if opts.with_moment {
        audits.extend(theorem.audits.iter().cloned());
    }

    // Every finite-size slack pinned by this run.
    let tolerances = BTreeMap::from([
        ("lemma2_cap_slack".to_string(), 1e-3),
        ("identity_rel_tol".to_string(), 1e-6),
        ("trunc_epsilon".to_string(), 0.1),
        (
            "deficit_slack".to_string(),
            crate::moments::lemma1::DEFICIT_SLACK,
        ),
        ("holder_extra_tol".to_string(), 1e-9),
        ("exponent_mass_tol".to_string(), 1e-12),
        ("squarefree_identity_tol".to_string(), 1e-12),
        (
            "truncation_audit_c".to_string(),
            crate::zeta::TRUNCATION_AUDIT_C,
        ),
    ]);

    let all_pass = audits.iter().all(|a| a.pass) && lemma2.iter().all(|l| l.pass);

    let run_config = BTreeMap::from([
        ("k".to_string(), params.k_rational().to_string()),
        ("t".to_string(), format!("{t}")),
        ("theta".to_string(), format!("{}", params.theta())),
        ("step".to_string(), format!("{}", opts.step)),
        ("coeff_budget".to_string(), format!("{}", opts.coeff_budget)),
        (
            "squarefree_samples".to_string(),
            format!("{}", opts.squarefree_samples),
        ),
        ("seed".to_string(), format!("{}", opts.seed)),
        ("with_moment".to_string(), format!("{}", opts.with_moment)),
        (
            "with_lemma2_numeric".to_string(),
            format!("{}", opts.with_lemma2_numeric),
        ),
        (
            "paper_theta_note".to_string(),
            if kernel.spec().paper_faithful() {
                "theta < 1/10 (paper-faithful regime)".to_string()
            } else {
                "desk-scale theta (paper default is 1/100)".to_string()
            },
        ),
    ]);

    Ok(MomentReport {
        run_config,
        k: params.k_rational().to_string(),
        t,
        theta: params.theta(),
        t0: params.t0(),
        active_a: params.active_a(),
        active_b: params.active_b(),
        kernel: kernel_summary,
        grid: GridSummary {
            step: opts.step,
            t_lo: kernel.theta() * t,
            t_hi: (1.0 - kernel.theta()) * t,
        },
        m_k_numeric: m_k.as_ref().map(|m| m.value),
        m_k_err: m_k.as_ref().map(|m| m.err),
        i_re: i_quad.re,
        i_im: i_quad.im,
        i_quad_err: i_quad.quad_err,
        i_eval_err: i_quad.eval_err,
        i_trunc_diff_re: i_quad.trunc_diff_re,
        i_trunc_diff_im: i_quad.trunc_diff_im,
        i_diagonal: model.value,
        sum_alpha_beta: model.sum_alpha_beta,
        offdiag_bound: model.offdiag_bound,
        trunc_budget: model.trunc_budget,
        lemma2,
        lemma1,
        squarefree,
        holder,
        theorem,
        audits,
        tolerances,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sylvester::ratio;

    #[test]
    fn small_run_passes_and_serializes() {
        let opts = VerifyOptions {
            step: 0.02,
            squarefree_samples: 300,
            ..Default::default()
        };
        let report = run_verification(&ratio(3, 2), 600.0, 0.3, &opts).unwrap();
        for a in &report.audits {
            assert!(a.pass, "audit {} failed: lhs={} rhs={}", a.name, a.lhs, a.rhs);
        }
        assert!(report.all_pass);
        let json = report.to_json();
        assert!(json.contains("\"all_pass\": true"));
        let mut csv = Vec::new();
        report.write_audit_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("name,lhs,rhs,pass,slack_log"));
        assert!(text.lines().count() > 10);
    }

    #[test]
    fn deterministic_output() {
        let opts = VerifyOptions {
            step: 0.02,
            with_moment: false,
            with_lemma2_numeric: false,
            squarefree_samples: 100,
            ..Default::default()
        };
        let a = run_verification(&ratio(3, 2), 500.0, 0.3, &opts).unwrap();
        let b = run_verification(&ratio(3, 2), 500.0, 0.3, &opts).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
