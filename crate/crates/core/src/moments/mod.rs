//! The verification lab: numerical moment integrals, the exact mean-square
//! identity, the diagonal model for the twisted first moment, both lemma
//! chains, the Hoelder factorization and the final theorem inequality, all
//! with explicit audited constants and log-space bound arithmetic.

mod diagonal;
mod holder;
mod identity;
mod integrals;
pub(crate) mod lemma1;
mod lemma2;
mod report;
mod squarefree;
mod theorem;

pub use diagonal::{diagonal_i, offdiag_pair_bound, DecayEnvelope, DiagonalModel};
pub use holder::{holder_chain, HolderCheck};
pub use identity::{mean_square_identity, FourierCache, IdentityCheck};
pub use integrals::{compute_i, moment_mk, moment_mk_multi, ComplexQuadrature, PolyEvaluator, QuadratureResult};
pub use lemma1::{lemma1_lower, Lemma1Chain};
pub use lemma2::{lemma2_bound, lemma2_all_active, Lemma2Link, PolySide};
pub use report::{run_verification, MomentReport, VerifyOptions};
pub use squarefree::{product_identity_gap, squarefree_lower_check, SquarefreeCheck};
pub use theorem::{theorem_bound, TheoremAudit};

/// One named inequality check. `slack_log` is the signed log-space margin in
/// the pass direction (nonnegative iff the inequality holds).
#[derive(Debug, Clone, serde::Serialize)]
pub struct Audit {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub slack_log: f64,
}

impl Audit {
    /// lhs >= rhs where both sides are plain values.
    pub fn ge(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let pass = lhs >= rhs;
        let slack_log = signed_log_margin(lhs, rhs);
        Audit {
            name: name.into(),
            lhs,
            rhs,
            pass,
            slack_log,
        }
    }

    /// lhs <= rhs where both sides are plain values.
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let pass = lhs <= rhs;
        let slack_log = signed_log_margin(rhs, lhs);
        Audit {
            name: name.into(),
            lhs,
            rhs,
            pass,
            slack_log,
        }
    }

    /// lhs >= rhs where both sides are already natural logs.
    pub fn log_ge(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Audit {
            name: name.into(),
            lhs,
            rhs,
            pass: lhs >= rhs,
            slack_log: lhs - rhs,
        }
    }

    /// lhs <= rhs in log space.
    pub fn log_le(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Audit {
            name: name.into(),
            lhs,
            rhs,
            pass: lhs <= rhs,
            slack_log: rhs - lhs,
        }
    }
}

fn signed_log_margin(hi: f64, lo: f64) -> f64 {
    if hi > 0.0 && lo > 0.0 {
        hi.ln() - lo.ln()
    } else {
        hi - lo
    }
}

/// Write audits as CSV rows: name, lhs, rhs, pass, slack_log.
pub fn write_audit_csv<W: std::io::Write>(audits: &[Audit], mut w: W) -> std::io::Result<()> {
    writeln!(w, "name,lhs,rhs,pass,slack_log")?;
    for a in audits {
        writeln!(
            w,
            "{},{:.17e},{:.17e},{},{:.17e}",
            a.name, a.lhs, a.rhs, a.pass, a.slack_log
        )?;
    }
    Ok(())
}
