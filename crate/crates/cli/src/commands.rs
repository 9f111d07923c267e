use std::io::Write;
use std::path::PathBuf;

use num_rational::BigRational;
use zeta_moments::construction::{build_alpha_beta, build_params, summarize, DEFAULT_COEFF_BUDGET};
use zeta_moments::divisor::{sieve_divisor, DivisorTable};
use zeta_moments::families;
use zeta_moments::kernel::Kernel;
use zeta_moments::moments::{
    self, compute_i, diagonal_i, lemma2_all_active, moment_mk, run_verification, theorem_bound,
    Audit, VerifyOptions,
};
use zeta_moments::sylvester::{parse_rational, sylvester};
use zeta_moments::zeta::zeta_half_grid;
use zeta_moments::{Error, Result};

use crate::config::{or_default, require, ConfigMap};
use crate::{Cli, Command};

fn parse_k(s: &str) -> Result<BigRational> {
    let k = parse_rational(s)?;
    Ok(k)
}

fn cache_dir(cli: &Cli, cfg: &ConfigMap) -> Option<PathBuf> {
    cli.cache_dir
        .clone()
        .or_else(|| cfg.get("cache-dir").map(PathBuf::from))
        .or_else(|| std::env::var_os("ZETA_MOMENTS_CACHE").map(PathBuf::from))
}

fn out_writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn print_audits(audits: &[Audit]) -> bool {
    let mut all = true;
    for a in audits {
        println!(
            "{:<44} lhs={:<24.16e} rhs={:<24.16e} {}",
            a.name,
            a.lhs,
            a.rhs,
            if a.pass { "pass" } else { "FAIL" }
        );
        all &= a.pass;
    }
    all
}

pub fn dispatch(cli: &Cli, cfg: &ConfigMap) -> Result<bool> {
    match &cli.command {
        Command::Sylvester { alpha, count } => {
            let alpha_str: String = require(alpha, cfg, "alpha")?;
            let count = or_default(count, cfg, "count", 12usize);
            let alpha = parse_rational(&alpha_str)?;
            let seq = sylvester(&alpha, count)?;
            println!("n,term,remainder");
            for n in 1..=seq.len() {
                println!("{n},{},{}", seq.term(n), seq.remainder(n));
            }
            Ok(true)
        }
        Command::Divisor {
            k,
            limit,
            cache,
            out,
        } => {
            let k_str: String = require(k, cfg, "k")?;
            let limit = require(limit, cfg, "limit")?;
            let k_rat = parse_k(&k_str)?;
            let k_f64 = rational_to_f64(&k_rat)?;
            let table = if *cache {
                let dir = cache_dir(cli, cfg).ok_or_else(|| {
                    Error::invalid("--cache needs --cache-dir or ZETA_MOMENTS_CACHE")
                })?;
                std::fs::create_dir_all(&dir)?;
                let path = dir.join(format!("dk_{k_str}_{limit}.dktb").replace('/', "_"));
                match DivisorTable::read_cache(&path) {
                    Ok(t) if t.k() == k_f64 && t.limit() == limit => t,
                    _ => {
                        let t = sieve_divisor(k_f64, limit)?;
                        t.write_cache(&path)?;
                        t
                    }
                }
            } else {
                sieve_divisor(k_f64, limit)?
            };
            match out {
                Some(path) => {
                    let mut w = std::fs::File::create(path)?;
                    writeln!(w, "n,c")?;
                    for n in 1..=table.limit() {
                        writeln!(w, "{n},{}", table.value(n))?;
                    }
                }
                None => {
                    println!(
                        "d_{k_str}(n) sieved to {limit}; diagonal sum = {:.12}",
                        table.diagonal_sum()
                    );
                }
            }
            Ok(true)
        }
        Command::Zeta {
            t_start,
            t_end,
            step,
            out,
        } => {
            let t0 = require(t_start, cfg, "t-start")?;
            let t1 = require(t_end, cfg, "t-end")?;
            let step = or_default(step, cfg, "step", 1.0);
            if !(step > 0.0 && t1 >= t0) {
                return Err(Error::invalid("need t-end >= t-start and step > 0"));
            }
            let n = ((t1 - t0) / step).floor() as usize + 1;
            let grid = zeta_half_grid(t0, step, n)?;
            let mut w = out_writer(out)?;
            writeln!(w, "t,re,im,abs,method,err")?;
            for zv in grid {
                writeln!(
                    w,
                    "{},{:.15e},{:.15e},{:.15e},{},{:.3e}",
                    zv.t,
                    zv.value.re,
                    zv.value.im,
                    zv.value.norm(),
                    zv.method,
                    zv.err
                )?;
            }
            Ok(true)
        }
        Command::Construct { k, t, theta, json } => {
            let k = parse_k(&require(k, cfg, "k")?)?;
            let t = require(t, cfg, "t")?;
            let theta = or_default(theta, cfg, "theta", 0.3);
            let params = build_params(&k, t, theta)?;
            let summary = summarize(&params, DEFAULT_COEFF_BUDGET)?;
            let text = serde_json::to_string_pretty(&summary).expect("summary json");
            match json {
                Some(path) => std::fs::write(path, text)?,
                None => println!("{text}"),
            }
            Ok(true)
        }
        Command::VerifyLemma2 { k, t, theta, step } => {
            let k = parse_k(&require(k, cfg, "k")?)?;
            let t = require(t, cfg, "t")?;
            let theta = or_default(theta, cfg, "theta", 0.3);
            let step = or_default(step, cfg, "step", 0.01);
            let params = build_params(&k, t, theta)?;
            let kernel = Kernel::from_theta(theta)?;
            let links = lemma2_all_active(&params, &kernel, step)?;
            let mut all = true;
            for link in &links {
                println!(
                    "side={:?} a={} numeric={} diagonal={:.6e} offdiag={:.3e} divisor_bound={:.6e} cap={:.6e} {}",
                    link.side,
                    link.exponent,
                    link.numeric
                        .map(|v| format!("{v:.6e}"))
                        .unwrap_or_else(|| "-".into()),
                    link.diagonal,
                    link.offdiag_bound,
                    link.divisor_bound,
                    link.cap,
                    if link.pass { "pass" } else { "FAIL" }
                );
                all &= link.pass;
            }
            Ok(all)
        }
        Command::VerifyDiagonal { k, t, theta, step } => {
            let k = parse_k(&require(k, cfg, "k")?)?;
            let t = require(t, cfg, "t")?;
            let theta = or_default(theta, cfg, "theta", 0.3);
            let step = or_default(step, cfg, "step", 0.01);
            let params = build_params(&k, t, theta)?;
            let kernel = Kernel::from_theta(theta)?;
            let (alpha, beta) = build_alpha_beta(&params, DEFAULT_COEFF_BUDGET)?;
            let model = diagonal_i(&params, &kernel, &alpha, &beta)?;
            let i_quad = compute_i(&params, &kernel, step)?;
            let gap = (i_quad.value() - model.value).norm();
            let budget =
                model.offdiag_bound + i_quad.quad_err + i_quad.eval_err + model.trunc_budget;
            let audits = vec![
                Audit::le("diagonal_model_gap", gap, budget),
                Audit::le("imaginary_part_small", i_quad.im.abs(), budget),
            ];
            println!(
                "I = {:.8e} + {:.3e} i   diagonal = {:.8e}   budget = {:.3e}",
                i_quad.re, i_quad.im, model.value, budget
            );
            Ok(print_audits(&audits))
        }
        Command::VerifyLemma1 { k, t, theta } => {
            let k = parse_k(&require(k, cfg, "k")?)?;
            let t = require(t, cfg, "t")?;
            let theta = or_default(theta, cfg, "theta", 0.3);
            let params = build_params(&k, t, theta)?;
            let kernel = Kernel::from_theta(theta)?;
            let (alpha, beta) = build_alpha_beta(&params, DEFAULT_COEFF_BUDGET)?;
            let model = diagonal_i(&params, &kernel, &alpha, &beta)?;
            let chain = moments::lemma1_lower(
                &params,
                kernel.integral(),
                Some(model.sum_alpha_beta),
                Some(model.value),
            )?;
            Ok(print_audits(&chain.audits))
        }
        Command::VerifyTheorem { k, t, theta, step } => {
            let k = parse_k(&require(k, cfg, "k")?)?;
            let t = require(t, cfg, "t")?;
            let theta = or_default(theta, cfg, "theta", 0.3);
            let step = or_default(step, cfg, "step", 0.01);
            let params = build_params(&k, t, theta)?;
            let kernel = Kernel::from_theta(theta)?;
            let i_quad = compute_i(&params, &kernel, step)?;
            let m = moment_mk(params.k(), t, step)?;
            let audit = theorem_bound(&params, m.value.ln(), i_quad.norm().ln());
            println!(
                "log M_k = {:.6}   log holder-power = {:.6}   log theorem rhs = {:.6}",
                audit.log_moment, audit.log_holder_power, audit.log_theorem_rhs
            );
            Ok(print_audits(&audit.audits))
        }
        Command::AuditConstants { k, t, theta, out } => {
            let k = parse_k(&require(k, cfg, "k")?)?;
            let t = or_default(t, cfg, "t", 10_000.0);
            let theta = or_default(theta, cfg, "theta", 0.3);
            let audits = constant_audits(&k, t, theta)?;
            let mut w = out_writer(out)?;
            moments::write_audit_csv(&audits, &mut w)?;
            Ok(audits.iter().all(|a| a.pass))
        }
        Command::Family {
            k,
            vartheta,
            q,
            x_max,
            out,
        } => {
            let k = parse_k(&require(k, cfg, "k")?)?;
            let vartheta = or_default(vartheta, cfg, "vartheta", 0.2);
            let q = q.or_else(|| crate::config::get(cfg, "q"));
            let x_max = x_max.or_else(|| crate::config::get(cfg, "x-max"));
            let mut w = out_writer(out)?;
            match (q, x_max) {
                (Some(q), None) => {
                    let m = families::i_q(q, &k, vartheta, 1 << 22)?;
                    writeln!(w, "index,l_re,l_im,poly_re,poly_im,summand_re,summand_im")?;
                    for r in &m.rows {
                        writeln!(
                            w,
                            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                            r.index, r.l_re, r.l_im, r.poly_re, r.poly_im, r.summand_re,
                            r.summand_im
                        )?;
                    }
                    eprintln!(
                        "I({q}) = {:.10e} + {:.3e} i; orthogonality-route difference {:.3e}",
                        m.value_re, m.value_im, m.difference
                    );
                    Ok(true)
                }
                (None, Some(x)) => {
                    let m = families::i_x(x, &k, vartheta, 1 << 22)?;
                    writeln!(w, "d,l_value,poly,summand")?;
                    for r in &m.rows {
                        writeln!(w, "{},{:.12e},{:.12e},{:.12e}", r.d, r.l_value, r.poly, r.summand)?;
                    }
                    eprintln!(
                        "I({x}) = {:.10e} over {} fundamental discriminants",
                        m.value, m.discriminant_count
                    );
                    Ok(true)
                }
                _ => Err(Error::invalid("family needs exactly one of --q or --x-max")),
            }
        }
        Command::Verify {
            k,
            t,
            theta,
            step,
            json,
            csv,
            skip_moment,
        } => {
            let k = parse_k(&require(k, cfg, "k")?)?;
            let t = require(t, cfg, "t")?;
            let theta = or_default(theta, cfg, "theta", 0.3);
            let step = or_default(step, cfg, "step", 0.01);
            let opts = VerifyOptions {
                step,
                with_moment: !skip_moment,
                ..Default::default()
            };
            let report = run_verification(&k, t, theta, &opts)?;
            if let Some(path) = json {
                std::fs::write(path, report.to_json())?;
            }
            if let Some(path) = csv {
                let f = std::fs::File::create(path)?;
                report.write_audit_csv(f)?;
            }
            let all = print_audits(&report.audits);
            if let Some(name) = report.audits.iter().find(|a| !a.pass).map(|a| &a.name) {
                eprintln!("failing audit: {name}");
            }
            Ok(all && report.all_pass)
        }
    }
}

fn rational_to_f64(k: &BigRational) -> Result<f64> {
    use num_traits::ToPrimitive;
    k.to_f64().ok_or_else(|| Error::invalid("k out of range"))
}

/// The named constant audits: tail log sums, the double-sum link, the
/// subtraction link and the pointwise prime comparison.
fn constant_audits(k: &BigRational, t: f64, theta: f64) -> Result<Vec<Audit>> {
    let params = build_params(k, t, theta)?;
    let kernel = Kernel::from_theta(theta)?;
    let chain = moments::lemma1_lower(&params, kernel.integral(), None, None)?;
    let b_tail = zeta_moments::sylvester::tail_log_sum(&params.exponents().b)?;
    let a_tail = zeta_moments::sylvester::tail_log_sum(&params.exponents().a)?;
    let mut audits = vec![
        Audit::le("b_tail_log_sum_below_5_2", b_tail.upper(), 2.5),
        Audit::ge("b_tail_log_sum_above_2_3", b_tail.partial, 2.3),
        Audit::le("a_tail_log_sum_below_5_2", a_tail.upper(), 2.5),
    ];
    audits.extend(chain.audits);
    Ok(audits)
}
