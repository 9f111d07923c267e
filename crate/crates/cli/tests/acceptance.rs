//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one pass/fail line. `cargo test -p zeta-moments-cli --test acceptance`.

mod common;

use std::time::Instant;

use common::TestRng;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use zeta_moments::construction::{build_alpha_beta, build_params, CoefficientVector};
use zeta_moments::divisor::{sieve_divisor, EULER_GAMMA};
use zeta_moments::families::build_characters;
use zeta_moments::kernel::Kernel;
use zeta_moments::moments::{
    compute_i, diagonal_i, holder_chain, lemma1_lower, lemma2_all_active, mean_square_identity,
    moment_mk, moment_mk_multi, theorem_bound, FourierCache,
};
use zeta_moments::sylvester::{ratio, sylvester, tail_log_sum};

fn report(criterion: u32, pass: bool, detail: &str, started: Instant) {
    println!(
        "criterion {criterion:>2}: {} — {detail} ({:.2}s)",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Criterion 1: the CLI reproduces the greedy expansion of 1 as 2, 3, 7, 43,
/// and a thousand random rationals satisfy minimality, the recurrence
/// inequality, and termwise domination. Runtime < 1 s for the library part.
#[test]
fn criterion_01_sylvester_reproduction() {
    let started = Instant::now();
    let exe = env!("CARGO_BIN_EXE_zeta-moments");
    let out = std::process::Command::new(exe)
        .args(["sylvester", "--alpha", "1", "--count", "4"])
        .output()
        .expect("run CLI");
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let terms: Vec<&str> = stdout
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    let cli_ok = terms == ["2", "3", "7", "43"];

    let lib_started = Instant::now();
    let mut rng = TestRng(0x51e57e2);
    let base = sylvester(&ratio(1, 1), 6).unwrap();
    let mut all_ok = true;
    for _ in 0..1000 {
        let den = 2 + rng.below(4999);
        let num = 1 + rng.below(den);
        let alpha = BigRational::new(BigInt::from(num), BigInt::from(den));
        let seq = sylvester(&alpha, 6).unwrap();
        for n in 1..=6usize {
            // Greedy minimality: 1/s_n < r_{n-1} <= 1/(s_n - 1).
            let r_prev = if n == 1 {
                alpha.clone()
            } else {
                seq.remainder(n - 1).clone()
            };
            let inv_s = BigRational::new(BigInt::one(), seq.term(n).clone());
            let inv_sm1 = BigRational::new(BigInt::one(), seq.term(n) - BigInt::one());
            all_ok &= inv_s < r_prev && r_prev <= inv_sm1;
            // Recurrence inequality and domination by the alpha = 1 sequence.
            if n < 6 {
                let floor_next = seq.term(n) * (seq.term(n) - BigInt::one()) + BigInt::one();
                all_ok &= seq.term(n + 1) >= &floor_next;
            }
            all_ok &= seq.term(n) >= base.term(n);
        }
    }
    let lib_time = lib_started.elapsed().as_secs_f64();
    report(
        1,
        cli_ok && all_ok && lib_time < 1.0,
        &format!("CLI terms {terms:?}; 1000 rationals verified in {lib_time:.2}s"),
        started,
    );
}

/// Criterion 2: sieve values match the brute-force Euler-factor expansion to
/// 1e-9 relative for 20 random k in (0, 4], n <= 1e3. Runtime < 10 s.
#[test]
fn criterion_02_divisor_sieve_oracle() {
    let started = Instant::now();
    // Independent oracle: exp(k * -log(1-x)) as formal power series per
    // prime, multiplied across primes.
    fn oracle(k: f64, n: usize) -> Vec<f64> {
        let mut table = vec![0.0; n + 1];
        table[1] = 1.0;
        let primes: Vec<usize> = (2..=n)
            .filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
            .collect();
        for &p in &primes {
            let max_a = (n as f64).log(p as f64) as usize;
            let mut log_series = vec![0.0; max_a + 1];
            for (j, c) in log_series.iter_mut().enumerate().skip(1) {
                *c = k / j as f64;
            }
            let mut exp_series = vec![0.0; max_a + 1];
            exp_series[0] = 1.0;
            for m in 1..=max_a {
                let mut acc = 0.0;
                for j in 1..=m {
                    acc += j as f64 * log_series[j] * exp_series[m - j];
                }
                exp_series[m] = acc / m as f64;
            }
            let mut next = table.clone();
            for (a, &c) in exp_series.iter().enumerate().skip(1) {
                let pa = p.pow(a as u32);
                if pa > n {
                    break;
                }
                for m in 1..=n / pa {
                    if table[m] != 0.0 {
                        next[m * pa] += c * table[m];
                    }
                }
            }
            table = next;
        }
        table
    }
    let mut rng = TestRng(0xd1715);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let k = 1e-6 + rng.next_f64() * 4.0;
        let sieved = sieve_divisor(k, 1000).unwrap();
        let reference = oracle(k, 1000);
        for n in 1..=1000 {
            let rel = (sieved.value(n) - reference[n]).abs() / reference[n].abs().max(1e-30);
            worst = worst.max(rel);
        }
    }
    report(
        2,
        worst < 1e-9 && started.elapsed().as_secs_f64() < 10.0,
        &format!("worst relative deviation {worst:.2e} over 20 random orders"),
        started,
    );
}

/// Criterion 3: the mean-square identity is exact for 50 random coefficient
/// vectors (support <= 200, T in [500, 5000]) to 1e-6 relative. Runtime < 2 min.
#[test]
fn criterion_03_mean_square_identity() {
    let started = Instant::now();
    let kernel = Kernel::from_theta(0.3).unwrap();
    let mut rng = TestRng(0x1de2717);
    let mut worst: f64 = 0.0;
    for trial in 0..50 {
        let support = 10 + rng.below(191) as usize;
        let t = 500.0 + rng.next_f64() * 4500.0;
        let mut coeffs = vec![0.0; support + 1];
        coeffs[1] = 0.2 + rng.next_f64();
        for c in coeffs.iter_mut().skip(2) {
            if rng.next_f64() < 0.7 {
                *c = rng.next_f64();
            }
        }
        let vector = CoefficientVector::new(coeffs, zeta_moments::construction::CoeffLabel::Unit);
        let mut cache = FourierCache::new(&kernel, t).unwrap();
        let chk = mean_square_identity(&vector, t, &mut cache).unwrap();
        let gap = chk.rel_gap();
        worst = worst.max(gap);
        assert!(
            chk.consistent(1e-6),
            "trial {trial}: support={support} t={t:.0} gap={gap:.3e}"
        );
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        3,
        worst < 1e-6 && elapsed < 120.0,
        &format!("50 vectors, worst relative gap {worst:.2e}"),
        started,
    );
}

/// Criterion 4: the k = 1 moment matches T log(T/2pi) + (2 gamma - 1) T
/// within 3% at T = 1e4, step 0.01. Runtime < 5 min single-threaded.
#[test]
fn criterion_04_classical_mean_square() {
    let started = Instant::now();
    let t = 1e4;
    let result = moment_mk(1.0, t, 0.01).unwrap();
    let classical = t * (t / (2.0 * std::f64::consts::PI)).ln() + (2.0 * EULER_GAMMA - 1.0) * t;
    let rel = (result.value - classical).abs() / classical;
    let elapsed = started.elapsed().as_secs_f64();
    report(
        4,
        rel < 0.03 && elapsed < 300.0,
        &format!(
            "M_1(1e4) = {:.1} vs classical {:.1} (rel {:.4})",
            result.value, classical, rel
        ),
        started,
    );
}

/// Criterion 5: diagonal model at k = 1.5, T = 5000, theta = 0.3:
/// |I - diagonal| and |Im I| within offdiag + quadrature + audited T^{0.6}.
/// Runtime < 10 min.
#[test]
fn criterion_05_diagonal_model() {
    let started = Instant::now();
    let params = build_params(&ratio(3, 2), 5000.0, 0.3).unwrap();
    let kernel = Kernel::from_theta(0.3).unwrap();
    let (alpha, beta) = build_alpha_beta(&params, 1 << 24).unwrap();
    let model = diagonal_i(&params, &kernel, &alpha, &beta).unwrap();
    let i_quad = compute_i(&params, &kernel, 0.01).unwrap();
    let budget = model.offdiag_bound + i_quad.quad_err + i_quad.eval_err + model.trunc_budget;
    let gap = (i_quad.value() - model.value).norm();
    let im_ok = i_quad.im.abs() <= budget && i_quad.re.abs() > i_quad.im.abs();
    let elapsed = started.elapsed().as_secs_f64();
    report(
        5,
        gap <= budget && im_ok && elapsed < 600.0,
        &format!(
            "I = {:.2} + {:.2}i, diagonal = {:.2}, gap {:.2} <= budget {:.2}",
            i_quad.re, i_quad.im, model.value, gap, budget
        ),
        started,
    );
}

/// Criterion 6: the moment-bound chain at k = 1.5, T = 1e4 for every active
/// exponent: numeric (2a <= 8) <= diagonal + error <= T (log T)^{k^2} (1+1e-3).
#[test]
fn criterion_06_moment_bound_chain() {
    let started = Instant::now();
    let params = build_params(&ratio(3, 2), 10_000.0, 0.3).unwrap();
    let kernel = Kernel::from_theta(0.3).unwrap();
    let links = lemma2_all_active(&params, &kernel, 0.01).unwrap();
    let mut all = !links.is_empty();
    let mut detail = String::new();
    for link in &links {
        all &= link.pass;
        if let (Some(v), Some(e)) = (link.numeric, link.numeric_err) {
            all &= v <= link.diagonal + link.offdiag_bound + e;
        }
        all &= link.diagonal + link.offdiag_bound <= link.cap;
        detail.push_str(&format!("{:?}{} ", link.side, link.exponent));
    }
    report(
        6,
        all,
        &format!("active exponents: {detail}all chains hold"),
        started,
    );
}

/// Criterion 7: constant audits — the tail log sum of the unit expansion in
/// (2.3, 2.5); double-sum link <= 10 k^3 and subtraction link <= log 2 - 20k^3
/// for k in {1.1, 1.5, 2, 3, 5}; pointwise prime comparison at k = 1.5,
/// T = 1e4. Runtime < 1 min.
#[test]
fn criterion_07_constant_audits() {
    let started = Instant::now();
    let b = sylvester(&ratio(1, 1), 12).unwrap();
    let tail = tail_log_sum(&b).unwrap();
    let mut all = tail.partial > 2.3 && tail.upper() < 2.5;

    for (num, den) in [(11i64, 10i64), (3, 2), (2, 1), (3, 1), (5, 1)] {
        let k = ratio(num, den);
        let params = build_params(&k, 10_000.0, 0.3).unwrap();
        let chain = lemma1_lower(&params, 0.2, None, None).unwrap();
        let kf = num as f64 / den as f64;
        let k3 = kf.powi(3);
        all &= chain.exp_correction <= 10.0 * k3;
        all &= chain.log_subtraction <= std::f64::consts::LN_2 - 20.0 * k3;
        all &= chain.log_subtraction.is_finite();
        if (kf - 1.5).abs() < 1e-12 {
            all &= chain.pointwise_min_margin >= 0.0;
            all &= chain.f_max <= kf * kf;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        7,
        all && elapsed < 60.0,
        &format!(
            "tail log sum = {:.4}; weight links hold for k in {{1.1, 1.5, 2, 3, 5}}",
            tail.partial
        ),
        started,
    );
}

/// Criterion 8: the factorization inequality |I| <= product of power-integral
/// factors on three configurations.
#[test]
fn criterion_08_holder_chain() {
    let started = Instant::now();
    let configs = [((3i64, 2i64), 5000.0), ((2, 1), 2000.0), ((6, 5), 5000.0)];
    let mut all = true;
    let mut detail = String::new();
    for ((num, den), t) in configs {
        let params = build_params(&ratio(num, den), t, 0.3).unwrap();
        let kernel = Kernel::from_theta(0.3).unwrap();
        let chk = holder_chain(&params, &kernel, 0.01).unwrap();
        all &= chk.pass && chk.exponent_mass_gap < 1e-12;
        detail.push_str(&format!(
            "k={num}/{den},T={t}: slack {:.2}; ",
            chk.slack_log
        ));
    }
    report(8, all, detail.trim_end_matches("; "), started);
}

/// Criterion 9: the final inequality pair passes end-to-end at k = 1.5,
/// T = 1e4 and stays finite in log space at k = 5 (constants below double
/// range).
#[test]
fn criterion_09_theorem_end_to_end() {
    let started = Instant::now();
    let kernel = Kernel::from_theta(0.3).unwrap();
    let mut all = true;
    let mut detail = String::new();
    for (num, den) in [(3i64, 2i64), (5, 1)] {
        let params = build_params(&ratio(num, den), 10_000.0, 0.3).unwrap();
        let i_quad = compute_i(&params, &kernel, 0.01).unwrap();
        let m = moment_mk_multi(&[params.k()], 10_000.0, 0.01).unwrap()[0];
        let audit = theorem_bound(&params, m.value.ln(), i_quad.norm().ln());
        all &= audit.audits.iter().all(|a| a.pass);
        all &= audit.log_theorem_rhs.is_finite()
            && audit.log_holder_power.is_finite()
            && audit.log_moment.is_finite();
        detail.push_str(&format!(
            "k={num}/{den}: logM={:.1}, log rhs={:.1}; ",
            audit.log_moment, audit.log_theorem_rhs
        ));
    }
    report(9, all, detail.trim_end_matches("; "), started);
}

/// Criterion 10: families — I(q) real to 1e-8 of its summand scale at
/// q = 211, k = 1.5, vartheta = 0.2; exact character orthogonality for all
/// prime moduli q <= 100; dual-method central values agree to 1e-6 on 20
/// samples. Runtime < 5 min.
#[test]
fn criterion_10_families() {
    let started = Instant::now();
    let m = zeta_moments::families::i_q(211, &ratio(3, 2), 0.2, 1 << 22).unwrap();
    let scale: f64 = m
        .rows
        .iter()
        .map(|r| (r.summand_re.powi(2) + r.summand_im.powi(2)).sqrt())
        .sum();
    let real_ok = m.value_im.abs() <= 1e-8 * scale;

    let mut orth_ok = true;
    for q in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
        83, 89, 97]
    {
        let table = build_characters(q).unwrap();
        for j1 in 0..table.order() {
            for j2 in 0..table.order() {
                orth_ok &= table.orthogonality_exact(j1, j2);
            }
        }
    }

    let mut rng = TestRng(0xfa1112e5);
    let mut dual_worst: f64 = 0.0;
    let qs = [53u64, 61, 101, 131, 173, 211, 263, 307];
    for _ in 0..20 {
        let q = qs[rng.below(qs.len() as u64) as usize];
        let table = build_characters(q).unwrap();
        let j = 1 + rng.below(table.order() - 1);
        let hurwitz = table.l_half(j).unwrap();
        let afe = common::l_half_afe(&table, j);
        dual_worst = dual_worst.max((hurwitz - afe).norm());
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        10,
        real_ok && orth_ok && dual_worst < 1e-6 && elapsed < 300.0,
        &format!(
            "Im I(211) = {:.2e} (scale {scale:.1}); orthogonality exact; dual-method worst {dual_worst:.2e}",
            m.value_im
        ),
        started,
    );
}
