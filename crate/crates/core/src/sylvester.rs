//! Exact greedy Egyptian-fraction (Sylvester) expansions.
//!
//! For 0 < alpha <= 1 the sequence is defined by taking s_{n+1} as the least
//! integer strictly larger than 1/(alpha - 1/s_1 - ... - 1/s_n). All
//! arithmetic is exact rational: s_7(1) ~ 1.1e25 already overflows u64, and
//! remainders shrink doubly exponentially.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Hard cap on term count: digits double per term, so 24 terms is already a
/// ~3e6-digit final entry.
pub const MAX_TERMS: usize = 24;
/// Default term count; beyond 12 terms every downstream quantity has
/// underflowed double precision.
pub const DEFAULT_TERMS: usize = 12;

/// Greedy expansion terms with exact remainders r_n = alpha - sum_{i<=n} 1/s_i.
#[derive(Debug, Clone)]
pub struct SylvesterSequence {
    alpha: BigRational,
    terms: Vec<BigInt>,
    remainders: Vec<BigRational>,
}

impl SylvesterSequence {
    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    /// 1-indexed term.
    pub fn term(&self, n: usize) -> &BigInt {
        &self.terms[n - 1]
    }

    /// Exact remainder after n terms (1-indexed).
    pub fn remainder(&self, n: usize) -> &BigRational {
        &self.remainders[n - 1]
    }

    /// Term as f64 (saturates to +inf once past ~1e308).
    pub fn term_f64(&self, n: usize) -> f64 {
        big_to_f64(&self.terms[n - 1])
    }

    /// Natural log of a term, finite even when the term overflows f64.
    pub fn term_ln(&self, n: usize) -> f64 {
        big_ln(&self.terms[n - 1])
    }
}

/// f64 value of a positive BigInt, +inf on overflow.
pub fn big_to_f64(n: &BigInt) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY)
}

/// Natural log of a positive BigInt via its bit length.
pub fn big_ln(n: &BigInt) -> f64 {
    if let Some(v) = n.to_f64() {
        if v.is_finite() {
            return v.ln();
        }
    }
    let bits = n.bits();
    // Top 53 bits as mantissa, remainder as power of two.
    let shift = bits.saturating_sub(53);
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// First `count` terms of the greedy expansion of alpha in (0, 1].
pub fn sylvester(alpha: &BigRational, count: usize) -> Result<SylvesterSequence> {
    if !alpha.is_positive() || alpha > &BigRational::one() {
        return Err(Error::invalid(format!(
            "sylvester expansion needs alpha in (0, 1], got {alpha}"
        )));
    }
    if count == 0 {
        return Err(Error::invalid("term count must be >= 1"));
    }
    if count > MAX_TERMS {
        return Err(Error::resource(format!(
            "term count {count} exceeds the cap {MAX_TERMS} (terms grow doubly exponentially)"
        )));
    }
    let mut terms = Vec::with_capacity(count);
    let mut remainders = Vec::with_capacity(count);
    let mut r = alpha.clone();
    for _ in 0..count {
        // Least integer strictly greater than 1/r is floor(1/r) + 1.
        let s = r.recip().floor().to_integer() + BigInt::one();
        r -= BigRational::new(BigInt::one(), s.clone());
        debug_assert!(r.is_positive(), "greedy remainder must stay positive");
        terms.push(s);
        remainders.push(r.clone());
    }
    Ok(SylvesterSequence {
        alpha: alpha.clone(),
        terms,
        remainders,
    })
}

/// The exponent sequences of the construction: a_l expands 1 - 1/k and b_l
/// expands 1, for exact rational k > 1.
#[derive(Debug, Clone)]
pub struct ExponentPair {
    pub k: BigRational,
    pub a: SylvesterSequence,
    pub b: SylvesterSequence,
}

pub fn construction_exponents(k: &BigRational, count: usize) -> Result<ExponentPair> {
    if k <= &BigRational::one() {
        return Err(Error::invalid(format!("need k > 1, got {k}")));
    }
    let target = BigRational::one() - k.recip();
    Ok(ExponentPair {
        k: k.clone(),
        a: sylvester(&target, count)?,
        b: sylvester(&BigRational::one(), count)?,
    })
}

/// Largest L with T0^{1/s_L} >= 2, i.e. s_L <= log2(T0); 0 if already s_1 fails.
///
/// Dirichlet polynomials beyond L have no term with n >= 2 and are
/// identically 1.
pub fn active_length(t0: f64, seq: &SylvesterSequence) -> usize {
    if t0 < 2.0 {
        return 0;
    }
    let threshold = t0.log2() + 1e-9;
    let mut l = 0;
    for n in 1..=seq.len() {
        if seq.term_f64(n) <= threshold {
            l = n;
        } else {
            break;
        }
    }
    l
}

/// sum_l log(1 + s_l^2)/s_l over the available terms plus a rigorous bound on
/// the rest.
#[derive(Debug, Clone, Copy)]
pub struct TailLogSum {
    pub partial: f64,
    pub tail_bound: f64,
}

impl TailLogSum {
    pub fn upper(&self) -> f64 {
        self.partial + self.tail_bound
    }
}

pub fn tail_log_sum(seq: &SylvesterSequence) -> Result<TailLogSum> {
    if seq.len() < 6 {
        return Err(Error::precision(
            "tail_log_sum needs at least 6 terms for a meaningful tail bound",
        ));
    }
    let mut partial = crate::numerics::KahanSum::new();
    for n in 1..=seq.len() {
        let ln_s = seq.term_ln(n);
        let s = seq.term_f64(n);
        let term = if s < 1e150 {
            (1.0 + s * s).ln() / s
        } else {
            // log(1+s^2)/s = (2 ln s + log(1+s^-2))/s; s^2 would overflow and
            // for huge s the whole term underflows anyway.
            (2.0 * ln_s) * (-ln_s).exp()
        };
        partial.add(term);
    }
    // Tail terms continue from the minimal possible successor
    // v' = v(v-1)+1 >= v^2/2; g(x) = log(1+x^2)/x is decreasing for x >= 2,
    // so each tail term is at most g(lower bound). Work with w = log v.
    let mut w = {
        let last = seq.len();
        let v = seq.term_f64(last);
        if v.is_finite() {
            (v * (v - 1.0) + 1.0).ln()
        } else {
            2.0 * seq.term_ln(last) - std::f64::consts::LN_2
        }
    };
    let mut tail = 0.0;
    for _ in 0..200 {
        // g(v) <= (2w + e^{-2w}) e^{-w}
        let term = (2.0 * w + (-2.0 * w).exp()) * (-w).exp();
        if !term.is_finite() || term < 1e-320 {
            break;
        }
        tail += term;
        w = 2.0 * w - std::f64::consts::LN_2; // v' >= v^2/2
    }
    Ok(TailLogSum {
        partial: partial.value(),
        tail_bound: tail,
    })
}

/// Parse an exact rational from "p/q" or a decimal string like "1.5".
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad rational numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad rational denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['-', '+']);
    if !int_digits.chars().all(|c| c.is_ascii_digit()) && !int_digits.is_empty() {
        return Err(Error::invalid(format!("bad decimal {s:?}")));
    }
    if !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::invalid(format!("bad decimal {s:?}")));
    }
    let digits = format!(
        "{}{}",
        if int_digits.is_empty() { "0" } else { int_digits },
        frac_part
    );
    let n: BigInt = digits
        .parse()
        .map_err(|_| Error::invalid(format!("bad decimal {s:?}")))?;
    let d = BigInt::from(10u32).pow(frac_part.len() as u32);
    let r = BigRational::new(n, d);
    Ok(if negative { -r } else { r })
}

/// Rational from a small integer pair, for tests and call sites.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
