//! Natural-log-space arithmetic for positive quantities.
//!
//! The bound chains multiply factors like exp(-20 k^3) and exp(-30 k^4),
//! which underflow double precision already at k ~ 3.3. All chain arithmetic
//! therefore runs on logarithms, with explicit add/sub primitives.

/// log(exp(a) + exp(b)) without overflow.
pub fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log(sum exp(x_i)) over a slice; NEG_INFINITY entries are ignored.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY || hi.is_nan() {
        return hi;
    }
    let mut acc = super::kahan::KahanSum::new();
    for &x in xs {
        acc.add((x - hi).exp());
    }
    hi + acc.value().ln()
}

/// log(1 - exp(x)) for x < 0.
pub fn log1mexp(x: f64) -> f64 {
    debug_assert!(x < 0.0);
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// log(exp(a) - exp(b)) for a > b.
pub fn logsubexp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    assert!(a > b, "logsubexp requires a > b (got {a}, {b})");
    a + log1mexp(b - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logaddexp_matches_direct() {
        let v = logaddexp(1.0f64.ln(), 2.0f64.ln());
        assert!((v - 3.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn logaddexp_extreme_scale() {
        // exp(-20000) + exp(-20001) stays finite in log space.
        let v = logaddexp(-20000.0, -20001.0);
        assert!(v.is_finite());
        assert!((v - (-20000.0 + (1.0 + (-1.0f64).exp()).ln())).abs() < 1e-12);
    }

    #[test]
    fn logsumexp_all_neg_inf() {
        assert_eq!(logsumexp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
    }

    #[test]
    fn logsubexp_small_difference() {
        let v = logsubexp(0.0, -1e-8);
        // log(1 - exp(-1e-8)) = log(1e-8) + O(1e-8)
        assert!((v - (1e-8f64).ln()).abs() < 1e-6);
    }
}
