//! Multiplicative-function machinery: real-order divisor coefficients d_k(n),
//! the Moebius function, prime tables, Euler products and prime sums.
//!
//! d_k(n) for real k > 0 is the multiplicative function with
//! d_k(p^a) = binom(k+a-1, a), i.e. the Dirichlet-series coefficients of
//! zeta(s)^k. For integer k this is the ordinary k-fold divisor function.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::{gamma, kahan_sum, KahanSum};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.5772156649015328606;
/// Mertens constant B_1 in sum_{p<=x} 1/p = log log x + B_1 + o(1).
pub const MERTENS_B1: f64 = 0.2614972128476427838;

/// Named analytic constants plus a gamma-function capability.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticConstants {
    pub euler_gamma: f64,
    pub mertens_b1: f64,
}

impl Default for AnalyticConstants {
    fn default() -> Self {
        Self {
            euler_gamma: EULER_GAMMA,
            mertens_b1: MERTENS_B1,
        }
    }
}

impl AnalyticConstants {
    pub fn gamma(&self, x: f64) -> f64 {
        gamma(x)
    }
}

/// Primes, smallest prime factors and Moebius values up to a limit.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: usize,
    primes: Vec<u64>,
    mu: Vec<i8>,
    spf: Vec<u32>,
}

impl PrimeTable {
    /// Linear sieve: every composite is struck exactly once by its smallest
    /// prime factor.
    pub fn sieve(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        let mut mu = vec![0i8; limit + 1];
        let mut primes = Vec::new();
        if limit >= 1 {
            mu[1] = 1;
        }
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                mu[i] = -1;
                primes.push(i as u64);
            }
            for &p in &primes {
                let p = p as usize;
                if p > spf[i] as usize || i * p > limit {
                    break;
                }
                spf[i * p] = p as u32;
                mu[i * p] = if i % p == 0 { 0 } else { -mu[i] };
            }
        }
        Self {
            limit,
            primes,
            mu,
            spf,
        }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn mu(&self, n: usize) -> i8 {
        self.mu[n]
    }

    pub fn smallest_prime_factor(&self, n: usize) -> u32 {
        self.spf[n]
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    /// (prime, exponent) factorization using the sieve.
    pub fn factorize(&self, mut n: usize) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }
}

/// Coefficient of x^a in (1 - x)^{-k}: binom(k+a-1, a), independent of the prime.
pub fn prime_power_coeff(k: f64, a: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..a {
        c *= (k + i as f64) / (i as f64 + 1.0);
    }
    c
}

/// Sieved table of d_k(n) for n = 1..=limit.
#[derive(Debug, Clone)]
pub struct DivisorTable {
    k: f64,
    values: Vec<f64>, // values[n] = d_k(n); index 0 unused
}

impl DivisorTable {
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn limit(&self) -> usize {
        self.values.len() - 1
    }

    #[inline]
    pub fn value(&self, n: usize) -> f64 {
        self.values[n]
    }

    /// Slice of d_k values, entry 0 unused.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// sum_{n<=limit} d_k(n)^2 / n with compensated summation.
    pub fn diagonal_sum(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (n, &v) in self.values.iter().enumerate().skip(1) {
            acc.add(v * v / n as f64);
        }
        acc.value()
    }

    /// Flat binary cache: magic "DKTB", then little-endian k (f64),
    /// N (u64) and the N table values (f64 each).
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(b"DKTB")?;
        f.write_all(&self.k.to_le_bytes())?;
        f.write_all(&(self.limit() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.limit() * 8);
        for &v in &self.values[1..] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        f.write_all(&buf)?;
        Ok(())
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        let mut f = std::fs::File::open(path)?;
        let mut magic = [0u8; 4];
        f.read_exact(&mut magic)?;
        if &magic != b"DKTB" {
            return Err(Error::invalid(format!(
                "bad cache magic {:?} in {}",
                magic,
                path.display()
            )));
        }
        let mut word = [0u8; 8];
        f.read_exact(&mut word)?;
        let k = f64::from_le_bytes(word);
        f.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        let mut buf = vec![0u8; n * 8];
        f.read_exact(&mut buf)?;
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        for chunk in buf.chunks_exact(8) {
            values.push(f64::from_le_bytes(chunk.try_into().unwrap()));
        }
        Ok(Self { k, values })
    }
}

/// Sieve d_k(n) on 1..=n via smallest-prime-factor factorization.
///
/// For n = p^a * m with p the smallest prime factor and p coprime to m,
/// d_k(n) = d_k(m) * binom(k+a-1, a); the cofactor and exponent arrays are
/// filled in one linear pass.
pub fn sieve_divisor(k: f64, n: usize) -> Result<DivisorTable> {
    if n == 0 {
        return Err(Error::invalid("divisor table limit must be >= 1"));
    }
    if !(k > 0.0) {
        return Err(Error::invalid(format!("divisor order k must be > 0, got {k}")));
    }
    let pt = PrimeTable::sieve(n);
    // Coefficients binom(k+a-1, a) for a up to log2(n).
    let max_exp = if n >= 2 { n.ilog2() as usize } else { 0 };
    let coeff: Vec<f64> = (0..=max_exp as u32 + 1)
        .map(|a| prime_power_coeff(k, a))
        .collect();

    let mut values = vec![0.0f64; n + 1];
    let mut exp = vec![0u8; n + 1];
    let mut cofactor = vec![0u32; n + 1];
    values[1] = 1.0;
    for i in 2..=n {
        let p = pt.spf[i] as usize;
        let q = i / p;
        if q % p == 0 {
            exp[i] = exp[q] + 1;
            cofactor[i] = cofactor[q];
        } else {
            exp[i] = 1;
            cofactor[i] = q as u32;
        }
        values[i] = values[cofactor[i] as usize] * coeff[exp[i] as usize];
    }
    Ok(DivisorTable { k, values })
}

/// Convenience: sieve then sum d_k(n)^2/n over n <= limit.
pub fn diagonal_sum(k: f64, limit: usize) -> Result<f64> {
    Ok(sieve_divisor(k, limit)?.diagonal_sum())
}

/// Leading-order asymptotic of the diagonal sum together with an explicit
/// Euler-product tail bound.
#[derive(Debug, Clone, Copy)]
pub struct DiagonalAsymptotic {
    /// (log N)^{k^2} / Gamma(k^2+1) times the truncated Euler product.
    pub value: f64,
    /// Natural log of `value`.
    pub log_value: f64,
    /// Bound on |log of the omitted Euler-product tail| (p > cutoff).
    pub tail_bound: f64,
}

/// (log N)^{k^2}/Gamma(k^2+1) * prod_{p<=cutoff} (1-1/p)^{k^2} (1 + sum_a d_k(p^a)^2/p^a).
///
/// N enters only through log N, so it is accepted as a real.
pub fn diagonal_asymptotic(k: f64, n_limit: f64, prime_cutoff: usize) -> Result<DiagonalAsymptotic> {
    if prime_cutoff < 2 {
        return Err(Error::invalid("prime cutoff must be >= 2"));
    }
    if !(k > 0.0) || !(n_limit > 1.0) {
        return Err(Error::invalid("need k > 0 and N > 1"));
    }
    let k2 = k * k;
    let pt = PrimeTable::sieve(prime_cutoff);
    let mut log_product = KahanSum::new();
    let mut last_factor_scaled: f64 = 0.0;
    for &p in pt.primes() {
        let x = 1.0 / p as f64;
        // 1 + sum_{a>=1} d_k(p^a)^2 x^a, summed until the terms underflow.
        let mut series = KahanSum::new();
        series.add(1.0);
        let mut coeff = 1.0;
        for a in 1..200u32 {
            coeff *= (k + (a - 1) as f64) / a as f64;
            let term = coeff * coeff * x.powi(a as i32);
            series.add(term);
            if term < 1e-20 * series.value() {
                break;
            }
        }
        let log_factor = k2 * (1.0 - x).ln() + series.value().ln();
        log_product.add(log_factor);
        last_factor_scaled = log_factor.abs() * (p as f64) * (p as f64);
    }
    // Each omitted log-factor is ~ -k^2(k-1)^2/(4p^2); sum over p > cutoff is
    // below max(analytic coefficient, last observed scaled factor) / cutoff.
    let c2 = (k2 * (k - 1.0) * (k - 1.0) / 4.0).max(last_factor_scaled) + 1.0;
    let tail_bound = c2 / prime_cutoff as f64;

    let log_n = n_limit.ln();
    let log_value =
        k2 * log_n.ln() - crate::numerics::ln_gamma(k2 + 1.0) + log_product.value();
    Ok(DiagonalAsymptotic {
        value: log_value.exp(),
        log_value,
        tail_bound,
    })
}

/// sum_{p<=x} 1/p by direct enumeration.
pub fn mertens_prime_sum(x: f64) -> f64 {
    if x < 2.0 {
        return 0.0;
    }
    let pt = PrimeTable::sieve(x.floor() as usize);
    mertens_prime_sum_with(&pt, x)
}

pub fn mertens_prime_sum_with(pt: &PrimeTable, x: f64) -> f64 {
    kahan_sum(
        pt.primes()
            .iter()
            .take_while(|&&p| p as f64 <= x)
            .map(|&p| 1.0 / p as f64),
    )
}

/// sum_{p<=x} (1/p - 1/p^{1+alpha}) plus the audit bound 1 + log(alpha log x) + gamma.
#[derive(Debug, Clone, Copy)]
pub struct PrimeDeficit {
    pub sum: f64,
    pub bound: f64,
    /// Whether alpha >= 1/log x (the regime where the bound applies).
    pub in_regime: bool,
}

pub fn prime_deficit_sum(x: f64, alpha: f64) -> PrimeDeficit {
    assert!(x >= 2.0 && alpha > 0.0);
    let pt = PrimeTable::sieve(x.floor() as usize);
    prime_deficit_sum_with(&pt, x, alpha)
}

pub fn prime_deficit_sum_with(pt: &PrimeTable, x: f64, alpha: f64) -> PrimeDeficit {
    let mut acc = KahanSum::new();
    for &p in pt.primes() {
        let pf = p as f64;
        if pf > x {
            break;
        }
        // 1/p - p^{-1-alpha} = (1 - p^{-alpha})/p, computed via expm1 to keep
        // accuracy for small alpha log p.
        acc.add(-(-alpha * pf.ln()).exp_m1() / pf);
    }
    let log_x = x.ln();
    PrimeDeficit {
        sum: acc.value(),
        bound: 1.0 + (alpha * log_x).ln() + EULER_GAMMA,
        in_regime: alpha >= 1.0 / log_x,
    }
}
