//! Dirichlet characters modulo a prime q, realized through a primitive root:
//! chi_j(n) = e(j * ind(n) / (q-1)). Every non-principal character mod a
//! prime is primitive. Central values go through the Hurwitz-zeta
//! representation L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q).

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::construction::coefficient_cutoff;
use crate::divisor::sieve_divisor;
use crate::error::{Error, Result};
use crate::numerics::KahanSum;
use crate::sylvester::construction_exponents;
use crate::zeta::hurwitz_zeta;

/// All characters mod a prime q, indexed by j = 0..q-2 with j = 0 principal.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    q: u64,
    generator: u64,
    /// ind[n] for n in 1..q: the discrete log base `generator`.
    ind: Vec<u32>,
    /// roots[m] = e(m / (q-1)).
    roots: Vec<Complex64>,
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u128;
    let m = modulus as u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Build the character table for a prime modulus q >= 3.
pub fn build_characters(q: u64) -> Result<CharacterTable> {
    if !is_prime(q) || q < 3 {
        return Err(Error::invalid(format!(
            "modulus {q} must be an odd prime (composite moduli out of scope)"
        )));
    }
    // Factor q-1 and search for a primitive root.
    let phi = q - 1;
    let mut factors = Vec::new();
    let mut rest = phi;
    let mut d = 2u64;
    while d * d <= rest {
        if rest % d == 0 {
            factors.push(d);
            while rest % d == 0 {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        factors.push(rest);
    }
    let generator = (2..q)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, phi / f, q) != 1))
        .ok_or_else(|| Error::invalid("no primitive root found"))?;

    let mut ind = vec![0u32; q as usize];
    let mut power = 1u64;
    for i in 0..phi {
        ind[power as usize] = i as u32;
        power = power * generator % q;
    }
    let roots = (0..phi)
        .map(|m| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / phi as f64))
        .collect();
    Ok(CharacterTable {
        q,
        generator,
        ind,
        roots,
    })
}

impl CharacterTable {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn order(&self) -> u64 {
        self.q - 1
    }

    pub fn is_principal(&self, j: u64) -> bool {
        j == 0
    }

    /// Discrete log of n (n coprime to q).
    pub fn index(&self, n: u64) -> u32 {
        self.ind[(n % self.q) as usize]
    }

    /// chi_j(n); zero when q | n.
    pub fn chi(&self, j: u64, n: u64) -> Complex64 {
        let r = n % self.q;
        if r == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let m = (j as u128 * self.ind[r as usize] as u128 % (self.q - 1) as u128) as usize;
        self.roots[m]
    }

    /// Exact orthogonality witness: the multiset {(j2-j1) ind(n) mod q-1}
    /// over units n covers each class with equal multiplicity iff j1 != j2.
    /// Runs entirely in integer arithmetic.
    pub fn orthogonality_exact(&self, j1: u64, j2: u64) -> bool {
        let phi = (self.q - 1) as usize;
        let mut counts = vec![0u32; phi];
        let diff = (j2 + self.q - 1 - j1) % (self.q - 1);
        for n in 1..self.q {
            let e = (diff as u128 * self.ind[n as usize] as u128 % (self.q - 1) as u128) as usize;
            counts[e] += 1;
        }
        if j1 == j2 {
            counts[0] as u64 == self.q - 1 && counts[1..].iter().all(|&c| c == 0)
        } else {
            // Uniform over the subgroup generated by diff: sum of the
            // corresponding roots of unity vanishes exactly.
            let g = gcd(diff, self.q - 1) as usize;
            (0..phi).all(|e| counts[e] == if e % g == 0 { g as u32 } else { 0 })
        }
    }

    /// Hurwitz-zeta values zeta(1/2, a/q) for a = 1..q-1, shared by every
    /// character's central value.
    pub fn hurwitz_row(&self) -> Result<Vec<f64>> {
        (1..self.q)
            .map(|a| hurwitz_zeta(0.5, a as f64 / self.q as f64).map(|(v, _)| v))
            .collect()
    }

    /// L(1/2, chi_j) for non-principal j via the Hurwitz representation.
    pub fn l_half(&self, j: u64) -> Result<Complex64> {
        if self.is_principal(j) {
            return Err(Error::invalid(
                "central value requested for the principal character",
            ));
        }
        let row = self.hurwitz_row()?;
        Ok(self.l_half_with(j, &row))
    }

    pub fn l_half_with(&self, j: u64, hurwitz_row: &[f64]) -> Complex64 {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for a in 1..self.q {
            let chi = self.chi(j, a);
            let h = hurwitz_row[(a - 1) as usize];
            re.add(chi.re * h);
            im.add(chi.im * h);
        }
        Complex64::new(re.value(), im.value()) / (self.q as f64).sqrt()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The family moment I(q) and its orthogonality-route rearrangement.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FamilyMoment {
    pub q: u64,
    pub value_re: f64,
    pub value_im: f64,
    /// Same sum rearranged through exact character orthogonality.
    pub prediction_re: f64,
    pub prediction_im: f64,
    /// |direct - prediction| (pure floating-point discrepancy).
    pub difference: f64,
    /// Per-character rows (L-value, polynomial product, summand) for CSV.
    pub rows: Vec<FamilyRow>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FamilyRow {
    pub index: u64,
    pub l_re: f64,
    pub l_im: f64,
    pub poly_re: f64,
    pub poly_im: f64,
    pub summand_re: f64,
    pub summand_im: f64,
}

/// I(q) = sum over primitive chi of L(1/2, chi) prod_l A_l(chi) B_l(chi-bar),
/// with A_l(chi) = sum_{n <= q^{vartheta/a_l}} d_{k/a_l}(n) chi(n)/sqrt(n).
pub fn i_q(q: u64, k: &BigRational, vartheta: f64, budget: usize) -> Result<FamilyMoment> {
    if q > 10_000 {
        return Err(Error::resource(format!("modulus {q} beyond the desk budget")));
    }
    let k_f64 = k.to_f64().ok_or_else(|| Error::invalid("k out of range"))?;
    if k_f64 <= 1.0 {
        return Err(Error::invalid("need k > 1"));
    }
    if !(vartheta > 0.0 && vartheta < 0.45) {
        return Err(Error::invalid("need vartheta in (0, 0.45)"));
    }
    let table = build_characters(q)?;
    let row = table.hurwitz_row()?;
    let qf = q as f64;
    let q_pow = qf.powf(vartheta);

    // Coefficient lists for the active polynomials on each side.
    let exponents = construction_exponents(k, crate::sylvester::DEFAULT_TERMS)?;
    let mut polys_a = Vec::new();
    let mut polys_b = Vec::new();
    let mut total = 0usize;
    for l in 1..=exponents.a.len() {
        let cut = coefficient_cutoff(q_pow, exponents.a.term_f64(l)) as usize;
        if cut < 2 {
            break;
        }
        total += cut;
        polys_a.push(sieve_divisor(k_f64 / exponents.a.term_f64(l), cut)?);
    }
    for l in 1..=exponents.b.len() {
        let cut = coefficient_cutoff(q_pow, exponents.b.term_f64(l)) as usize;
        if cut < 2 {
            break;
        }
        total += cut;
        polys_b.push(sieve_divisor(k_f64 / exponents.b.term_f64(l), cut)?);
    }
    if total > budget {
        return Err(Error::resource("polynomial budget exceeded"));
    }

    // Direct sum over the q-2 primitive (non-principal) characters.
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    let mut rows = Vec::new();
    for j in 1..table.order() {
        let l_val = table.l_half_with(j, &row);
        let mut prod = Complex64::new(1.0, 0.0);
        for poly in &polys_a {
            let mut p = Complex64::new(0.0, 0.0);
            for n in 1..=poly.limit() {
                p += poly.value(n) / (n as f64).sqrt() * table.chi(j, n as u64);
            }
            prod *= p;
        }
        for poly in &polys_b {
            let mut p = Complex64::new(0.0, 0.0);
            for n in 1..=poly.limit() {
                p += poly.value(n) / (n as f64).sqrt() * table.chi(j, n as u64).conj();
            }
            prod *= p;
        }
        let summand = l_val * prod;
        re.add(summand.re);
        im.add(summand.im);
        rows.push(FamilyRow {
            index: j,
            l_re: l_val.re,
            l_im: l_val.im,
            poly_re: prod.re,
            poly_im: prod.im,
            summand_re: summand.re,
            summand_im: summand.im,
        });
    }
    let value = Complex64::new(re.value(), im.value());

    // Orthogonality route: expand everything and use
    // sum over non-principal chi of chi(a m) conj(chi(n)) =
    //   (q-1) [a m = n mod q] - 1   (on units).
    // The alpha/beta coefficient vectors are the products of the A and B
    // polynomial coefficient lists.
    let alpha = convolve_all(&polys_a, q_pow.floor() as usize);
    let beta = convolve_all(&polys_b, q_pow.floor() as usize);
    let mut main = KahanSum::new();
    let mut w_total = KahanSum::new();
    for a in 1..q {
        let w = row[(a - 1) as usize] / qf.sqrt();
        w_total.add(w);
        for (m, am) in alpha.iter().enumerate() {
            if *am == 0.0 {
                continue;
            }
            let m = m as u64;
            for (n, bn) in beta.iter().enumerate() {
                if *bn == 0.0 {
                    continue;
                }
                let n = n as u64;
                if (a * m) % q == n % q {
                    main.add(w * am * bn / ((m * n) as f64).sqrt());
                }
            }
        }
    }
    let mass_a: f64 = alpha
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, c)| c / (m as f64).sqrt())
        .sum();
    let mass_b: f64 = beta
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| c / (n as f64).sqrt())
        .sum();
    let prediction = (q as f64 - 1.0) * main.value() - w_total.value() * mass_a * mass_b;

    Ok(FamilyMoment {
        q,
        value_re: value.re,
        value_im: value.im,
        prediction_re: prediction,
        prediction_im: 0.0,
        difference: (value - Complex64::new(prediction, 0.0)).norm(),
        rows,
    })
}

/// Dirichlet convolution of divisor tables as plain coefficient arrays.
fn convolve_all(polys: &[crate::divisor::DivisorTable], support: usize) -> Vec<f64> {
    let mut acc = vec![0.0; 2.max(support + 1)];
    acc[1] = 1.0;
    let mut acc_support = 1usize;
    for poly in polys {
        acc_support = (acc_support * poly.limit()).min(support);
        let mut next = vec![0.0; acc_support + 1];
        for d in 1..=poly.limit() {
            let c = poly.value(d);
            if c == 0.0 {
                continue;
            }
            for m in 1..=acc_support / d {
                if acc[m] != 0.0 {
                    next[d * m] += c * acc[m];
                }
            }
        }
        for (i, v) in next.iter().enumerate() {
            if i < acc.len() {
                acc[i] = *v;
            }
        }
        for v in acc.iter_mut().skip(next.len()) {
            *v = 0.0;
        }
    }
    acc
}
