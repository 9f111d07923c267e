//! Shared test support: an independent smoothed-functional-equation
//! evaluator for Dirichlet central values, used as the dual-method oracle
//! against the Hurwitz-zeta route.

use num_complex::Complex64;
use zeta_moments::families::CharacterTable;
use zeta_moments::numerics::{gamma, PanelQuadrature};

/// Deterministic xorshift for reproducible sampling in tests.
pub struct TestRng(pub u64);

impl TestRng {
    pub fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: u64) -> u64 {
        (self.next_f64() * n as f64) as u64
    }
}

/// int_1^infty e^{-c t} t^{-power} dt; substituting t = e^u makes the
/// integrand uniformly smooth, so fixed panels in u converge fast.
fn tail_integral(c: f64, power: f64, quad: &PanelQuadrature) -> f64 {
    let u_max = (1.0 + 45.0 / c).ln();
    quad.integrate(0.0, u_max, 128, |u| {
        let t = u.exp();
        (-c * t).exp() * t.powf(1.0 - power)
    })
}

/// L(1/2, chi_j) via the completed-function split: theta-integral terms on
/// both sides of the functional equation with the Gauss-sum root number.
/// Entirely independent of the Hurwitz-zeta representation.
pub fn l_half_afe(table: &CharacterTable, j: u64) -> Complex64 {
    let q = table.q();
    let qf = q as f64;
    let quad = PanelQuadrature::new(16);

    // Parity: chi(-1) = chi(q-1).
    let parity_odd = (table.chi(j, q - 1).re - 1.0).abs() > 1e-9;

    // Gauss sum tau(chi) = sum_a chi(a) e(a/q).
    let mut tau = Complex64::new(0.0, 0.0);
    for a in 1..q {
        tau += table.chi(j, a)
            * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * a as f64 / qf);
    }

    let n_max = (3.6 * qf.sqrt()).ceil() as u64 + 2;
    let mut primal = Complex64::new(0.0, 0.0);
    let mut dual = Complex64::new(0.0, 0.0);
    for n in 1..=n_max {
        let c = std::f64::consts::PI * (n * n) as f64 / qf;
        if c > 600.0 {
            break;
        }
        let (weight, f) = if parity_odd {
            (n as f64, tail_integral(c, 0.25, &quad))
        } else {
            (1.0, tail_integral(c, 0.75, &quad))
        };
        primal += table.chi(j, n) * weight * f;
        dual += table.chi(j, n).conj() * weight * f;
    }
    let root_number = if parity_odd {
        tau / (Complex64::i() * qf.sqrt())
    } else {
        tau / qf.sqrt()
    };
    let lambda = primal + root_number * dual;
    let normalization = if parity_odd {
        (qf / std::f64::consts::PI).powf(0.75) * gamma(0.75)
    } else {
        (qf / std::f64::consts::PI).powf(0.25) * gamma(0.25)
    };
    lambda / normalization
}
