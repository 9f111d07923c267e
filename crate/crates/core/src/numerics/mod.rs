//! Shared numerical kernels: compensated summation, log-space arithmetic,
//! the gamma function, and quadrature rules.

pub mod gamma;
pub mod gauss;
pub mod kahan;
pub mod logspace;
pub mod simpson;

pub use gamma::{gamma, ln_gamma};
pub use gauss::{gauss_legendre, PanelQuadrature};
pub use kahan::{kahan_sum, KahanSum};
pub use logspace::{log1mexp, logaddexp, logsubexp, logsumexp};
