//! Numerical machinery for moment lower bounds of the Riemann zeta function
//! on the critical line.
//!
//! The crate builds the full construction behind Sylvester-sequence Dirichlet
//! polynomial resonators: exact greedy Egyptian-fraction expansions, sieved
//! real-order divisor coefficients, a smooth compactly supported weight with
//! audited Fourier decay, fast critical-line zeta evaluation, the truncated
//! convolution coefficients of the resonator product, and a verification lab
//! that checks every identity and inequality of the bound chain at finite
//! desk-scale parameters.

pub mod construction;
pub mod divisor;
pub mod error;
pub mod families;
pub mod kernel;
pub mod moments;
pub mod numerics;
pub mod sylvester;
pub mod zeta;

pub use error::{Error, Result};
