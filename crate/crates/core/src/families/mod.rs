//! Family analogues of the twisted moment: Dirichlet characters modulo a
//! prime, quadratic characters over fundamental discriminants, central
//! values L(1/2, chi), and the family sums I(q) and I(X).

mod characters;
mod kronecker;
mod quadratic;

pub use characters::{build_characters, i_q, CharacterTable, FamilyMoment, FamilyRow};
pub use kronecker::kronecker;
pub use quadratic::{
    fundamental_discriminants, i_x, is_fundamental_discriminant, l_half_quadratic,
    QuadraticMoment,
};
