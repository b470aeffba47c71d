//! Special functions: modified Bessel functions of real order, the Debye
//! polynomials of the uniform expansion, Legendre functions, vector
//! spherical harmonic sums and Hermite functions.

pub mod bessel;
pub mod hermite;
pub mod ik_product;
pub mod legendre;
pub mod olver;
pub mod vsh;

pub use bessel::{bessel_ik, bessel_ik_ladder, bessel_taylor, ScaledIK};
pub use hermite::{hermite, hermite_function, scaled_laguerre};
pub use ik_product::ik_product_derivs;
pub use legendre::{legendre_deriv_at_one, legendre_p, legendre_p_all};
pub use olver::{debye_u, debye_v, ik_uniform_product};
pub use vsh::{vsh_sum, vsh_sum_direct, VshKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecFunError {
    #[error("domain error: {0}")]
    Domain(String),
}
