//! Slow, independent reference implementations used to validate the fast
//! paths: quadrature of defining integrals, finite-difference derivatives,
//! direct-sum operators on tiny grids. Everything here is single-threaded
//! and accumulates with compensated summation.

pub mod brute;
pub mod coefficients;
pub mod derivative;
pub mod quadrature;

pub use brute::{brute_force_propagate, brute_force_theta};
pub use coefficients::{
    order_project, quad_coefficient, quad_coefficient_scaled, scaled_consts, uz_i1p0, Coefficient,
};
pub use derivative::{derivative_at, DerivSpec, Stencil};
pub use quadrature::{gauss_legendre, integrate, integrate_complex, Neumaier, QuadratureSpec, Rule};
