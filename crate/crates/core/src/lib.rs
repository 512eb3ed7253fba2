//! Spectral solver for the non-Markovian Unruh-Zurek (UZ) and Hu-Paz-Zhang
//! (HPZ) Wigner equations with Hartree (Poisson) coupling.
//!
//! The linear flow is applied exactly through its Gaussian fundamental
//! solution; the nonlinear Hartree term enters through a Duhamel formula
//! solved by Picard iteration on each step.
//!
//! Runnable examples live in `crates/core/examples`:
//!
//! ```text
//! cargo run --release --example coefficients      # memory and kernel coefficients, horizons
//! cargo run --release --example propagate         # exact linear propagation vs analytic Gaussian
//! cargo run --release --example hartree_force     # Poisson solve and the Θ[V] operator
//! cargo run --release --example nonlinear_run     # mild-solution stepping with diagnostics
//! cargo run --release --example hpz_horizon       # HPZ validity horizon and Λ(t) bounds
//! cargo run --release --example oracles           # quadrature / finite-difference cross-checks
//! cargo run --release --example snapshot_io       # CSV + binary snapshot round trip
//! ```

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod hartree;
pub mod memory_coeffs;
pub mod phase_grid;
pub mod propagator;
pub mod reference_oracle;
pub mod scalar;
pub mod stepper;

pub use error::{WError, WResult};
pub use memory_coeffs::{
    characteristic_map, gaussian_params, kernel_coeffs, validity_horizon, CharacteristicMap,
    KernelCoeffs, Model, ModelParams,
};
pub use phase_grid::{Grid, PhaseField};
