//! Independent checks: quadrature against closed forms, finite differences
//! against Taylor constants, direct summation against the spectral propagator.
//!
//! cargo run --release --example oracles

use wmem::memory_coeffs::{uz, uz_abc, uz_tilde};
use wmem::propagator::propagate;
use wmem::reference_oracle::{brute_force_propagate, derivative_at, quad_coefficient, Coefficient, DerivSpec, QuadratureSpec};
use wmem::{Grid, ModelParams, PhaseField};

fn main() -> wmem::WResult<()> {
    let p = ModelParams::uz(0.5, 0.2);
    let spec = QuadratureSpec::default();
    for t in [0.2, 2.0, 10.0] {
        let abc = uz_abc(t, &p)?;
        let tl = uz_tilde(t, &p)?;
        let qa = quad_coefficient(Coefficient::A, t, &p, &spec)?;
        let qt = quad_coefficient(Coefficient::At, t, &p, &spec)?;
        println!("t = {t:>5}: A rel err {:.2e}, Ã rel err {:.2e}", (abc.a - qa).abs() / qa.abs(), (tl.a - qt).abs() / qt.abs());
    }

    // sixth derivative of D at t = 0
    let d6 = derivative_at(|t| uz::disc(t, &p), 6, 0.0, &DerivSpec { h0: 0.4, levels: 8, rel_tol: 1e-6, ..Default::default() })?;
    println!("D⁽⁶⁾(0) by finite differences = {d6:.10e}");

    // direct O(N²) summation of the pushforward on a tiny grid
    let q = ModelParams::uz(0.5, 3.0);
    let g = Grid::new(1, 16, 16, 6.0, 2.0)?;
    let f = PhaseField::from_fn(g, |x, v| {
        (-(x[0] - 0.3).powi(2) / 2.0).exp() * (1.0 + (std::f64::consts::PI * v[0] / 2.0).cos()).powi(6)
    });
    let a = propagate(&f, 1.6, &q)?;
    let b = brute_force_propagate(&f, 1.6, &q, 6, 2)?;
    let num: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.values.iter().map(|y| y * y).sum();
    println!("spectral vs direct sum: rel L² {:.3e}", (num / den).sqrt());
    Ok(())
}
