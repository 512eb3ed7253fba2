//! Exact linear propagation of a Gaussian compared with its analytic evolution.
//!
//! cargo run --release --example propagate

use std::f64::consts::PI;

use wmem::phase_grid::{kinetic_energy, mass};
use wmem::propagator::{propagate, propagated_energy, SourceMoments};
use wmem::{characteristic_map, gaussian_params, kernel_coeffs, Grid, ModelParams, PhaseField};

fn main() -> wmem::WResult<()> {
    let p = ModelParams::uz(0.5, 0.2);
    let grid = Grid::new(1, 128, 128, 13.0, 8.0)?;
    let w0 = PhaseField::gaussian(grid, 1.0, &[0.5], &[0.3], 1.0, 1.0);
    let moments = SourceMoments::of(&w0);
    println!("kernel positive until t = {:.4}", wmem::memory_coeffs::uz_positivity_horizon(&p));

    println!("{:>5} {:>12} {:>12} {:>12}", "t", "mass", "E drift", "rel L2 err");
    for t in [0.25, 0.5, 1.0, 1.5] {
        let w = propagate(&w0, t, &p)?;
        let c = gaussian_params(t, &p, 1)?;
        let m = characteristic_map(t, &p)?;
        let e_closed = propagated_energy(&moments, &c, &m);
        let exact = analytic(grid, &p, t, [0.5, 0.3])?;
        let err = {
            let num: f64 = w.values.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum();
            let den: f64 = exact.iter().map(|b| b * b).sum();
            (num / den).sqrt()
        };
        println!(
            "{t:>5.2} {:>12.9} {:>12.3e} {:>12.3e}",
            mass(&w),
            (kinetic_energy(&w) - e_closed).abs() / e_closed,
            err
        );
    }
    Ok(())
}

/// N(μ, I) pushed through the flow, plus the noise covariance from Ã, B̃, C̃.
fn analytic(g: Grid, p: &ModelParams, t: f64, mu: [f64; 2]) -> wmem::WResult<Vec<f64>> {
    let c = kernel_coeffs(t, p, 1)?;
    let m = characteristic_map(t, p)?;
    let mean = [m.kappa * mu[0] + m.nu * mu[1], m.kappa_t * mu[0] + m.nu_t * mu[1]];
    let sxx = m.kappa * m.kappa + m.nu * m.nu + 2.0 * c.tilde.a;
    let sxv = m.kappa * m.kappa_t + m.nu * m.nu_t + c.tilde.b;
    let svv = m.kappa_t * m.kappa_t + m.nu_t * m.nu_t + 2.0 * c.tilde.c;
    let det = sxx * svv - sxv * sxv;
    Ok(PhaseField::from_fn(g, |x, xi| {
        let (a, b) = (x[0] - mean[0], xi[0] - mean[1]);
        (-0.5 * (svv * a * a - 2.0 * sxv * a * b + sxx * b * b) / det).exp() / (2.0 * PI * det.sqrt())
    })
    .values)
}
