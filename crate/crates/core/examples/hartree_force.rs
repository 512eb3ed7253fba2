//! Poisson potential of a Gaussian density and the moments of Θ[V]w.
//!
//! cargo run --release --example hartree_force

use wmem::hartree::{apply_theta, solve_poisson, solve_poisson_free, theta_aliasing};
use wmem::phase_grid::{current, density};
use wmem::{Grid, PhaseField};

fn main() -> wmem::WResult<()> {
    let grid = Grid::new(1, 128, 128, 10.0, 10.0)?;
    let w = PhaseField::gaussian(grid, 1.0, &[0.4], &[0.0], 1.0, 0.8);
    let n = density(&w);
    let pot = solve_poisson(&grid, &n, 1.0);
    let th = apply_theta(&w, &pot)?;
    println!("‖∇V‖ = {:.10}, aliasing risk: {}", pot.grad_l2, theta_aliasing(&grid));

    // ∫Θw dξ vanishes and ∫ξ Θw dξ is the force density n∇V
    let m0 = density(&th.field);
    let m1 = current(&th.field);
    let mut worst0 = 0.0f64;
    let mut worst1 = 0.0f64;
    for c in 0..grid.nx {
        worst0 = worst0.max(m0[c].abs());
        worst1 = worst1.max((m1[0][c] - n[c] * pot.gradient[0][c]).abs());
    }
    println!("max |∫Θw dξ| = {worst0:.3e}");
    println!("max |∫ξΘw dξ − n∇V| = {worst1:.3e}");
    for c in (0..grid.nx).step_by(16) {
        println!("x = {:>7.3}  n∇V = {:>12.6e}", grid.x(c), n[c] * pot.gradient[0][c]);
    }

    // free-space potential in three dimensions
    let g3 = Grid::new(3, 24, 2, 4.0, 1.0)?;
    let n3: Vec<f64> = (0..g3.npos())
        .map(|c| {
            let i = g3.pos_index(c);
            (-(0..3).map(|a| g3.x(i[a]).powi(2)).sum::<f64>()).exp()
        })
        .collect();
    let v3 = solve_poisson_free(&g3, &n3, 1.0)?;
    let (lhs, rhs) = wmem::diagnostics::virial_residual(&g3, &n3, &v3, 1.0);
    println!("3D free space virial: ∫n x·∇V = {lhs:.10}, ½‖∇V‖² = {rhs:.10}");
    Ok(())
}
