//! Nonlinear run with Picard stepping and the per-step diagnostics.
//!
//! cargo run --release --example nonlinear_run

use wmem::diagnostics::format_flags;
use wmem::stepper::{run, StepConfig};
use wmem::{Grid, ModelParams, PhaseField};

fn main() -> wmem::WResult<()> {
    let p = ModelParams::uz(0.5, 0.2);
    let grid = Grid::new(1, 64, 64, 13.0, 8.0)?;
    let w0 = PhaseField::gaussian(grid, 1.0, &[0.0], &[0.0], 1.0, 1.0);
    let cfg = StepConfig { dt: 1.0 / 32.0, coupling: 1.0, ..Default::default() };
    let traj = run(&p, &cfg, 1.0, &w0)?;

    println!("{:>7} {:>14} {:>10} {:>10} {:>6} {:>10}  flags", "t", "mass", "E", "‖∇V‖", "iters", "cont res");
    for r in traj.records.iter().step_by(4) {
        println!(
            "{:>7.4} {:>14.12} {:>10.6} {:>10.6} {:>6} {:>10.3e}  {}",
            r.t,
            r.q,
            r.e,
            r.grad_v_l2,
            r.picard_iters,
            r.continuity_residual,
            format_flags(r.flags)
        );
    }
    let worst = traj.ratios.iter().copied().fold(0.0, f64::max);
    println!("status {:?}, worst Picard contraction ratio {worst:.4}", traj.status);
    for (k, e) in traj.monitor.energy_residuals().iter().enumerate().step_by(8) {
        println!("exchange identity residual #{k}: {:.3e} (scale {:.3e})", e.exchange, e.scale);
    }
    Ok(())
}
