//! HPZ validity horizon: Λ(t) stays below 2 up to t*, and runs clamp at 2t*.
//!
//! cargo run --release --example hpz_horizon

use wmem::diagnostics::format_flags;
use wmem::memory_coeffs::HpzConsts;
use wmem::stepper::{run, StepConfig};
use wmem::{validity_horizon, Grid, ModelParams, PhaseField};

fn main() -> wmem::WResult<()> {
    let p = ModelParams::hpz(1.0, 0.1, 0.5, 0.05);
    let (ts, tss) = validity_horizon(&p);
    let h: HpzConsts<f64> = (&p).into();
    println!("t* = {ts:.6}, √3 t* = {tss:.6}");
    for f in [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0] {
        let fl = h.flow(f * ts);
        println!("t = {:>8.5}  κ = {:>9.6}  Λ = {:>9.6}  Λ/κ = {:>9.6}", f * ts, fl.kappa, fl.lambda(), fl.lambda() / fl.kappa);
    }

    let grid = Grid::new(1, 32, 32, 13.0, 8.0)?;
    let w0 = PhaseField::gaussian(grid, 1.0, &[0.0], &[0.0], 1.0, 1.0);
    let cfg = StepConfig { dt: 0.0625, ..Default::default() };
    let traj = run(&p, &cfg, 4.0, &w0)?;
    let last = traj.records.last().unwrap();
    println!(
        "requested t = 4: stopped at t = {:.6}, status {:?} (exit code {}), final flags {}",
        last.t,
        traj.status,
        traj.status.exit_code(),
        format_flags(last.flags)
    );
    Ok(())
}
