//! Batch front end: configuration, presets, orchestration and output files.
//!
//! Exit status: 0 completed, 2 stopped at the HPZ horizon clamp, 3 halted on
//! divergence or Picard failure, 1 configuration or I/O error.

pub mod config;
pub mod output;
pub mod presets;

pub use config::{parse_config, InitialSpec, Outputs, RunConfig};
pub use output::{read_snapshot, write_snapshot, CsvWriter};

use crate::error::{WError, WResult};
use crate::memory_coeffs::{validity_horizon, Model};
use crate::phase_grid::PhaseField;
use crate::stepper::{self, RunStatus, Trajectory};

pub const THREADS_ENV: &str = "WMEM_THREADS";

pub const USAGE: &str = "\
usage: wmem [--config FILE] [--KEY VALUE | --KEY=VALUE]...
       wmem --list-presets

Runs the mild-solution integrator and writes per-step diagnostics.
Config files hold key=value pairs ('#' comments); flags override the file,
and both override a preset selected with --preset NAME.

keys: model gamma cutoff beta omega delta dim nx nxi lx lxi dt t_end
      picard_tol picard_max quad_nodes nonlinear coupling poisson scheme
      init mass x0 xi0 sigma_x sigma_xi init_snapshot
      csv snapshot snapshot_stride preset threads

exit status: 0 done, 2 clamped at the HPZ horizon, 3 divergence, 1 error
environment: WMEM_THREADS sets the worker count";

/// The initial field described by a configuration.
pub fn initial_field(cfg: &RunConfig) -> WResult<PhaseField> {
    let grid = cfg.grid()?;
    match &cfg.initial {
        InitialSpec::Gaussian { mass, x0, xi0, sigma_x, sigma_xi } => {
            Ok(PhaseField::gaussian(grid, *mass, &[*x0], &[*xi0], *sigma_x, *sigma_xi))
        }
        InitialSpec::Snapshot(path) => {
            let f = read_snapshot(path)?;
            if f.grid != grid {
                return Err(WError::config(
                    None,
                    format!("snapshot {} has grid {:?}, config asks for {:?}", path.display(), f.grid, grid),
                ));
            }
            Ok(f)
        }
    }
}

/// Run a configuration, writing the CSV and snapshots it names.
pub fn execute(cfg: &RunConfig) -> WResult<Trajectory> {
    let init = initial_field(cfg)?;
    let mut csv = match &cfg.outputs.csv {
        Some(p) => Some(CsvWriter::create(p)?),
        None => None,
    };
    let stride = cfg.outputs.snapshot_stride;
    let snap = cfg.outputs.snapshot.clone();
    let mut step = 0usize;
    let traj = stepper::run_with(&cfg.params, &cfg.step, cfg.t_end, &init, |field, rec| {
        if let Some(w) = csv.as_mut() {
            w.write(rec)?;
        }
        if let Some(p) = &snap {
            if stride > 0 && step % stride == 0 {
                write_snapshot(&output::snapshot_path(p, Some(step)), field)?;
            }
        }
        step += 1;
        Ok(())
    })?;
    if let Some(w) = csv {
        w.finish()?;
    }
    if let Some(p) = &snap {
        write_snapshot(&output::snapshot_path(p, None), &traj.last)?;
    }
    Ok(traj)
}

/// Worker count: WMEM_THREADS, then the `threads` key, then all cores.
pub fn thread_count(cfg: &RunConfig) -> WResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(WError::config(None, format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(cfg.threads),
    }
}

/// Run `execute` inside a worker pool of the configured size.
pub fn execute_pooled(cfg: &RunConfig) -> WResult<Trajectory> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cfg)? {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| WError::config(None, format!("thread pool: {e}")))?;
    pool.install(|| execute(cfg))
}

fn load(args: &[String]) -> WResult<RunConfig> {
    let mut text = String::new();
    let mut rest = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" || a.starts_with("--config=") {
            let path = match a.strip_prefix("--config=") {
                Some(p) => p.to_string(),
                None => it.next().cloned().ok_or_else(|| WError::config(None, "--config needs a path"))?,
            };
            text = std::fs::read_to_string(&path).map_err(|e| WError::io(&path, e))?;
        } else {
            rest.push(a.clone());
        }
    }
    parse_config(&text, &rest)
}

/// Entry point shared by the binary and the tests; returns the exit status.
pub fn main_with_args(args: &[String]) -> i32 {
    if args.iter().any(|a| a == "--help" || a == "-h") {
        println!("{USAGE}");
        return 0;
    }
    if args.iter().any(|a| a == "--list-presets") {
        presets::names().for_each(|n| println!("{n}"));
        return 0;
    }
    let cfg = match load(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("wmem: {e}");
            return 1;
        }
    };
    if cfg.model() == Model::Hpz {
        let (ts, _) = validity_horizon(&cfg.params);
        if cfg.t_end > ts {
            eprintln!("wmem: warning: t_end = {} is beyond t_star = {ts:.6}", cfg.t_end);
        }
    }
    match execute_pooled(&cfg) {
        Ok(traj) => {
            match &traj.status {
                RunStatus::Completed => {}
                RunStatus::Clamped { requested, reached } => {
                    eprintln!("wmem: clamped at t = {reached:.6} (2 t_star) instead of {requested}")
                }
                RunStatus::Halted { t, reason } => eprintln!("wmem: halted at t = {t}: {reason}"),
            }
            traj.status.exit_code()
        }
        Err(e) => {
            eprintln!("wmem: {e}");
            1
        }
    }
}

/// Convenience used by examples: run a preset with overrides and no files.
pub fn run_preset(name: &str, overrides: &[(&str, &str)]) -> WResult<Trajectory> {
    let mut flags = vec!["--preset".to_string(), name.to_string()];
    for (k, v) in overrides {
        flags.push(format!("--{k}={v}"));
    }
    execute(&parse_config("", &flags)?)
}
