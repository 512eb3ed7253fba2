//! Mild-solution time stepping.
//!
//! Restarted at t_n the Duhamel formula reads
//! `w(t_n + dt) = G(dt)w(t_n) − Σ_j ω_j G(dt − s_j) N(w(t_n + s_j))` with
//! `N(w) = Θ[V(w)]w` and midpoint nodes `s_j = (j + ½)dt/M`.
//!
//! The default [`Scheme::Global`] keeps the origin at t = 0, so
//! `w(t_{n+1}) = G(t_{n+1})w₀ − Σ_{past nodes} ω G(t_{n+1} − s)N(s) − (current step)`
//! with elapsed-time coefficients throughout; with Θ off it is the exact
//! linear solution. Within a step the node states are linear in s between
//! w(t_n) and the end-of-step iterate, which is found by Picard iteration.

use std::collections::HashMap;

use crate::diagnostics::{DiagnosticsRecord, Monitor, RecordFlags};
use crate::error::{WError, WResult};
use crate::hartree::{self, PoissonMode, Potential};
use crate::memory_coeffs::{characteristic_map, kernel_coeffs, validity_horizon, CharacteristicMap, KernelCoeffs, Model, ModelParams};
use crate::phase_grid::{self, PhaseField};
use crate::propagator;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
    /// relative tolerance on ‖Δ‖_{L^{1,1}} + ‖Δ‖_{L^{1,2}} between iterates
    pub picard_tol: f64,
    pub picard_max: usize,
    /// Duhamel nodes per step
    pub quad_nodes: usize,
    /// with Θ off the run is the exact linear evolution
    pub nonlinear: bool,
    /// ΔV = coupling·n
    pub coupling: f64,
    pub poisson: PoissonMode,
    pub scheme: Scheme,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            dt: 1.0 / 64.0,
            picard_tol: 1e-10,
            picard_max: 50,
            quad_nodes: 2,
            nonlinear: true,
            coupling: 1.0,
            poisson: PoissonMode::Periodic,
            scheme: Scheme::Global,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> WResult<()> {
        let bad = |m: String| Err(WError::InvalidParam(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.picard_tol > 0.0) {
            return bad(format!("picard_tol must be positive, got {}", self.picard_tol));
        }
        if self.picard_max == 0 || self.quad_nodes == 0 {
            return bad("picard_max and quad_nodes must be at least 1".into());
        }
        if !self.coupling.is_finite() {
            return bad("coupling must be finite".into());
        }
        Ok(())
    }
}

/// Origin of the Duhamel formula.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    /// w(t) = G(t)w₀ − ∫₀ᵗ G(t − s)N(s) ds over the whole history
    #[default]
    Global,
    /// restart at every t_n with coefficients on [0, dt]; cheaper, but the
    /// memory is reset each step so the dt → 0 limit is the memoryless one
    Restart,
}

/// Outcome of one accepted step.
#[derive(Clone, Debug)]
pub struct StepReport {
    pub field: PhaseField,
    pub iters: usize,
    /// successive-difference norms, one per iteration
    pub diffs: Vec<f64>,
    /// largest ratio diffs[k]/diffs[k−1] (0 with fewer than two iterations)
    pub max_ratio: f64,
    pub aliased: bool,
}

fn norm(f: &PhaseField) -> f64 {
    phase_grid::lqp_norm(f, 1.0, 1.0) + phase_grid::lqp_norm(f, 1.0, 2.0)
}

fn diff_norm(a: &PhaseField, b: &PhaseField) -> f64 {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    norm(&d)
}

/// Potential of a field's density.
pub fn potential(field: &PhaseField, coupling: f64, mode: PoissonMode) -> WResult<Potential> {
    let n = phase_grid::density(field);
    match mode {
        PoissonMode::Periodic => Ok(hartree::solve_poisson(&field.grid, &n, coupling)),
        PoissonMode::FreeSpace => hartree::solve_poisson_free(&field.grid, &n, coupling),
    }
}

/// A Duhamel node: time since the origin, weight and N at that node.
#[derive(Clone, Debug)]
struct Node {
    s: f64,
    weight: f64,
    value: PhaseField,
}

/// Integrator state: the Duhamel origin, stored nodes and a cache of
/// propagator coefficients keyed by elapsed time.
#[derive(Clone, Debug)]
pub struct Stepper {
    pub params: ModelParams,
    pub cfg: StepConfig,
    cache: HashMap<u64, (KernelCoeffs, CharacteristicMap)>,
    origin: Option<(f64, PhaseField)>,
    history: Vec<Node>,
}

impl Stepper {
    pub fn new(params: ModelParams, cfg: StepConfig) -> WResult<Self> {
        params.validate()?;
        cfg.validate()?;
        Ok(Stepper { params, cfg, cache: HashMap::new(), origin: None, history: Vec::new() })
    }

    /// G(τ)f, coefficients referenced to elapsed time τ.
    pub fn propagate(&mut self, f: &PhaseField, tau: f64) -> WResult<PhaseField> {
        if tau == 0.0 {
            return Ok(f.clone());
        }
        let dim = f.grid.dim;
        let params = self.params;
        let entry = match self.cache.get(&tau.to_bits()) {
            Some(e) if e.0.dim == dim => *e,
            _ => {
                let e = (kernel_coeffs(tau, &params, dim)?, characteristic_map(tau, &params)?);
                self.cache.insert(tau.to_bits(), e);
                e
            }
        };
        propagator::apply_propagator(f, &entry.0, &entry.1)
    }

    /// N(w) = Θ[V(w)]w and the aliasing flag.
    fn nonlinearity(&self, w: &PhaseField) -> WResult<(PhaseField, bool)> {
        let pot = potential(w, self.cfg.coupling, self.cfg.poisson)?;
        let out = hartree::apply_theta(w, &pot)?;
        Ok((out.field, out.aliased))
    }

    /// Forget the history and take `w` at `t` as the new origin.
    pub fn reset(&mut self, w: &PhaseField, t: f64) {
        self.origin = Some((t, w.clone()));
        self.history.clear();
    }

    /// Advance `w_n` at `t_n` by `dt`. Under [`Scheme::Global`] the state
    /// must come from the previous call (or [`Stepper::reset`]).
    pub fn step_by(&mut self, w_n: &PhaseField, t_n: f64, dt: f64) -> WResult<StepReport> {
        if !w_n.is_finite() {
            return Err(WError::Divergence { t: t_n });
        }
        if self.params.model == Model::Hpz {
            let (ts, _) = validity_horizon(&self.params);
            if dt > ts {
                return Err(WError::Horizon { t: dt, horizon: ts });
            }
        }
        if self.cfg.scheme == Scheme::Restart || self.origin.is_none() {
            self.reset(w_n, t_n);
        }
        let (t_o, w_o) = self.origin.clone().expect("origin set above");
        let tau = t_n + dt - t_o;

        // everything that does not depend on the current step's iterate
        let mut base = self.propagate(&w_o, tau)?;
        let history = std::mem::take(&mut self.history);
        for node in &history {
            let lag = self.propagate(&node.value, tau - node.s)?;
            base.axpy(-node.weight, &lag);
        }
        self.history = history;
        if !base.is_finite() {
            return Err(WError::Divergence { t: t_n + dt });
        }
        if !self.cfg.nonlinear {
            let field = PhaseField { time: t_n + dt, ..base };
            return Ok(StepReport { field, iters: 1, diffs: vec![0.0], max_ratio: 0.0, aliased: false });
        }

        let m = self.cfg.quad_nodes;
        let h = dt / m as f64;
        let frac = |j: usize| (j as f64 + 0.5) / m as f64;
        let s_rel = |j: usize| t_n - t_o + (j as f64 + 0.5) * h;

        let scale = norm(w_n).max(f64::MIN_POSITIVE);
        let mut end = base.clone();
        let mut diffs = Vec::new();
        let mut max_ratio = 0.0f64;
        let mut growing = 0;
        let mut aliased = false;
        for iter in 1..=self.cfg.picard_max {
            // node states linear in s between w_n and the current end iterate
            let mut incr = end.clone();
            incr.axpy(-1.0, w_n);
            let mut nl = Vec::with_capacity(m);
            for j in 0..m {
                let mut u = w_n.clone();
                u.axpy(frac(j), &incr);
                let (v, a) = self.nonlinearity(&u)?;
                aliased |= a;
                nl.push(v);
            }
            let mut new_end = base.clone();
            for (j, v) in nl.iter().enumerate() {
                let lag = self.propagate(v, tau - s_rel(j))?;
                new_end.axpy(-h, &lag);
            }
            if !new_end.is_finite() {
                return Err(WError::Divergence { t: t_n + dt });
            }
            let d = diff_norm(&new_end, &end) / scale;
            if let Some(&prev) = diffs.last() {
                let ratio = if prev > 0.0 { d / prev } else { 0.0 };
                if d > 1e-14 {
                    max_ratio = max_ratio.max(ratio);
                    growing = if ratio >= 1.0 { growing + 1 } else { 0 };
                }
            }
            diffs.push(d);
            end = new_end;
            if d < self.cfg.picard_tol || d < 1e-14 {
                for (j, v) in nl.into_iter().enumerate() {
                    self.history.push(Node { s: s_rel(j), weight: h, value: v });
                }
                let field = PhaseField { time: t_n + dt, ..end };
                return Ok(StepReport { field, iters: iter, diffs, max_ratio, aliased });
            }
            if growing >= 3 {
                return Err(WError::StepTooLarge { t: t_n, ratio: max_ratio });
            }
        }
        Err(WError::PicardNotConverged { t: t_n, iters: self.cfg.picard_max, diff: *diffs.last().unwrap_or(&f64::NAN) })
    }

    pub fn step(&mut self, w_n: &PhaseField, t_n: f64) -> WResult<StepReport> {
        let dt = self.cfg.dt;
        self.step_by(w_n, t_n, dt)
    }
}

/// One step of the mild map with `field` taken as the datum at `t_n`.
pub fn step(field: &PhaseField, t_n: f64, cfg: &StepConfig, params: &ModelParams) -> WResult<PhaseField> {
    let mut s = Stepper::new(*params, *cfg)?;
    s.reset(field, t_n);
    Ok(s.step(field, t_n)?.field)
}

/// How a run ended.
#[derive(Clone, Debug)]
pub enum RunStatus {
    Completed,
    /// HPZ run stopped at 2·t_star instead of the requested end time
    Clamped { requested: f64, reached: f64 },
    /// non-finite values, non-contraction or Picard failure
    Halted { t: f64, reason: String },
}

impl RunStatus {
    /// 0 completed, 2 clamped, 3 halted.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunStatus::Completed => 0,
            RunStatus::Clamped { .. } => 2,
            RunStatus::Halted { .. } => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<DiagnosticsRecord>,
    /// per-step largest Picard difference ratio
    pub ratios: Vec<f64>,
    pub status: RunStatus,
    pub last: PhaseField,
    pub monitor: Monitor,
}

/// Time grid t_n = n·dt up to t_end (last step possibly shorter).
pub fn time_grid(dt: f64, t_end: f64) -> Vec<f64> {
    let n = ((t_end / dt) - 1e-9).ceil().max(0.0) as usize;
    let mut ts: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    ts.push(t_end);
    ts
}

/// Evolve `init` (taken as the state at t = 0) to `t_end`, calling
/// `observe` with every accepted state and its record.
pub fn run_with(
    params: &ModelParams,
    cfg: &StepConfig,
    t_end: f64,
    init: &PhaseField,
    mut observe: impl FnMut(&PhaseField, &DiagnosticsRecord) -> WResult<()>,
) -> WResult<Trajectory> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(WError::InvalidParam(format!("t_end must be nonnegative, got {t_end}")));
    }
    let mut stepper = Stepper::new(*params, *cfg)?;
    let (ts_star, _) = validity_horizon(params);
    let (t_stop, mut status) = if params.model == Model::Hpz && t_end > 2.0 * ts_star {
        (2.0 * ts_star, RunStatus::Clamped { requested: t_end, reached: 2.0 * ts_star })
    } else {
        (t_end, RunStatus::Completed)
    };
    let times = time_grid(cfg.dt, t_stop);
    let aliased = cfg.nonlinear && hartree::theta_aliasing(&init.grid);
    let horizon_flags = |t: f64| {
        let mut f = RecordFlags::empty();
        if t > ts_star {
            f |= RecordFlags::PAST_HORIZON;
        }
        if aliased {
            f |= RecordFlags::ALIASED;
        }
        f
    };
    let pot_of = |w: &PhaseField| -> WResult<Option<Potential>> {
        if cfg.nonlinear {
            potential(w, cfg.coupling, cfg.poisson).map(Some)
        } else {
            Ok(None)
        }
    };

    let mut monitor = Monitor::new(cfg.coupling);
    let mut w = PhaseField { time: 0.0, ..init.clone() };
    stepper.reset(&w, 0.0);
    let pot = pot_of(&w)?;
    let rec = monitor.observe(&w, 0.0, pot.as_ref(), 0, horizon_flags(0.0));
    observe(&w, &rec)?;
    let mut records = vec![rec];
    let mut ratios = Vec::new();

    for pair in times.windows(2) {
        let (t0, t1) = (pair[0], pair[1]);
        let rep = match stepper.step_by(&w, t0, t1 - t0) {
            Ok(r) => r,
            Err(e @ (WError::Divergence { .. } | WError::StepTooLarge { .. } | WError::PicardNotConverged { .. })) => {
                status = RunStatus::Halted { t: t0, reason: e.to_string() };
                break;
            }
            Err(e) => return Err(e),
        };
        w = rep.field;
        let pot = pot_of(&w)?;
        let mut flags = horizon_flags(t1);
        if rep.aliased {
            flags |= RecordFlags::ALIASED;
        }
        if matches!(status, RunStatus::Clamped { .. }) && t1 == t_stop {
            flags |= RecordFlags::CLAMPED;
        }
        let rec = monitor.observe(&w, t1, pot.as_ref(), rep.iters, flags);
        if !rec.is_finite() {
            status = RunStatus::Halted { t: t1, reason: "non-finite diagnostics".into() };
            break;
        }
        observe(&w, &rec)?;
        records.push(rec);
        ratios.push(rep.max_ratio);
    }
    Ok(Trajectory { records, ratios, status, last: w, monitor })
}

pub fn run(params: &ModelParams, cfg: &StepConfig, t_end: f64, init: &PhaseField) -> WResult<Trajectory> {
    run_with(params, cfg, t_end, init, |_, _| Ok(()))
}
