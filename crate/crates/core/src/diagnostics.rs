//! Observables along a trajectory: conserved quantities, mixed norms,
//! continuity and energy-exchange residuals, the Lieb-Thirring ratio and a
//! calibrated Gronwall envelope.

use std::f64::consts::PI;

use bitflags::bitflags;
use num_complex::Complex64 as C64;

use crate::fft;
use crate::hartree::Potential;
use crate::phase_grid::{self, Grid, PhaseField};

bitflags! {
    #[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
    pub struct RecordFlags: u32 {
        /// Q or E not positive, so the Lieb-Thirring ratio is meaningless
        const LT_UNDEFINED = 1;
        /// HPZ: t beyond t_star
        const PAST_HORIZON = 1 << 1;
        /// HPZ: run stopped at 2 t_star
        const CLAMPED = 1 << 2;
        /// Θ needs V beyond the periodic box
        const ALIASED = 1 << 3;
        /// some grid values are negative below the floor
        const NEGATIVE = 1 << 4;
        /// Gronwall constant still being calibrated
        const UNCALIBRATED = 1 << 5;
        /// norm above the calibrated envelope
        const ENVELOPE_EXCEEDED = 1 << 6;
    }
}

/// Lower-case flag names joined by '|', empty when no flag is set.
pub fn format_flags(flags: RecordFlags) -> String {
    flags.iter_names().map(|(n, _)| n.to_ascii_lowercase()).collect::<Vec<_>>().join("|")
}

pub const CSV_HEADER: &str =
    "t,Q,E,l11,l12,linf,grad_v_l2,continuity_residual,lt_ratio_p2,picard_iters,envelope,flags";

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub q: f64,
    pub e: f64,
    pub l11: f64,
    pub l12: f64,
    pub linf: f64,
    pub grad_v_l2: f64,
    pub continuity_residual: f64,
    pub lt_ratio_p2: f64,
    pub picard_iters: usize,
    pub envelope: f64,
    pub flags: RecordFlags,
}

impl DiagnosticsRecord {
    /// One CSV row; floats with 17 significant digits.
    pub fn csv_row(&self) -> String {
        let f = |v: f64| format!("{v:.16e}");
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            f(self.t),
            f(self.q),
            f(self.e),
            f(self.l11),
            f(self.l12),
            f(self.linf),
            f(self.grad_v_l2),
            f(self.continuity_residual),
            f(self.lt_ratio_p2),
            self.picard_iters,
            f(self.envelope),
            format_flags(self.flags)
        )
    }

    /// ‖w‖_{L^{1,1}} + ‖w‖_{L^{1,2}}
    pub fn norm_sum(&self) -> f64 {
        self.l11 + self.l12
    }

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.q,
            self.e,
            self.l11,
            self.l12,
            self.linf,
            self.grad_v_l2,
            self.continuity_residual,
            self.lt_ratio_p2,
            self.envelope,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Per-record inputs that do not come from the field itself.
#[derive(Clone, Copy, Debug, Default)]
pub struct RecordAux<'a> {
    pub potential: Option<&'a Potential>,
    pub picard_iters: usize,
    pub continuity_residual: f64,
    pub envelope: f64,
    pub flags: RecordFlags,
}

/// Values below −floor·max|w| raise [`RecordFlags::NEGATIVE`].
pub const NEGATIVITY_FLOOR: f64 = 1e-10;

/// Most negative value relative to max|w| (0 for nonnegative fields).
pub fn negativity(field: &PhaseField) -> f64 {
    let max = field.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = field.values.iter().fold(0.0f64, |m, &v| m.min(v));
    if max > 0.0 {
        -min / max
    } else {
        0.0
    }
}

/// Assemble a record from a field at time t.
pub fn record(field: &PhaseField, t: f64, aux: RecordAux<'_>) -> DiagnosticsRecord {
    let q = phase_grid::mass(field);
    let e = phase_grid::kinetic_energy(field);
    let n = phase_grid::density(field);
    let mut flags = aux.flags;
    let lt = lieb_thirring_ratio(&field.grid, &n, q, e, 2.0);
    let lt_ratio_p2 = match lt {
        Some(v) => v,
        None => {
            flags |= RecordFlags::LT_UNDEFINED;
            0.0
        }
    };
    if negativity(field) > NEGATIVITY_FLOOR {
        flags |= RecordFlags::NEGATIVE;
    }
    DiagnosticsRecord {
        t,
        q,
        e,
        l11: phase_grid::lqp_norm(field, 1.0, 1.0),
        l12: phase_grid::lqp_norm(field, 1.0, 2.0),
        linf: field.values.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        grad_v_l2: aux.potential.map_or(0.0, |p| p.grad_l2),
        continuity_residual: aux.continuity_residual,
        lt_ratio_p2,
        picard_iters: aux.picard_iters,
        envelope: aux.envelope,
        flags,
    }
}

/// ‖n‖_p / (Q^r E^{1−r}) with r = (3 − p)/(2p); `None` when Q or E is not positive.
pub fn lieb_thirring_ratio(grid: &Grid, n: &[f64], q: f64, e: f64, p: f64) -> Option<f64> {
    if q <= 0.0 || e <= 0.0 || !(1.0..=3.0).contains(&p) {
        return None;
    }
    let r = (3.0 - p) / (2.0 * p);
    Some(phase_grid::lp_norm_pos(grid, n, p) / (q.powf(r) * e.powf(1.0 - r)))
}

/// Spectral divergence of a vector field on the position grid (Nyquist dropped).
pub fn divergence(grid: &Grid, j: &[Vec<f64>]) -> Vec<f64> {
    let shape = grid.pos_shape();
    let axes: Vec<usize> = (0..grid.dim).collect();
    let mut acc = vec![C64::default(); grid.npos()];
    for (a, ja) in j.iter().enumerate() {
        let mut hat: Vec<C64> = ja.iter().map(|&v| C64::new(v, 0.0)).collect();
        fft::fft_axes(&mut hat, &shape, &axes, false);
        for (c, (s, h)) in acc.iter_mut().zip(&hat).enumerate() {
            let idx = phase_grid::unflatten(c, grid.nx, grid.dim);
            if (0..grid.dim).any(|b| fft::is_nyquist(idx[b], grid.nx)) {
                continue;
            }
            let k = fft::signed_mode(idx[a], grid.nx) as f64 * PI / grid.lx;
            *s += h * C64::new(0.0, k);
        }
    }
    fft::fft_axes(&mut acc, &shape, &axes, true);
    acc.iter().map(|v| v.re).collect()
}

/// L² norm of (n₁ − n₀)/dt + ∇·(j₀ + j₁)/2.
pub fn continuity_residual(grid: &Grid, n0: &[f64], n1: &[f64], j0: &[Vec<f64>], j1: &[Vec<f64>], dt: f64) -> f64 {
    let jm: Vec<Vec<f64>> =
        j0.iter().zip(j1).map(|(a, b)| a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()).collect();
    let div = divergence(grid, &jm);
    let s: f64 = n0
        .iter()
        .zip(n1)
        .zip(&div)
        .map(|((a, b), d)| {
            let r = (b - a) / dt + d;
            r * r
        })
        .sum();
    (s * grid.cell_x()).sqrt()
}

/// ∫∇V·j dx.
pub fn work_rate(grid: &Grid, pot: &Potential, j: &[Vec<f64>]) -> f64 {
    let s: f64 = pot.gradient.iter().zip(j).map(|(g, ja)| g.iter().zip(ja).map(|(a, b)| a * b).sum::<f64>()).sum();
    s * grid.cell_x()
}

/// What the energy-exchange check needs from one record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySample {
    pub t: f64,
    /// ‖∇V‖²
    pub grad_sq: f64,
    /// ∫∇V·j
    pub work: f64,
}

/// Residuals of the energy identities over three consecutive samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyResiduals {
    /// ∫∇V·j + (1/(2·coupling)) ∂_t‖∇V‖² at the middle sample, centred difference
    pub exchange: f64,
    /// |∂_t‖∇V‖²| scale, for relative reporting
    pub scale: f64,
}

/// Energy-exchange identity ∫∇V·j = −(1/(2·coupling)) ∂_t‖∇V‖² (ΔV = coupling·n).
pub fn energy_identity_check(window: &[EnergySample; 3], coupling: f64) -> EnergyResiduals {
    let [a, b, c] = window;
    let dgdt = (c.grad_sq - a.grad_sq) / (c.t - a.t);
    EnergyResiduals { exchange: b.work + dgdt / (2.0 * coupling), scale: b.work.abs().max((dgdt / (2.0 * coupling)).abs()) }
}

/// Virial residual ∫n x·∇V − (d/2 − 1)‖∇V‖²/coupling; zero for free-space
/// potentials (in d = 3 the right side is ½‖∇V‖²).
pub fn virial_residual(grid: &Grid, n: &[f64], pot: &Potential, coupling: f64) -> (f64, f64) {
    let mut lhs = 0.0;
    for (c, &nc) in n.iter().enumerate() {
        let i = grid.pos_index(c);
        for a in 0..grid.dim {
            lhs += nc * grid.x(i[a]) * pot.gradient[a][c];
        }
    }
    lhs *= grid.cell_x();
    let rhs = (grid.dim as f64 / 2.0 - 1.0) * pot.grad_l2 * pot.grad_l2 / coupling;
    (lhs, rhs)
}

/// (‖w₀‖_{L^{1,1}} + ‖w₀‖_{L^{1,2}})·exp(C·∫φ), φ = Q^{1/4}E^{3/4}.
pub fn gronwall_envelope(initial_norm: f64, rate: f64, integrand_integral: f64) -> f64 {
    initial_norm * (rate * integrand_integral).exp()
}

/// Running Gronwall envelope with a constant calibrated on the first steps.
#[derive(Clone, Debug)]
pub struct Envelope {
    initial: f64,
    rate: f64,
    integral: f64,
    prev: Option<(f64, f64, f64)>,
    steps: usize,
}

pub const CALIBRATION_STEPS: usize = 10;
const RATE_FLOOR: f64 = 1e-3;

fn lt_integrand(q: f64, e: f64) -> f64 {
    q.max(0.0).powf(0.25) * e.max(0.0).powf(0.75)
}

impl Envelope {
    pub fn new(rec0: &DiagnosticsRecord) -> Self {
        Envelope {
            initial: rec0.norm_sum(),
            rate: RATE_FLOOR,
            integral: 0.0,
            prev: Some((rec0.t, rec0.norm_sum(), lt_integrand(rec0.q, rec0.e))),
            steps: 0,
        }
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn calibrated(&self) -> bool {
        self.steps >= CALIBRATION_STEPS
    }

    /// Fold in a new record; returns the envelope value and updates its flags.
    pub fn update(&mut self, rec: &mut DiagnosticsRecord) -> f64 {
        let phi = lt_integrand(rec.q, rec.e);
        let norm = rec.norm_sum();
        if let Some((t0, n0, phi0)) = self.prev {
            let dt = rec.t - t0;
            let inc = 0.5 * (phi + phi0) * dt;
            if !self.calibrated() && dt > 0.0 && n0 > 0.0 && norm > 0.0 && inc > 0.0 {
                let growth = (norm / n0).ln();
                self.rate = self.rate.max(2.0 * growth / inc);
            }
            self.integral += inc;
        }
        self.prev = Some((rec.t, norm, phi));
        self.steps += 1;
        let value = gronwall_envelope(self.initial, self.rate, self.integral);
        rec.envelope = value;
        if !self.calibrated() {
            rec.flags |= RecordFlags::UNCALIBRATED;
        } else if norm > value * (1.0 + 1e-12) {
            rec.flags |= RecordFlags::ENVELOPE_EXCEEDED;
        }
        value
    }
}

/// Stateful per-trajectory bookkeeping: continuity residual against the
/// previous record, envelope and energy samples.
#[derive(Clone, Debug)]
pub struct Monitor {
    coupling: f64,
    prev: Option<(f64, Vec<f64>, Vec<Vec<f64>>)>,
    envelope: Option<Envelope>,
    samples: Vec<EnergySample>,
}

impl Monitor {
    pub fn new(coupling: f64) -> Self {
        Monitor { coupling, prev: None, envelope: None, samples: Vec::new() }
    }

    pub fn observe(
        &mut self,
        field: &PhaseField,
        t: f64,
        potential: Option<&Potential>,
        picard_iters: usize,
        flags: RecordFlags,
    ) -> DiagnosticsRecord {
        let grid = field.grid;
        let n = phase_grid::density(field);
        let j = phase_grid::current(field);
        let continuity = match &self.prev {
            Some((t0, n0, j0)) if t > *t0 => continuity_residual(&grid, n0, &n, j0, &j, t - t0),
            _ => 0.0,
        };
        let aux = RecordAux { potential, picard_iters, continuity_residual: continuity, envelope: 0.0, flags };
        let mut rec = record(field, t, aux);
        match &mut self.envelope {
            None => {
                let env = Envelope::new(&rec);
                rec.envelope = env.initial();
                rec.flags |= RecordFlags::UNCALIBRATED;
                self.envelope = Some(env);
            }
            Some(env) => {
                env.update(&mut rec);
            }
        }
        if let Some(p) = potential {
            self.samples.push(EnergySample { t, grad_sq: p.grad_l2 * p.grad_l2, work: work_rate(&grid, p, &j) });
        }
        self.prev = Some((t, n, j));
        rec
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn envelope(&self) -> Option<&Envelope> {
        self.envelope.as_ref()
    }

    pub fn energy_samples(&self) -> &[EnergySample] {
        &self.samples
    }

    /// Exchange residuals over every interior sample.
    pub fn energy_residuals(&self) -> Vec<EnergyResiduals> {
        self.samples.windows(3).map(|w| energy_identity_check(&[w[0], w[1], w[2]], self.coupling)).collect()
    }
}
