//! Exact application of the linear UZ/HPZ flow,
//! `G(t)[f] = G₀(t) ∗ (Φ_t)_# f`, and closed-form moments of the result.

mod resample;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{WError, WResult};
use crate::fft;
use crate::memory_coeffs::{characteristic_map, kernel_coeffs, CharacteristicMap, KernelCoeffs, ModelParams};
use crate::phase_grid::{self, PhaseField};

pub use resample::pushforward_exact;

/// How the affine map is applied to the sampled field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Resampling {
    /// shear/scale/shear factorisation, exact for band-limited data
    #[default]
    Exact,
    /// separable 4-point interpolation of f̂ at mapped frequencies
    Cubic,
}

/// G₀(x, ξ) = g_d exp(-g_a|x|² + g_b x·ξ - g_c|ξ|²).
pub fn eval_g0(coeffs: &KernelCoeffs, x: &[f64], xi: &[f64]) -> f64 {
    let (mut xx, mut xk, mut kk) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(xi) {
        xx += a * a;
        xk += a * b;
        kk += b * b;
    }
    coeffs.g_d * (-coeffs.g_a * xx + coeffs.g_b * xk - coeffs.g_c * kk).exp()
}

pub fn apply_propagator(field: &PhaseField, coeffs: &KernelCoeffs, map: &CharacteristicMap) -> WResult<PhaseField> {
    apply_propagator_with(field, coeffs, map, Resampling::Exact)
}

fn has_kernel(coeffs: &KernelCoeffs) -> bool {
    coeffs.tilde.a != 0.0 || coeffs.tilde.b != 0.0 || coeffs.tilde.c != 0.0
}

fn multiply_ghat(spec: &mut [C64], field: &PhaseField, coeffs: &KernelCoeffs) {
    let g = field.grid;
    let d = g.dim;
    let np = g.npos();
    let k: Vec<f64> = (0..g.nx).map(|m| g.k(m)).collect();
    let eta: Vec<f64> = (0..g.nxi).map(|m| g.eta(m)).collect();
    use rayon::prelude::*;
    spec.par_chunks_mut(np).enumerate().for_each(|(r, row)| {
        let mi = g.mom_index(r);
        for (c, v) in row.iter_mut().enumerate() {
            let pi = g.pos_index(c);
            let mut e = 0.0;
            for a in 0..d {
                e += coeffs.ghat_exponent(k[pi[a]], eta[mi[a]]);
            }
            *v *= e.exp();
        }
    });
}

pub fn apply_propagator_with(
    field: &PhaseField,
    coeffs: &KernelCoeffs,
    map: &CharacteristicMap,
    resampling: Resampling,
) -> WResult<PhaseField> {
    let grid = field.grid;
    if coeffs.dim != grid.dim {
        return Err(WError::GridMismatch(format!(
            "coefficients for d={} applied to a d={} field",
            coeffs.dim, grid.dim
        )));
    }
    let det = map.det();
    if det.abs() < 1e-12 || map.kappa.abs() < 1e-12 {
        return Err(WError::SingularMap { det });
    }
    if coeffs.t == 0.0 && (has_kernel(coeffs) || !map.is_identity()) {
        return Err(WError::SingularTime);
    }
    if coeffs.t > 0.0 && !coeffs.is_positive() {
        return Err(WError::NotPositive { t: coeffs.t, disc: coeffs.tilde_disc });
    }
    let kernel = has_kernel(coeffs);
    if map.is_identity() && !kernel {
        return Ok(PhaseField { time: field.time + coeffs.t, ..field.clone() });
    }
    let shape = grid.shape();
    let axes: Vec<usize> = (0..shape.len()).collect();
    let mut data = field.to_complex();
    match resampling {
        Resampling::Exact => {
            resample::pushforward_exact(&mut data, &grid, map);
            if kernel {
                fft::fft_axes(&mut data, &shape, &axes, false);
                multiply_ghat(&mut data, field, coeffs);
                fft::fft_axes(&mut data, &shape, &axes, true);
            }
        }
        Resampling::Cubic => {
            fft::fft_axes(&mut data, &shape, &axes, false);
            resample::pushforward_cubic_spectral(&mut data, &grid, map);
            if kernel {
                multiply_ghat(&mut data, field, coeffs);
            }
            fft::fft_axes(&mut data, &shape, &axes, true);
        }
    }
    Ok(PhaseField { grid, values: data.iter().map(|v| v.re).collect(), time: field.time + coeffs.t })
}

/// G(t)[field] with coefficients referenced to elapsed time t.
pub fn propagate(field: &PhaseField, t: f64, params: &ModelParams) -> WResult<PhaseField> {
    if t == 0.0 {
        return Ok(field.clone());
    }
    let coeffs = kernel_coeffs(t, params, field.grid.dim)?;
    let map = characteristic_map(t, params)?;
    apply_propagator(field, &coeffs, &map)
}

/// Constants (C₁, C₂) in E[G₀] = g_c⁻¹ (C₁ + C₂ g_d^{-2/d} g_b²), d dimensions.
pub fn g0_energy_constants(dim: usize) -> (f64, f64) {
    let d = dim as f64;
    (d / 4.0, d / (16.0 * PI * PI))
}

/// Kinetic energy of the unit-mass kernel G₀.
pub fn g0_energy(coeffs: &KernelCoeffs) -> f64 {
    if coeffs.t == 0.0 {
        return 0.0;
    }
    let (c1, c2) = g0_energy_constants(coeffs.dim);
    (c1 + c2 * coeffs.g_d.powf(-2.0 / coeffs.dim as f64) * coeffs.g_b * coeffs.g_b) / coeffs.g_c
}

/// Moments of the source field entering the propagated energy.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SourceMoments {
    /// Q = ∫∫ f
    pub mass: f64,
    /// E = ½∫∫ |v|² f
    pub energy: f64,
    /// ∫∫ |z|² f
    pub x2: f64,
    /// ∫ z·j dz
    pub xj: f64,
}

impl SourceMoments {
    pub fn of(field: &PhaseField) -> Self {
        SourceMoments {
            mass: phase_grid::mass(field),
            energy: phase_grid::kinetic_energy(field),
            x2: phase_grid::position_second_moment(field),
            xj: phase_grid::position_current_moment(field),
        }
    }
}

/// E[G(t)[f]] = E[G₀]Q + ν̃²E + ½κ̃²∫|z|²f + ν̃κ̃∫z·j (the cross term with
/// ∫ξG₀ vanishes because G₀ is centred). For UZ this is E[G₀]Q + e^{-4γt}E.
pub fn propagated_energy(m: &SourceMoments, coeffs: &KernelCoeffs, map: &CharacteristicMap) -> f64 {
    if m.mass == 0.0 && m.energy == 0.0 && m.x2 == 0.0 && m.xj == 0.0 {
        return 0.0;
    }
    g0_energy(coeffs) * m.mass
        + map.nu_t * map.nu_t * m.energy
        + 0.5 * map.kappa_t * map.kappa_t * m.x2
        + map.nu_t * map.kappa_t * m.xj
}

/// ‖G₀‖_{L^{q,p}} in closed form (inner L^p in x, outer L^q in ξ):
/// π^{(d/2)(1/p−1/q)} p^{−d/(2p)} q^{−d/(2q)} g_a^{(d/2)(1/q−1/p)} g_d^{1−1/q}.
pub fn g0_mixed_norm(coeffs: &KernelCoeffs, q: f64, p: f64) -> f64 {
    let h = coeffs.dim as f64 / 2.0;
    PI.powf(h * (1.0 / p - 1.0 / q))
        * p.powf(-h / p)
        * q.powf(-h / q)
        * coeffs.g_a.powf(h * (1.0 / q - 1.0 / p))
        * coeffs.g_d.powf(1.0 - 1.0 / q)
}

/// Young exponents (s, r) with 1 + 1/p = 1/r + 1/l and 1 + 1/q = 1/s + 1/m.
pub fn young_exponents(q: f64, p: f64, l: f64, m: f64) -> Option<(f64, f64)> {
    let inv_r = 1.0 + 1.0 / p - 1.0 / l;
    let inv_s = 1.0 + 1.0 / q - 1.0 / m;
    if (0.0..=1.0).contains(&inv_r) && (0.0..=1.0).contains(&inv_s) {
        Some((1.0 / inv_s, 1.0 / inv_r))
    } else {
        None
    }
}

/// Prefactor of the a priori bound ‖G(t)f‖_{L^{q,p}} ≤ P·‖G₀‖_{L^{s,r}}‖f‖_{L^{m,l}}:
/// UZ e^{2dγ(1−1/m)t}; HPZ |κ|^{−d(1/l+1/m)} |κ² − νκ̃|^{−d(1−1/l−1/m)}.
pub fn norm_bound_prefactor(map: &CharacteristicMap, params: &ModelParams, dim: usize, l: f64, m: f64) -> f64 {
    let d = dim as f64;
    match map.model {
        crate::memory_coeffs::Model::Uz => (2.0 * d * params.gamma * (1.0 - 1.0 / m) * map.t).exp(),
        crate::memory_coeffs::Model::Hpz => {
            let k = map.kappa.abs();
            let j = (map.kappa * map.kappa - map.nu * map.kappa_t).abs();
            k.powf(-d * (1.0 / l + 1.0 / m)) * j.powf(-d * (1.0 - 1.0 / l - 1.0 / m))
        }
    }
}

/// Relative L² distance between G(t₁)∘G(t₂) f and G(t₁+t₂) f. The flow is
/// not a semigroup, so this is a measurement, not an error.
pub fn composition_defect(field: &PhaseField, t1: f64, t2: f64, params: &ModelParams) -> WResult<f64> {
    let two = propagate(&propagate(field, t2, params)?, t1, params)?;
    let one = propagate(field, t1 + t2, params)?;
    let num: f64 = two.values.iter().zip(&one.values).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = one.values.iter().map(|a| a * a).sum();
    Ok(if den > 0.0 { (num / den).sqrt() } else { num.sqrt() })
}
