//! Direct-sum operators on tiny grids.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::quadrature::Neumaier;
use crate::error::{WError, WResult};
use crate::memory_coeffs::{characteristic_map, kernel_coeffs, ModelParams};
use crate::phase_grid::{Grid, PhaseField};
use crate::propagator::eval_g0;

fn signed(m: usize, n: usize) -> i64 {
    if m < n.div_ceil(2) {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

fn nyquist(m: usize, n: usize) -> bool {
    n % 2 == 0 && 2 * m == n
}

/// Samples of the trigonometric interpolant of a d = 1 field on an r-fold
/// refined grid, indexed `[b * (r nx) + a]` for (z_a, v_b).
fn refine_1d(field: &PhaseField, r: usize) -> Vec<f64> {
    let g = field.grid;
    let (nx, nv) = (g.nx, g.nxi);
    let (kx, kv) = (PI / g.lx, PI / g.lxi);
    // direct 2-d DFT, phases relative to the first sample
    let mut hat = vec![C64::default(); nx * nv];
    for l in 0..nv {
        for m in 0..nx {
            let mut acc = Neumaier::default();
            for j in 0..nv {
                for i in 0..nx {
                    let ph = -2.0 * PI * ((m * i) as f64 / nx as f64 + (l * j) as f64 / nv as f64);
                    acc.add(C64::from_polar(field.values[j * nx + i], ph));
                }
            }
            hat[l * nx + m] = acc.value();
        }
    }
    let (rx, rv) = (r * nx, r * nv);
    let mut half = vec![C64::default(); nv * rx];
    for l in 0..nv {
        for a in 0..rx {
            let z = a as f64 * g.dx() / r as f64;
            let mut acc = Neumaier::default();
            for m in 0..nx {
                acc.add(hat[l * nx + m] * C64::from_polar(1.0, signed(m, nx) as f64 * kx * z));
            }
            half[l * rx + a] = acc.value();
        }
    }
    let mut out = vec![0.0; rv * rx];
    for b in 0..rv {
        let v = b as f64 * g.dxi() / r as f64;
        for a in 0..rx {
            let mut acc = Neumaier::default();
            for l in 0..nv {
                acc.add(half[l * rx + a] * C64::from_polar(1.0, signed(l, nv) as f64 * kv * v));
            }
            out[b * rx + a] = acc.value().re / (nx * nv) as f64;
        }
    }
    out
}

/// G(t)[f] by direct quadrature of ∫ G₀(t, (x, ξ) − Φ(z, v)) f(z, v) d(z, v).
///
/// The source is the trigonometric interpolant of the samples, integrated on
/// an `refine`-fold finer grid; G₀ is periodised over `images` copies of the
/// box in each direction. d = 1 and at most 32 points per axis.
pub fn brute_force_propagate(
    field: &PhaseField,
    t: f64,
    params: &ModelParams,
    refine: usize,
    images: usize,
) -> WResult<PhaseField> {
    let g = field.grid;
    if g.dim != 1 || g.nx > 32 || g.nxi > 32 {
        return Err(WError::InvalidParam("brute force needs d = 1 and ≤ 32 points per axis".into()));
    }
    if refine == 0 {
        return Err(WError::InvalidParam("refine ≥ 1".into()));
    }
    if t == 0.0 {
        return Ok(field.clone());
    }
    let coeffs = kernel_coeffs(t, params, 1)?;
    if !coeffs.is_positive() {
        return Err(WError::NotPositive { t, disc: coeffs.tilde_disc });
    }
    let map = characteristic_map(t, params)?;
    let src = refine_1d(field, refine);
    let (rx, rv) = (refine * g.nx, refine * g.nxi);
    let (dz, dv) = (g.dx() / refine as f64, g.dxi() / refine as f64);
    let pts: Vec<(f64, f64, f64)> = (0..rv)
        .flat_map(|b| (0..rx).map(move |a| (a, b)))
        .map(|(a, b)| {
            let (z, v) = (-g.lx + a as f64 * dz, -g.lxi + b as f64 * dv);
            let (x, xi) = map.forward(z, v);
            (x, xi, src[b * rx + a] * dz * dv)
        })
        .collect();
    let p = images as i64;
    let mut out = vec![0.0; g.len()];
    for j in 0..g.nxi {
        for i in 0..g.nx {
            let (x, xi) = (g.x(i), g.xi(j));
            let mut acc = Neumaier::default();
            for &(px, pxi, w) in &pts {
                if w == 0.0 {
                    continue;
                }
                let mut k = 0.0;
                for ix in -p..=p {
                    for iv in -p..=p {
                        let dx = x - px + 2.0 * g.lx * ix as f64;
                        let dxi = xi - pxi + 2.0 * g.lxi * iv as f64;
                        k += eval_g0(&coeffs, &[dx], &[dxi]);
                    }
                }
                acc.add_real(k * w);
            }
            out[j * g.nx + i] = acc.value().re;
        }
    }
    Ok(PhaseField { grid: g, values: out, time: field.time + t })
}

fn multi(mut c: usize, n: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; d];
    for a in (0..d).rev() {
        out[a] = c % n;
        c /= n;
    }
    out
}

/// Θ[V]w by direct summation of
/// (i/(2π)^d) ∫∫ (V(x + η/2) − V(x − η/2)) w(x, ξ') e^{−i(ξ − ξ')·η} dξ' dη
/// on the grid, V taken as its band-limited interpolant (Nyquist modes
/// dropped) and the Nyquist η dropped.
pub fn brute_force_theta(field: &PhaseField, v: &[f64]) -> WResult<PhaseField> {
    let g: Grid = field.grid;
    let d = g.dim;
    let (np, nm) = (g.npos(), g.nmom());
    if v.len() != np {
        return Err(WError::GridMismatch("potential length differs from the position grid".into()));
    }
    let (kx, keta) = (PI / g.lx, PI / g.lxi);
    let vhat: Vec<C64> = (0..np)
        .map(|kc| {
            let km = multi(kc, g.nx, d);
            let mut acc = Neumaier::default();
            for (c, &val) in v.iter().enumerate() {
                let ci = multi(c, g.nx, d);
                let ph: f64 = (0..d).map(|a| -2.0 * PI * (km[a] * ci[a]) as f64 / g.nx as f64).sum();
                acc.add(C64::from_polar(val, ph));
            }
            acc.value()
        })
        .collect();
    let keep: Vec<usize> = (0..np).filter(|&kc| !multi(kc, g.nx, d).iter().any(|&m| nyquist(m, g.nx))).collect();
    let interp = |y: &[f64]| -> f64 {
        let mut acc = Neumaier::default();
        for &kc in &keep {
            let km = multi(kc, g.nx, d);
            let ph: f64 = (0..d).map(|a| signed(km[a], g.nx) as f64 * kx * (y[a] + g.lx)).sum();
            acc.add(vhat[kc] * C64::from_polar(1.0, ph));
        }
        acc.value().re / np as f64
    };
    let rows: Vec<usize> = (0..nm).filter(|&r| !multi(r, g.nxi, d).iter().any(|&m| nyquist(m, g.nxi))).collect();
    let eta = |r: usize| -> Vec<f64> { multi(r, g.nxi, d).iter().map(|&m| signed(m, g.nxi) as f64 * keta).collect() };
    let xi = |r: usize| -> Vec<f64> { multi(r, g.nxi, d).iter().map(|&m| g.xi(m)).collect() };
    let pref = C64::new(0.0, 1.0) / (2.0 * g.lxi).powi(d as i32) * g.cell_xi();
    let mut out = vec![0.0; g.len()];
    for c in 0..np {
        let x: Vec<f64> = multi(c, g.nx, d).iter().map(|&i| g.x(i)).collect();
        let dv: Vec<f64> = rows
            .iter()
            .map(|&r| {
                let e = eta(r);
                let plus: Vec<f64> = (0..d).map(|a| x[a] + 0.5 * e[a]).collect();
                let minus: Vec<f64> = (0..d).map(|a| x[a] - 0.5 * e[a]).collect();
                interp(&plus) - interp(&minus)
            })
            .collect();
        for j in 0..nm {
            let xj = xi(j);
            let mut acc = Neumaier::default();
            for (ri, &r) in rows.iter().enumerate() {
                let e = eta(r);
                for jp in 0..nm {
                    let xp = xi(jp);
                    let ph: f64 = -(0..d).map(|a| (xj[a] - xp[a]) * e[a]).sum::<f64>();
                    acc.add(C64::from_polar(dv[ri] * field.values[jp * np + c], ph));
                }
            }
            out[j * np + c] = (pref * acc.value()).re;
        }
    }
    Ok(PhaseField { grid: g, values: out, time: field.time })
}
