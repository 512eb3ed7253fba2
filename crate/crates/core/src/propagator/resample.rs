//! Pushforward of a band-limited field under the linear flow Φ.
//!
//! Exact path: Φ = L·D·U with U an x-shear by ν/κ, D = diag(κ, det/κ) and
//! L a ξ-shear by κ̃/κ. Shears are Fourier phase ramps; scalings evaluate the
//! line's Fourier integral at scaled frequencies by a direct nonuniform DFT,
//! with zero extension beyond the Nyquist band.
//!
//! Cubic path: separable 4-point interpolation of the sampled Fourier
//! transform at Φᵀ(k, η), kept for comparison.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::fft::{self, map_lines};
use crate::memory_coeffs::CharacteristicMap;
use crate::phase_grid::Grid;

fn shear_lines(data: &mut [C64], grid: &Grid, pair: usize, along_x: bool, coef: f64) {
    let shape = grid.shape();
    let d = grid.dim;
    let np = grid.npos();
    let (axis, n, l) = if along_x { (d + pair, grid.nx, grid.lx) } else { (pair, grid.nxi, grid.lxi) };
    let fwd = fft::plan(n, false);
    let inv = fft::plan(n, true);
    let scale = 1.0 / n as f64;
    let g = *grid;
    map_lines(data, &shape, axis, |base, line| {
        // coordinate of the conjugate variable on this line
        let other = if along_x {
            g.xi(g.mom_index(base / np)[pair])
        } else {
            g.x(g.pos_index(base % np)[pair])
        };
        fwd.process(line);
        for (m, v) in line.iter_mut().enumerate() {
            let w = fft::signed_mode(m, n) as f64 * PI / l;
            *v *= C64::from_polar(scale, -w * coef * other);
        }
        inv.process(line);
    });
}

/// Row-major n×n matrix mapping samples to scaled DFT coefficients.
fn scale_matrix(n: usize, l: f64, alpha: f64) -> Vec<C64> {
    let dx = 2.0 * l / n as f64;
    let knyq = PI / dx;
    let mut t = vec![C64::default(); n * n];
    for m in 0..n {
        if fft::is_nyquist(m, n) {
            continue;
        }
        let k = fft::signed_mode(m, n) as f64 * PI / l;
        if (alpha * k).abs() >= knyq {
            continue;
        }
        for j in 0..n {
            let xj = -l + j as f64 * dx;
            t[m * n + j] = C64::from_polar(1.0, -k * l - alpha * k * xj);
        }
    }
    t
}

fn scale_lines(data: &mut [C64], grid: &Grid, pair: usize, along_x: bool, alpha: f64) {
    let shape = grid.shape();
    let (axis, n, l) = if along_x {
        (grid.dim + pair, grid.nx, grid.lx)
    } else {
        (pair, grid.nxi, grid.lxi)
    };
    let t = scale_matrix(n, l, alpha);
    let inv = fft::plan(n, true);
    let scale = 1.0 / n as f64;
    map_lines(data, &shape, axis, |_, line| {
        let src = line.to_vec();
        for (m, v) in line.iter_mut().enumerate() {
            let row = &t[m * n..(m + 1) * n];
            *v = row.iter().zip(&src).map(|(a, b)| a * b).sum::<C64>() * scale;
        }
        inv.process(line);
    });
}

/// Exact band-limited pushforward, in place on real-space samples.
pub fn pushforward_exact(data: &mut [C64], grid: &Grid, map: &CharacteristicMap) {
    if map.is_identity() {
        return;
    }
    let a = map.nu / map.kappa;
    let rho = map.det() / map.kappa;
    let b = map.kappa_t / map.kappa;
    for pair in 0..grid.dim {
        if a != 0.0 {
            shear_lines(data, grid, pair, true, a);
        }
        if map.kappa != 1.0 {
            scale_lines(data, grid, pair, true, map.kappa);
        }
        if rho != 1.0 {
            scale_lines(data, grid, pair, false, rho);
        }
        if b != 0.0 {
            shear_lines(data, grid, pair, false, b);
        }
    }
}

fn keys(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Taps (array index, weight) for interpolating at fractional signed mode u.
fn taps(u: f64, n: usize) -> [(usize, f64); 4] {
    let lo = -(n as i64 / 2);
    let hi = lo + n as i64 - 1;
    let f = u.floor() as i64;
    let mut out = [(0usize, 0.0); 4];
    for (o, slot) in out.iter_mut().enumerate() {
        let s = f - 1 + o as i64;
        if s >= lo && s <= hi {
            *slot = (s.rem_euclid(n as i64) as usize, keys(u - s as f64));
        }
    }
    out
}

/// Cubic interpolation path. `spec` holds the unnormalised DFT of the field;
/// on return it holds the DFT of the pushforward.
pub fn pushforward_cubic_spectral(spec: &mut [C64], grid: &Grid, map: &CharacteristicMap) {
    if map.is_identity() {
        return;
    }
    let d = grid.dim;
    let shape = grid.shape();
    let strides: Vec<usize> = (0..shape.len()).map(|a| shape[a + 1..].iter().product()).collect();
    let (nx, nxi) = (grid.nx, grid.nxi);
    let (dk, deta) = (PI / grid.lx, PI / grid.lxi);
    // continuous-FT phase relative to the DFT: e^{-i k x0}, x0 = -L
    let phase_x = |m: usize| C64::from_polar(1.0, grid.k(m) * grid.lx);
    let phase_xi = |m: usize| C64::from_polar(1.0, grid.eta(m) * grid.lxi);
    for pair in 0..d {
        let (ax_eta, ax_k) = (pair, d + pair);
        let (s_eta, s_k) = (strides[ax_eta], strides[ax_k]);
        let mut plane = vec![C64::default(); nx * nxi];
        for base in 0..spec.len() {
            let idx_eta = (base / s_eta) % nxi;
            let idx_k = (base / s_k) % nx;
            if idx_eta != 0 || idx_k != 0 {
                continue;
            }
            for e in 0..nxi {
                for m in 0..nx {
                    plane[e * nx + m] = spec[base + e * s_eta + m * s_k] * phase_x(m) * phase_xi(e);
                }
            }
            for e in 0..nxi {
                for m in 0..nx {
                    let (k, eta) = (grid.k(m), grid.eta(e));
                    let q = map.kappa * k + map.kappa_t * eta;
                    let p = map.nu * k + map.nu_t * eta;
                    let tk = taps(q / dk, nx);
                    let te = taps(p / deta, nxi);
                    let mut acc = C64::default();
                    for &(ie, we) in &te {
                        if we == 0.0 {
                            continue;
                        }
                        for &(ik, wk) in &tk {
                            if wk != 0.0 {
                                acc += plane[ie * nx + ik] * (we * wk);
                            }
                        }
                    }
                    spec[base + e * s_eta + m * s_k] = acc / (phase_x(m) * phase_xi(e));
                }
            }
        }
    }
}
