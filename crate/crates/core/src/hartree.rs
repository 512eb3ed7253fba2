//! Self-consistent potential and the Weyl force operator Θ[V].
//!
//! Conventions: ΔV = coupling·n, so V̂(k) = −coupling·n̂(k)/|k|² with the
//! zero mode removed (neutralising background on the torus). Θ acts in the
//! ξ-Fourier variable η as multiplication by −i(V(x + η/2) − V(x − η/2)),
//! which makes ∫Θw dξ = 0 and ∫ξ Θw dξ = n∇V.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{WError, WResult};
use crate::fft;
use crate::phase_grid::{Grid, PhaseField};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PoissonMode {
    /// periodic box, zero mode removed
    #[default]
    Periodic,
    /// isolated charges in d = 3 via a truncated Green's function on a padded grid
    FreeSpace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub grid: Grid,
    pub mode: PoissonMode,
    pub values: Vec<f64>,
    /// one array per component
    pub gradient: Vec<Vec<f64>>,
    /// ‖∇V‖ over the box (periodic) or over all space (free-space, as −∫V n)
    pub grad_l2: f64,
}

impl Potential {
    pub fn zero(grid: Grid) -> Self {
        let n = grid.npos();
        Potential {
            grid,
            mode: PoissonMode::Periodic,
            values: vec![0.0; n],
            gradient: vec![vec![0.0; n]; grid.dim],
            grad_l2: 0.0,
        }
    }
}

fn pos_axes(dim: usize) -> Vec<usize> {
    (0..dim).collect()
}

fn wavevector(grid: &Grid, c: usize, nx: usize, lx: f64) -> [f64; 3] {
    let idx = crate::phase_grid::unflatten(c, nx, grid.dim);
    let mut k = [0.0; 3];
    for a in 0..grid.dim {
        k[a] = fft::signed_mode(idx[a], nx) as f64 * PI / lx;
    }
    k
}

fn any_nyquist(c: usize, nx: usize, dim: usize) -> bool {
    let idx = crate::phase_grid::unflatten(c, nx, dim);
    (0..dim).any(|a| fft::is_nyquist(idx[a], nx))
}

/// Spectral gradient of a periodic array on an `n^dim` grid of half-width `l`.
fn spectral_gradient(hat: &[C64], grid: &Grid, n: usize, l: f64) -> Vec<Vec<f64>> {
    let shape = vec![n; grid.dim];
    (0..grid.dim)
        .map(|a| {
            let mut g: Vec<C64> = hat
                .iter()
                .enumerate()
                .map(|(c, v)| {
                    if any_nyquist(c, n, grid.dim) {
                        C64::default()
                    } else {
                        v * C64::new(0.0, wavevector(grid, c, n, l)[a])
                    }
                })
                .collect();
            fft::fft_axes(&mut g, &shape, &pos_axes(grid.dim), true);
            g.iter().map(|v| v.re).collect()
        })
        .collect()
}

/// Periodic Poisson solve, ΔV = coupling·n.
pub fn solve_poisson(grid: &Grid, n: &[f64], coupling: f64) -> Potential {
    let shape = grid.pos_shape();
    let axes = pos_axes(grid.dim);
    let mut hat: Vec<C64> = n.iter().map(|&v| C64::new(v, 0.0)).collect();
    fft::fft_axes(&mut hat, &shape, &axes, false);
    for (c, v) in hat.iter_mut().enumerate() {
        let k = wavevector(grid, c, grid.nx, grid.lx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        *v = if k2 == 0.0 { C64::default() } else { -*v * coupling / k2 };
    }
    let gradient = spectral_gradient(&hat, grid, grid.nx, grid.lx);
    let mut vals = hat;
    fft::fft_axes(&mut vals, &shape, &axes, true);
    let cx = grid.cell_x();
    let grad_l2 = (gradient.iter().flatten().map(|g| g * g).sum::<f64>() * cx).sqrt();
    Potential {
        grid: *grid,
        mode: PoissonMode::Periodic,
        values: vals.iter().map(|v| v.re).collect(),
        gradient,
        grad_l2,
    }
}

const PAD: usize = 4;

/// Free-space Poisson solve in d = 3: V = −coupling/(4π|x|) ∗ n for n
/// supported in the box. The Green's function is truncated at the box
/// diameter R, whose transform (1 − cos R|k|)/|k|² is smooth, and the
/// convolution is done on a grid padded by a factor 4.
pub fn solve_poisson_free(grid: &Grid, n: &[f64], coupling: f64) -> WResult<Potential> {
    if grid.dim != 3 {
        return Err(WError::InvalidParam("free-space Poisson solve needs dim = 3".into()));
    }
    let (nx, np) = (grid.nx, grid.nx * PAD);
    let lp = grid.lx * PAD as f64;
    let r = 2.0 * 3f64.sqrt() * grid.lx;
    let shape = vec![np; 3];
    let axes = pos_axes(3);
    // box sample i sits at padded index i + offset
    let off = (np - nx) / 2;
    let mut hat = vec![C64::default(); np * np * np];
    for c in 0..grid.npos() {
        let i = crate::phase_grid::unflatten(c, nx, 3);
        hat[((i[0] + off) * np + i[1] + off) * np + i[2] + off] = C64::new(n[c], 0.0);
    }
    fft::fft_axes(&mut hat, &shape, &axes, false);
    hat.par_iter_mut().enumerate().for_each(|(c, v)| {
        let k = wavevector(grid, c, np, lp);
        let km = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        let g = if km == 0.0 { r * r / 2.0 } else { (1.0 - (r * km).cos()) / (km * km) };
        *v *= -coupling * g;
    });
    let pgrad = spectral_gradient(&hat, grid, np, lp);
    fft::fft_axes(&mut hat, &shape, &axes, true);
    let pick = |c: usize| {
        let i = crate::phase_grid::unflatten(c, nx, 3);
        ((i[0] + off) * np + i[1] + off) * np + i[2] + off
    };
    let values: Vec<f64> = (0..grid.npos()).map(|c| hat[pick(c)].re).collect();
    let gradient: Vec<Vec<f64>> =
        pgrad.iter().map(|g| (0..grid.npos()).map(|c| g[pick(c)]).collect()).collect();
    // ∫|∇V|² over R³ = −∫V ΔV = −coupling ∫V n
    let vn: f64 = values.iter().zip(n).map(|(v, m)| v * m).sum::<f64>() * grid.cell_x();
    Ok(Potential {
        grid: *grid,
        mode: PoissonMode::FreeSpace,
        values,
        gradient,
        grad_l2: (-vn * coupling).max(0.0).sqrt(),
    })
}

/// δV(x, η) = V(x + η/2) − V(x − η/2) on the phase grid layout (rows = η).
/// The Nyquist modes of V̂ and the Nyquist η rows are dropped.
pub fn delta_v(grid: &Grid, pot: &Potential) -> Vec<f64> {
    let shape = grid.pos_shape();
    let axes = pos_axes(grid.dim);
    let np = grid.npos();
    let mut vhat: Vec<C64> = pot.values.iter().map(|&v| C64::new(v, 0.0)).collect();
    fft::fft_axes(&mut vhat, &shape, &axes, false);
    let ks: Vec<[f64; 3]> = (0..np).map(|c| wavevector(grid, c, grid.nx, grid.lx)).collect();
    let nyq: Vec<bool> = (0..np).map(|c| any_nyquist(c, grid.nx, grid.dim)).collect();
    let mut out = vec![0.0; grid.len()];
    out.par_chunks_mut(np).enumerate().for_each(|(row, dst)| {
        let mi = grid.mom_index(row);
        if (0..grid.dim).any(|a| fft::is_nyquist(mi[a], grid.nxi)) {
            return;
        }
        let eta: Vec<f64> = (0..grid.dim).map(|a| grid.eta(mi[a])).collect();
        if eta.iter().all(|&e| e == 0.0) {
            return;
        }
        let mut buf: Vec<C64> = (0..np)
            .map(|c| {
                if nyq[c] {
                    return C64::default();
                }
                let ke: f64 = (0..grid.dim).map(|a| ks[c][a] * eta[a]).sum();
                vhat[c] * C64::new(0.0, 2.0 * (0.5 * ke).sin())
            })
            .collect();
        let inv = fft::plan(grid.nx, true);
        if grid.dim == 1 {
            inv.process(&mut buf);
            buf.iter_mut().for_each(|v| *v /= grid.nx as f64);
        } else {
            fft::fft_axes(&mut buf, &shape, &axes, true);
        }
        for (d, v) in dst.iter_mut().zip(&buf) {
            *d = v.re;
        }
    });
    out
}

#[derive(Clone, Debug)]
pub struct ThetaOutput {
    pub field: PhaseField,
    /// the largest η/2 shift exceeds the position half-width
    pub aliased: bool,
    /// max |Im| / max |Re| before taking the real part
    pub imag_residue: f64,
}

/// True when the η-grid asks for V at shifts beyond the periodic box.
pub fn theta_aliasing(grid: &Grid) -> bool {
    grid.eta_nyquist() / 2.0 > grid.lx
}

/// Θ[V]w evaluated spectrally in ξ.
pub fn apply_theta(field: &PhaseField, pot: &Potential) -> WResult<ThetaOutput> {
    let grid = field.grid;
    if pot.grid.dim != grid.dim || pot.grid.nx != grid.nx || pot.grid.lx != grid.lx {
        return Err(WError::GridMismatch("potential and field position grids differ".into()));
    }
    let dv = delta_v(&grid, pot);
    apply_theta_with(field, &dv)
}

/// Θ with a precomputed δV (see [`delta_v`]).
pub fn apply_theta_with(field: &PhaseField, dv: &[f64]) -> WResult<ThetaOutput> {
    let grid = field.grid;
    if dv.len() != grid.len() {
        return Err(WError::GridMismatch("δV has the wrong length".into()));
    }
    let shape = grid.shape();
    let axes: Vec<usize> = (0..grid.dim).collect();
    let mut data = field.to_complex();
    fft::fft_axes(&mut data, &shape, &axes, false);
    data.par_iter_mut().zip(dv.par_iter()).for_each(|(v, &d)| *v *= C64::new(0.0, -d));
    fft::fft_axes(&mut data, &shape, &axes, true);
    let re_max = data.iter().fold(0.0f64, |m, v| m.max(v.re.abs()));
    let im_max = data.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    Ok(ThetaOutput {
        field: PhaseField { grid, values: data.iter().map(|v| v.re).collect(), time: field.time },
        aliased: theta_aliasing(&grid),
        imag_residue: if re_max > 0.0 { im_max / re_max } else { im_max },
    })
}

/// Value of the trigonometric interpolant of `v` at the point `y`.
fn trig_value(grid: &Grid, vhat: &[C64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (c, h) in vhat.iter().enumerate() {
        if any_nyquist(c, grid.nx, grid.dim) {
            continue;
        }
        let k = wavevector(grid, c, grid.nx, grid.lx);
        let ph: f64 = (0..grid.dim).map(|a| k[a] * (y[a] + grid.lx)).sum();
        acc += (h * C64::from_polar(1.0, ph)).re;
    }
    acc / grid.npos() as f64
}

/// Discrete convolution kernel H(x, ζ) with Θ[V]w(x, ξ_j) = Σ_m H(x, ζ_m) w(x, ξ_{j−m}) Δξ^d.
/// Row m (per-axis index m_a) holds the periodic offset ζ = m·Δξ. Built by
/// direct sums, so it is slow: meant for cross-checks on tiny grids.
pub fn h_kernel(grid: &Grid, pot: &Potential) -> Vec<f64> {
    let shape = grid.pos_shape();
    let mut vhat: Vec<C64> = pot.values.iter().map(|&v| C64::new(v, 0.0)).collect();
    fft::fft_axes(&mut vhat, &shape, &pos_axes(grid.dim), false);
    let (np, nm) = (grid.npos(), grid.nmom());
    let mut dv = vec![0.0; grid.len()];
    for r in 0..nm {
        let mi = grid.mom_index(r);
        if (0..grid.dim).any(|a| fft::is_nyquist(mi[a], grid.nxi)) {
            continue;
        }
        for c in 0..np {
            let pi = grid.pos_index(c);
            let plus: Vec<f64> = (0..grid.dim).map(|a| grid.x(pi[a]) + 0.5 * grid.eta(mi[a])).collect();
            let minus: Vec<f64> = (0..grid.dim).map(|a| grid.x(pi[a]) - 0.5 * grid.eta(mi[a])).collect();
            dv[r * np + c] = trig_value(grid, &vhat, &plus) - trig_value(grid, &vhat, &minus);
        }
    }
    let norm = 1.0 / (2.0 * grid.lxi).powi(grid.dim as i32);
    let mut h = vec![0.0; grid.len()];
    for m in 0..nm {
        let zi = grid.mom_index(m);
        for r in 0..nm {
            let ei = grid.mom_index(r);
            let ph: f64 = (0..grid.dim)
                .map(|a| grid.eta(ei[a]) * zi[a] as f64 * grid.dxi())
                .sum();
            // Re[−iδV e^{iηζ}] = δV sin(ηζ)
            let s = ph.sin();
            for c in 0..np {
                h[m * np + c] += dv[r * np + c] * s * norm;
            }
        }
    }
    h
}

/// H ∗_ξ w by direct double sum with the kernel from [`h_kernel`].
pub fn convolve_h(field: &PhaseField, h: &[f64]) -> PhaseField {
    let g = field.grid;
    let (np, nm) = (g.npos(), g.nmom());
    let mut out = vec![0.0; g.len()];
    for j in 0..nm {
        let ji = g.mom_index(j);
        for m in 0..nm {
            let mi = g.mom_index(m);
            let mut src = 0;
            for a in 0..g.dim {
                src = src * g.nxi + (ji[a] + g.nxi - mi[a]) % g.nxi;
            }
            for c in 0..np {
                out[j * np + c] += h[m * np + c] * field.values[src * np + c] * g.cell_xi();
            }
        }
    }
    PhaseField { grid: g, values: out, time: field.time }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_grid::{current, density, PhaseField};
    use proptest::prelude::*;

    fn grid1(nx: usize, nxi: usize) -> Grid {
        Grid::new(1, nx, nxi, PI * 2.0, 6.0).unwrap()
    }

    #[test]
    fn constant_density_gives_zero_potential() {
        let g = grid1(16, 8);
        let p = solve_poisson(&g, &vec![3.0; 16], 1.0);
        assert!(p.values.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn single_mode_potential() {
        let g = grid1(32, 8);
        let k0 = 3.0 * PI / g.lx;
        let n: Vec<f64> = (0..32).map(|i| (k0 * g.x(i)).cos()).collect();
        let p = solve_poisson(&g, &n, 1.0);
        for i in 0..32 {
            assert!((p.values[i] + (k0 * g.x(i)).cos() / (k0 * k0)).abs() < 1e-14);
            assert!((p.gradient[0][i] - (k0 * g.x(i)).sin() / k0).abs() < 1e-14);
        }
    }

    #[test]
    fn theta_of_cosine_potential_is_shift_difference() {
        // V = cos(k0 x) ⇒ Θw = sin(k0 x)[w(ξ + k0/2) − w(ξ − k0/2)]
        let g = Grid::new(1, 16, 64, 4.0, 8.0).unwrap();
        let k0 = 2.0 * PI / g.lx;
        let pot = Potential {
            values: (0..16).map(|i| (k0 * g.x(i)).cos()).collect(),
            ..Potential::zero(g)
        };
        let w = |x: f64, xi: f64| (-(xi - 0.3).powi(2)).exp() * (1.0 + 0.2 * (PI * x / g.lx).cos());
        let f = PhaseField::from_fn(g, |x, xi| w(x[0], xi[0]));
        let out = apply_theta(&f, &pot).unwrap();
        let mut err: f64 = 0.0;
        for r in 0..64 {
            for c in 0..16 {
                let (x, xi) = (g.x(c), g.xi(r));
                let exact = (k0 * x).sin() * (w(x, xi + k0 / 2.0) - w(x, xi - k0 / 2.0));
                err = err.max((out.field.values[r * 16 + c] - exact).abs());
            }
        }
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn theta_moments() {
        let g = Grid::new(1, 32, 64, 8.0, 10.0).unwrap();
        let f = PhaseField::gaussian(g, 1.0, &[0.4], &[0.5], 1.0, 0.8);
        let pot = solve_poisson(&g, &density(&f), 1.0);
        let th = apply_theta(&f, &pot).unwrap();
        assert!(th.imag_residue < 1e-12);
        let n = density(&f);
        let j = current(&f);
        let m0 = density(&th.field);
        let m1 = current(&th.field);
        let tot: f64 = n.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let gmax = pot.gradient[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for c in 0..32 {
            assert!(m0[c].abs() < 1e-10 * tot.max(1.0));
            assert!((m1[0][c] - n[c] * pot.gradient[0][c]).abs() < 1e-8 * tot * gmax);
        }
        // second moment: ∫ξ²Θw = 2 j·∇V
        let mut m2 = vec![0.0; 32];
        for r in 0..64 {
            for c in 0..32 {
                m2[c] += g.xi(r).powi(2) * th.field.values[r * 32 + c] * g.dxi();
            }
        }
        for c in 0..32 {
            assert!((m2[c] - 2.0 * j[0][c] * pot.gradient[0][c]).abs() < 1e-8, "{c}");
        }
    }

    #[test]
    fn h_kernel_matches_spectral_theta() {
        let g = Grid::new(1, 8, 8, 3.0, 2.5).unwrap();
        let f = PhaseField::from_fn(g, |x, xi| (-(x[0] * x[0]) - 0.7 * (xi[0] - 0.2).powi(2)).exp());
        let pot = solve_poisson(&g, &density(&f), 1.0);
        let th = apply_theta(&f, &pot).unwrap();
        let h = h_kernel(&g, &pot);
        let direct = convolve_h(&f, &h);
        let scale = th.field.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in th.field.values.iter().zip(&direct.values) {
            assert!((a - b).abs() < 1e-12 * scale.max(1e-300) + 1e-15);
        }
    }

    #[test]
    fn aliasing_flag() {
        assert!(!theta_aliasing(&Grid::new(1, 16, 16, 8.0, 8.0).unwrap()));
        assert!(theta_aliasing(&Grid::new(1, 16, 64, 4.0, 8.0).unwrap()));
    }

    #[test]
    fn zero_potential_zero_kernel() {
        let g = grid1(8, 8);
        assert!(h_kernel(&g, &Potential::zero(g)).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn free_space_virial_identity() {
        // ∫ n x·∇V = ½ ‖∇V‖² in three dimensions
        let g = Grid::new(3, 24, 2, 4.0, 1.0).unwrap();
        let s: f64 = 0.6;
        let n: Vec<f64> = (0..g.npos())
            .map(|c| {
                let i = g.pos_index(c);
                let r2: f64 = (0..3).map(|a| g.x(i[a]).powi(2)).sum();
                (-r2 / (2.0 * s * s)).exp()
            })
            .collect();
        let p = solve_poisson_free(&g, &n, 1.0).unwrap();
        let mut lhs = 0.0;
        for c in 0..g.npos() {
            let i = g.pos_index(c);
            for a in 0..3 {
                lhs += n[c] * g.x(i[a]) * p.gradient[a][c];
            }
        }
        lhs *= g.cell_x();
        let rhs = 0.5 * p.grad_l2 * p.grad_l2;
        assert!((lhs - rhs).abs() < 1e-6 * rhs, "{lhs} {rhs}");
    }

    proptest! {
        #[test]
        fn theta_linear_and_odd_in_v(a in -2.0f64..2.0, b in -1.0f64..1.0) {
            let g = Grid::new(1, 8, 16, 3.0, 4.0).unwrap();
            let f = PhaseField::from_fn(g, |x, xi| (-(x[0] - b).powi(2) - xi[0] * xi[0]).exp());
            let pot = Potential { values: (0..8).map(|i| (g.x(i) * a).sin() + b * (PI * g.x(i) / 3.0).cos()).collect(), ..Potential::zero(g) };
            let neg = Potential { values: pot.values.iter().map(|v| -v).collect(), ..pot.clone() };
            let t1 = apply_theta(&f, &pot).unwrap().field;
            let t2 = apply_theta(&f, &neg).unwrap().field;
            let mut f2 = f.clone();
            f2.values.iter_mut().for_each(|v| *v *= a);
            let t3 = apply_theta(&f2, &pot).unwrap().field;
            for i in 0..g.len() {
                prop_assert!((t1.values[i] + t2.values[i]).abs() < 1e-13);
                prop_assert!((t3.values[i] - a * t1.values[i]).abs() < 1e-12);
            }
        }
    }
}
