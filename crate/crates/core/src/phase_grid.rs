//! Phase-space grids, fields, moments and mixed norms.
//!
//! Storage order: the flat value array is indexed `[ξ_1, .., ξ_d, x_1, .., x_d]`
//! row-major (last axis fastest). Viewed as a matrix it has `nxi^d` rows (one
//! per momentum point) of `nx^d` position samples each. Axis `a` runs over
//! `-L + i·(2L/n)`, `i = 0..n`, periodic.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{WError, WResult};
use crate::fft;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub nx: usize,
    pub nxi: usize,
    pub lx: f64,
    pub lxi: f64,
}

impl Grid {
    pub fn new(dim: usize, nx: usize, nxi: usize, lx: f64, lxi: f64) -> WResult<Self> {
        if !(1..=3).contains(&dim) {
            return Err(WError::InvalidParam(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        if nx < 2 || nxi < 2 {
            return Err(WError::InvalidParam("need at least 2 points per axis".into()));
        }
        if !(lx > 0.0 && lxi > 0.0 && lx.is_finite() && lxi.is_finite()) {
            return Err(WError::InvalidParam("half-widths must be positive".into()));
        }
        Ok(Grid { dim, nx, nxi, lx, lxi })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.lx / self.nx as f64
    }

    pub fn dxi(&self) -> f64 {
        2.0 * self.lxi / self.nxi as f64
    }

    /// Position cell volume Δx^d.
    pub fn cell_x(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Momentum cell volume Δξ^d.
    pub fn cell_xi(&self) -> f64 {
        self.dxi().powi(self.dim as i32)
    }

    /// Number of position points nx^d.
    pub fn npos(&self) -> usize {
        self.nx.pow(self.dim as u32)
    }

    /// Number of momentum points nxi^d.
    pub fn nmom(&self) -> usize {
        self.nxi.pow(self.dim as u32)
    }

    pub fn len(&self) -> usize {
        self.npos() * self.nmom()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.nxi; self.dim];
        s.extend(std::iter::repeat_n(self.nx, self.dim));
        s
    }

    pub fn pos_shape(&self) -> Vec<usize> {
        vec![self.nx; self.dim]
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.lx + i as f64 * self.dx()
    }

    pub fn xi(&self, j: usize) -> f64 {
        -self.lxi + j as f64 * self.dxi()
    }

    /// Wavenumber of DFT position m along a position axis.
    pub fn k(&self, m: usize) -> f64 {
        fft::signed_mode(m, self.nx) as f64 * PI / self.lx
    }

    /// Wavenumber of DFT position m along a momentum axis.
    pub fn eta(&self, m: usize) -> f64 {
        fft::signed_mode(m, self.nxi) as f64 * PI / self.lxi
    }

    pub fn k_nyquist(&self) -> f64 {
        PI / self.dx()
    }

    pub fn eta_nyquist(&self) -> f64 {
        PI / self.dxi()
    }

    /// Per-axis indices of a flat position index.
    pub fn pos_index(&self, c: usize) -> [usize; 3] {
        unflatten(c, self.nx, self.dim)
    }

    /// Per-axis indices of a flat momentum (row) index.
    pub fn mom_index(&self, r: usize) -> [usize; 3] {
        unflatten(r, self.nxi, self.dim)
    }

    pub fn same_as(&self, other: &Grid) -> WResult<()> {
        if self == other {
            Ok(())
        } else {
            Err(WError::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Row-major multi-index of `flat` in an `n^dim` cube (unused slots zero).
pub fn unflatten(mut flat: usize, n: usize, dim: usize) -> [usize; 3] {
    let mut out = [0; 3];
    for a in (0..dim).rev() {
        out[a] = flat % n;
        flat /= n;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub time: f64,
}

impl PhaseField {
    pub fn zeros(grid: Grid) -> Self {
        PhaseField { grid, values: vec![0.0; grid.len()], time: 0.0 }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>, time: f64) -> WResult<Self> {
        if values.len() != grid.len() {
            return Err(WError::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(PhaseField { grid, values, time })
    }

    /// Sample `f(x, ξ)` (slices of length d) on the grid.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64], &[f64]) -> f64) -> Self {
        let d = grid.dim;
        let (np, nm) = (grid.npos(), grid.nmom());
        let mut values = vec![0.0; grid.len()];
        let mut x = [0.0; 3];
        let mut xi = [0.0; 3];
        for r in 0..nm {
            let mi = grid.mom_index(r);
            for a in 0..d {
                xi[a] = grid.xi(mi[a]);
            }
            for c in 0..np {
                let pi = grid.pos_index(c);
                for a in 0..d {
                    x[a] = grid.x(pi[a]);
                }
                values[r * np + c] = f(&x[..d], &xi[..d]);
            }
        }
        PhaseField { grid, values, time: 0.0 }
    }

    /// Product Gaussian with given mass, centre and per-axis standard deviations.
    pub fn gaussian(grid: Grid, mass: f64, x0: &[f64], xi0: &[f64], sigma_x: f64, sigma_xi: f64) -> Self {
        let d = grid.dim;
        let norm = mass / ((2.0 * PI).powi(d as i32) * (sigma_x * sigma_xi).powi(d as i32));
        PhaseField::from_fn(grid, |x, xi| {
            let mut e = 0.0;
            for a in 0..d {
                let u = (x[a] - x0.get(a).copied().unwrap_or(0.0)) / sigma_x;
                let v = (xi[a] - xi0.get(a).copied().unwrap_or(0.0)) / sigma_xi;
                e += u * u + v * v;
            }
            norm * (-0.5 * e).exp()
        })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn to_complex(&self) -> Vec<C64> {
        self.values.iter().map(|&v| C64::new(v, 0.0)).collect()
    }

    /// Rows of position samples, one per momentum point.
    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.grid.npos())
    }

    pub fn axpy(&mut self, alpha: f64, other: &PhaseField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }
}

/// n(x) = ∫ w dξ.
pub fn density(field: &PhaseField) -> Vec<f64> {
    let g = &field.grid;
    let mut n = vec![0.0; g.npos()];
    for row in field.rows() {
        for (acc, &v) in n.iter_mut().zip(row) {
            *acc += v;
        }
    }
    let w = g.cell_xi();
    n.iter_mut().for_each(|v| *v *= w);
    n
}

/// j(x) = ∫ ξ w dξ, one array per component.
pub fn current(field: &PhaseField) -> Vec<Vec<f64>> {
    let g = &field.grid;
    let mut j = vec![vec![0.0; g.npos()]; g.dim];
    for (r, row) in field.rows().enumerate() {
        let mi = g.mom_index(r);
        for (a, ja) in j.iter_mut().enumerate() {
            let xi = g.xi(mi[a]);
            for (acc, &v) in ja.iter_mut().zip(row) {
                *acc += xi * v;
            }
        }
    }
    let w = g.cell_xi();
    j.iter_mut().for_each(|ja| ja.iter_mut().for_each(|v| *v *= w));
    j
}

/// Q = ∫∫ w.
pub fn mass(field: &PhaseField) -> f64 {
    // same summation order as lqp_norm(1, 1)
    let cx = field.grid.cell_x();
    field.rows().map(|row| row.iter().sum::<f64>() * cx).sum::<f64>() * field.grid.cell_xi()
}

/// E = ½ ∫∫ |ξ|² w.
pub fn kinetic_energy(field: &PhaseField) -> f64 {
    let g = &field.grid;
    let mut acc = 0.0;
    for (r, row) in field.rows().enumerate() {
        let mi = g.mom_index(r);
        let xi2: f64 = (0..g.dim).map(|a| g.xi(mi[a]).powi(2)).sum();
        acc += xi2 * row.iter().sum::<f64>();
    }
    0.5 * acc * g.cell_x() * g.cell_xi()
}

/// ∫∫ |x|² w.
pub fn position_second_moment(field: &PhaseField) -> f64 {
    let g = &field.grid;
    let x2: Vec<f64> = (0..g.npos())
        .map(|c| {
            let pi = g.pos_index(c);
            (0..g.dim).map(|a| g.x(pi[a]).powi(2)).sum()
        })
        .collect();
    let mut acc = 0.0;
    for row in field.rows() {
        acc += row.iter().zip(&x2).map(|(v, w)| v * w).sum::<f64>();
    }
    acc * g.cell_x() * g.cell_xi()
}

/// ∫ x·j dx.
pub fn position_current_moment(field: &PhaseField) -> f64 {
    let g = &field.grid;
    let j = current(field);
    let mut acc = 0.0;
    for c in 0..g.npos() {
        let pi = g.pos_index(c);
        for (a, ja) in j.iter().enumerate() {
            acc += g.x(pi[a]) * ja[c];
        }
    }
    acc * g.cell_x()
}

/// ∫ j dx per component.
pub fn total_current(field: &PhaseField) -> Vec<f64> {
    let cx = field.grid.cell_x();
    current(field).iter().map(|ja| ja.iter().sum::<f64>() * cx).collect()
}

/// Mixed norm (∫(∫|f|^p dx)^{q/p} dξ)^{1/q}; `f64::INFINITY` selects a maximum.
pub fn lqp_norm(field: &PhaseField, q: f64, p: f64) -> f64 {
    let g = &field.grid;
    let (cx, cxi) = (g.cell_x(), g.cell_xi());
    let inner = field.rows().map(|row| {
        if p.is_infinite() {
            row.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        } else if p == 1.0 {
            row.iter().map(|v| v.abs()).sum::<f64>() * cx
        } else if p == 2.0 {
            (row.iter().map(|v| v * v).sum::<f64>() * cx).sqrt()
        } else {
            (row.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cx).powf(1.0 / p)
        }
    });
    if q.is_infinite() {
        inner.fold(0.0f64, f64::max)
    } else if q == 1.0 {
        inner.sum::<f64>() * cxi
    } else {
        (inner.map(|v| v.powf(q)).sum::<f64>() * cxi).powf(1.0 / q)
    }
}

/// L^p norm of a position-space array.
pub fn lp_norm_pos(grid: &Grid, n: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        n.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        (n.iter().map(|v| v.abs().powf(p)).sum::<f64>() * grid.cell_x()).powf(1.0 / p)
    }
}

/// Forward DFT over all phase-space axes.
pub fn transform(field: &PhaseField) -> Vec<C64> {
    let mut data = field.to_complex();
    let shape = field.grid.shape();
    let axes: Vec<usize> = (0..shape.len()).collect();
    fft::fft_axes(&mut data, &shape, &axes, false);
    data
}

/// Inverse of [`transform`], keeping the real part.
pub fn inverse_transform(grid: Grid, mut data: Vec<C64>, time: f64) -> PhaseField {
    let shape = grid.shape();
    let axes: Vec<usize> = (0..shape.len()).collect();
    fft::fft_axes(&mut data, &shape, &axes, true);
    PhaseField { grid, values: data.iter().map(|v| v.re).collect(), time }
}
