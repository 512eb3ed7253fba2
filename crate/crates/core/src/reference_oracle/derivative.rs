//! Finite-difference derivatives with Richardson extrapolation.

use crate::error::{WError, WResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stencil {
    /// symmetric about t0, error series in h²
    Central,
    /// samples at t0, t0 + h, .., error series in h; for functions defined only for t ≥ t0
    Forward,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivSpec {
    pub stencil: Stencil,
    /// initial step
    pub h0: f64,
    /// rows of the extrapolation table
    pub levels: usize,
    pub rel_tol: f64,
}

impl Default for DerivSpec {
    fn default() -> Self {
        DerivSpec { stencil: Stencil::Central, h0: 0.1, levels: 10, rel_tol: 1e-8 }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn difference(f: &impl Fn(f64) -> f64, k: usize, t0: f64, h: f64, stencil: Stencil) -> f64 {
    let mut acc = 0.0;
    for j in 0..=k {
        let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
        let off = match stencil {
            Stencil::Forward => j as f64,
            Stencil::Central => j as f64 - k as f64 / 2.0,
        };
        acc += sign * binom(k, j) * f(t0 + off * h);
    }
    acc / h.powi(k as i32)
}

/// k-th derivative of `f` at `t0`. Returns the diagonal entry of the
/// Richardson table with the smallest change between consecutive rows and
/// fails when that change exceeds `rel_tol`.
pub fn derivative_at(f: impl Fn(f64) -> f64, k: usize, t0: f64, spec: &DerivSpec) -> WResult<f64> {
    if k == 0 {
        return Ok(f(t0));
    }
    if k > 12 || spec.levels < 2 || spec.h0 <= 0.0 {
        return Err(WError::InvalidParam("derivative order ≤ 12, levels ≥ 2, h0 > 0".into()));
    }
    let p = match spec.stencil {
        Stencil::Central => 2,
        Stencil::Forward => 1,
    };
    let mut prev: Vec<f64> = Vec::new();
    let mut best = (f64::INFINITY, f64::NAN);
    let mut last_diag = f64::NAN;
    for i in 0..spec.levels {
        let h = spec.h0 / 2f64.powi(i as i32);
        let mut row = vec![difference(&f, k, t0, h, spec.stencil)];
        for j in 1..=i {
            let fac = 2f64.powi((p * j) as i32) - 1.0;
            let v = row[j - 1] + (row[j - 1] - prev[j - 1]) / fac;
            row.push(v);
        }
        let diag = row[i];
        if i > 0 {
            let change = (diag - last_diag).abs();
            if change < best.0 {
                best = (change, diag);
            }
        }
        last_diag = diag;
        prev = row;
    }
    let (change, value) = best;
    if change <= spec.rel_tol * value.abs().max(f64::MIN_POSITIVE) {
        Ok(value)
    } else {
        Err(WError::Oracle(format!(
            "extrapolation table did not converge: best change {change:e} at value {value:e}"
        )))
    }
}
