//! Unruh-Zurek coefficients (free particle, zero temperature).
//!
//! Every quantity is a combination `sum c s^p e^{alpha s} + poly(s)` in the
//! reduced time `s = 2 gamma t`. The closed forms cancel to high order at
//! small `s`, so below `SERIES_SWITCH` they are summed as Taylor series whose
//! coefficients are generated from the same term list, with the known
//! vanishing low orders dropped.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::ModelParams;

pub const SERIES_SWITCH: f64 = 1.0;
pub const SERIES_TERMS: usize = 30;

pub(crate) struct ExpPoly {
    /// (c, p, alpha) for c s^p e^{alpha s}
    exps: &'static [(f64, u32, f64)],
    poly: &'static [f64],
    /// first Taylor order that does not vanish identically
    lead: usize,
    cache: OnceLock<Vec<f64>>,
}

impl ExpPoly {
    const fn new(exps: &'static [(f64, u32, f64)], poly: &'static [f64], lead: usize) -> Self {
        ExpPoly { exps, poly, lead, cache: OnceLock::new() }
    }

    fn direct(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &(c, p, alpha) in self.exps {
            acc += c * s.powi(p as i32) * (alpha * s).exp();
        }
        acc + self.poly.iter().rev().fold(0.0, |a, &ck| a * s + ck)
    }

    /// Taylor coefficients; entries below `lead` are exactly zero.
    pub(crate) fn coeffs(&self) -> &[f64] {
        self.cache.get_or_init(|| {
            let mut out = vec![0.0; SERIES_TERMS];
            for (n, slot) in out.iter_mut().enumerate().skip(self.lead) {
                let mut acc = self.poly.get(n).copied().unwrap_or(0.0);
                for &(c, p, alpha) in self.exps {
                    let p = p as usize;
                    if n >= p {
                        let m = n - p;
                        let mut term = c;
                        for k in 1..=m {
                            term *= alpha / k as f64;
                        }
                        acc += term;
                    }
                }
                *slot = acc;
            }
            out
        })
    }

    fn series(&self, s: f64) -> f64 {
        let c = self.coeffs();
        c.iter().rev().fold(0.0, |a, &ck| a * s + ck)
    }

    pub(crate) fn eval(&self, s: f64) -> f64 {
        if s.abs() < SERIES_SWITCH {
            self.series(s)
        } else {
            self.direct(s)
        }
    }

    #[cfg(test)]
    pub(crate) fn eval_direct(&self, s: f64) -> f64 {
        self.direct(s)
    }

    /// Sum of term magnitudes: the conditioning scale of the direct form.
    #[cfg(test)]
    pub(crate) fn scale(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &(c, p, alpha) in self.exps {
            acc += (c * s.powi(p as i32) * (alpha * s).exp()).abs();
        }
        acc + self.poly.iter().enumerate().map(|(k, c)| (c * s.powi(k as i32)).abs()).sum::<f64>()
    }

    #[cfg(test)]
    pub(crate) fn eval_series(&self, s: f64) -> f64 {
        self.series(s)
    }
}

/// e^{-s} + s - 1
pub(crate) static P_D: ExpPoly = ExpPoly::new(&[(1.0, 0, -1.0)], &[-1.0, 1.0], 2);
/// 4 e^{-s} + (2s - 10) e^s + e^{2s} + 10 s - s^2 + 5
pub(crate) static P_A: ExpPoly = ExpPoly::new(
    &[(4.0, 0, -1.0), (2.0, 1, 1.0), (-10.0, 0, 1.0), (1.0, 0, 2.0)],
    &[5.0, 10.0, -1.0],
    4,
);
/// (s - 6) e^s + e^{2s} + 3 s + 5
pub(crate) static P_B: ExpPoly =
    ExpPoly::new(&[(1.0, 1, 1.0), (-6.0, 0, 1.0), (1.0, 0, 2.0)], &[5.0, 3.0], 3);
/// 4 gamma F1 = 10 e^{-s} + e^{-2s} - 11 + 2s (3 e^{-s} + 3 - s/2)
pub(crate) static P_F1: ExpPoly = ExpPoly::new(
    &[(10.0, 0, -1.0), (1.0, 0, -2.0), (6.0, 1, -1.0)],
    &[-11.0, 6.0, -1.0],
    4,
);
/// F2 = 2 e^{-s} + e^{-2s} - 3 + s (3 e^{-s} + 1)
pub(crate) static P_F2: ExpPoly = ExpPoly::new(
    &[(2.0, 0, -1.0), (1.0, 0, -2.0), (3.0, 1, -1.0)],
    &[-3.0, 1.0],
    3,
);
/// H = (3s - s^2/2 - 5) e^{2s} + (2s - s^2 + 11) e^s + e^{-s} - 5s(1 + s/2) - 7
pub(crate) static P_H: ExpPoly = ExpPoly::new(
    &[
        (3.0, 1, 2.0),
        (-0.5, 2, 2.0),
        (-5.0, 0, 2.0),
        (2.0, 1, 1.0),
        (-1.0, 2, 1.0),
        (11.0, 0, 1.0),
        (1.0, 0, -1.0),
    ],
    &[-7.0, -5.0, -2.5],
    6,
);

/// I1'(0) = ½ ln(1 + Γ²/(4γ²)).
pub fn i1p0(p: &ModelParams) -> f64 {
    0.5 * (p.cutoff * p.cutoff / (4.0 * p.gamma * p.gamma)).ln_1p()
}

#[inline]
fn reduced(t: f64, p: &ModelParams) -> f64 {
    2.0 * p.gamma * t
}

/// (c, d); defined for every real t (analytic continuation for t < 0).
pub fn memory(t: f64, p: &ModelParams) -> (f64, f64) {
    let s = reduced(t, p);
    let i = i1p0(p);
    let g = p.gamma;
    let c = -(8.0 * g * g / PI) * i * (-s).exp_m1();
    let d = (4.0 * g / PI) * i * P_D.eval(s);
    (c, d)
}

pub fn abc(t: f64, p: &ModelParams) -> (f64, f64, f64) {
    let s = reduced(t, p);
    let i = i1p0(p);
    let g = p.gamma;
    let a = i / (2.0 * g * PI) * P_A.eval(s);
    let b = -(2.0 / PI) * i * P_B.eval(s);
    let em = s.exp_m1();
    let c = (2.0 * g / PI) * i * em * em;
    (a, b, c)
}

pub fn tilde(t: f64, p: &ModelParams) -> (f64, f64, f64) {
    let s = reduced(t, p);
    let i = i1p0(p);
    let g = p.gamma;
    let at = (2.0 / PI) * i * P_F1.eval(s) / (4.0 * g);
    let bt = -(2.0 / PI) * i * P_F2.eval(s);
    let em = (-s).exp_m1();
    let ct = (2.0 * g / PI) * i * em * em;
    (at, bt, ct)
}

/// F1(t) and F2(t) as printed (F1 includes the 1/(4γ) factor).
pub fn f1_f2(t: f64, p: &ModelParams) -> (f64, f64) {
    let s = reduced(t, p);
    (P_F1.eval(s) / (4.0 * p.gamma), P_F2.eval(s))
}

/// H_UZ(t).
pub fn h_uz(t: f64, p: &ModelParams) -> f64 {
    P_H.eval(reduced(t, p))
}

/// D = 4AC - B² = (16/π²) I² H.
pub fn disc(t: f64, p: &ModelParams) -> f64 {
    let i = i1p0(p);
    16.0 / (PI * PI) * i * i * h_uz(t, p)
}

/// 4 At Ct - Bt² = e^{-4γt} D.
pub fn tilde_disc(t: f64, p: &ModelParams) -> f64 {
    (-2.0 * reduced(t, p)).exp() * disc(t, p)
}

/// m1 = (1 - e^{-2γt})/(2γ), m2 = e^{-2γt}.
pub fn shear(t: f64, p: &ModelParams) -> (f64, f64) {
    let s = reduced(t, p);
    (-(-s).exp_m1() / (2.0 * p.gamma), (-s).exp())
}

/// Reduced time at which H_UZ (hence 4AtCt - Bt²) first vanishes.
pub fn positivity_root() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| {
        let (mut lo, mut hi) = (1.5, 2.5);
        debug_assert!(P_H.direct(lo) > 0.0 && P_H.direct(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if P_H.direct(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

/// Last time at which the UZ kernel is a genuine Gaussian.
pub fn positivity_horizon(p: &ModelParams) -> f64 {
    positivity_root() / (2.0 * p.gamma)
}
