//! Quadrature of the defining integrals of the memory and kernel
//! coefficients, and projection onto low orders in the small parameters.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::quadrature::{integrate, integrate_complex, Neumaier, QuadratureSpec};
use crate::error::{WError, WResult};
use crate::memory_coeffs::{HpzConsts, Model, ModelParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coefficient {
    /// memory coefficients a(t), b(t) (HPZ only), c(t), d(t)
    MemA,
    MemB,
    MemC,
    MemD,
    /// Fourier exponent in initial variables
    A,
    B,
    C,
    /// Fourier exponent in final variables
    At,
    Bt,
    Ct,
}

impl Coefficient {
    pub const ALL: [Coefficient; 10] = [
        Coefficient::MemA,
        Coefficient::MemB,
        Coefficient::MemC,
        Coefficient::MemD,
        Coefficient::A,
        Coefficient::B,
        Coefficient::C,
        Coefficient::At,
        Coefficient::Bt,
        Coefficient::Ct,
    ];
}

/// I₁'(0) = ∫₀^Γ θ/(4γ² + θ²) dθ.
pub fn uz_i1p0(p: &ModelParams, spec: &QuadratureSpec) -> WResult<f64> {
    let g2 = 4.0 * p.gamma * p.gamma;
    integrate(|th| th / (g2 + th * th), 0.0, p.cutoff, spec)
}

fn uz_quad(which: Coefficient, t: f64, p: &ModelParams, spec: &QuadratureSpec) -> WResult<f64> {
    let g = p.gamma;
    let i1 = uz_i1p0(p, spec)?;
    let c = move |s: f64| -8.0 * g * g / PI * i1 * (-2.0 * g * s).exp_m1();
    let d = move |s: f64| 4.0 * g / PI * i1 * ((-2.0 * g * s).exp_m1() + 2.0 * g * s);
    let em = |s: f64| (2.0 * g * s).exp_m1();
    let big_a = || -> WResult<f64> {
        Ok(integrate(|s| c(s) * em(s).powi(2), 0.0, t, spec)? / (4.0 * g * g)
            + integrate(|s| d(s) * em(s), 0.0, t, spec)? / (2.0 * g))
    };
    let big_b = || -> WResult<f64> {
        Ok(-integrate(|s| c(s) * (2.0 * g * s).exp() * em(s), 0.0, t, spec)? / g
            - integrate(|s| d(s) * (2.0 * g * s).exp(), 0.0, t, spec)?)
    };
    let big_c = || integrate(|s| c(s) * (4.0 * g * s).exp(), 0.0, t, spec);
    let e2 = (-2.0 * g * t).exp();
    Ok(match which {
        Coefficient::MemA | Coefficient::MemB => {
            return Err(WError::InvalidParam("UZ has no a(t), b(t) coefficients".into()))
        }
        Coefficient::MemC => c(t),
        Coefficient::MemD => d(t),
        Coefficient::A => big_a()?,
        Coefficient::B => big_b()?,
        Coefficient::C => big_c()?,
        // the shear composition collapses to weights in e^{-2γ(t-s)}; integrating
        // those directly avoids the cancellation between A, B and C at small t
        Coefficient::At => {
            let r = move |s: f64| (-2.0 * g * (t - s)).exp_m1();
            integrate(|s| c(s) * r(s).powi(2) / (4.0 * g * g) + d(s) * r(s) / (2.0 * g), 0.0, t, spec)?
        }
        Coefficient::Bt => {
            let r = move |s: f64| (-2.0 * g * (t - s)).exp_m1();
            let w = move |s: f64| (-2.0 * g * (t - s)).exp();
            integrate(|s| -c(s) * w(s) * r(s) / g - d(s) * w(s), 0.0, t, spec)?
        }
        Coefficient::Ct => e2 * e2 * big_c()?,
    })
}

/// HPZ constants with (Γ, Ω) → (εΓ, εΩ).
pub fn scaled_consts(p: &ModelParams, eps: C64) -> HpzConsts<C64> {
    HpzConsts {
        delta: C64::new(p.delta, 0.0),
        cutoff: eps * p.cutoff,
        beta: C64::new(p.beta, 0.0),
        omega: eps * p.omega,
    }
}

/// sin(wτ)/w, continuous at w = 0.
fn sin_over(w: C64, tau: f64) -> C64 {
    let x = w * tau;
    if x.norm() < 1e-6 {
        tau * (1.0 - x * x / 6.0)
    } else {
        x.sin() / w
    }
}

struct HpzTruncated {
    g: C64,
    w: C64,
    dp: C64,
    beta: f64,
}

impl HpzTruncated {
    fn c(&self, s: f64) -> C64 {
        let (g, w) = (self.g, self.w);
        self.dp * g / (6.0 * self.beta) * s * (6.0 - 3.0 * g * s + (g * g - w * w) * s * s)
    }
    fn d(&self, s: f64) -> C64 {
        let (g, w) = (self.g, self.w);
        -self.dp * g / (24.0 * self.beta) * s * s * (12.0 - 8.0 * g * s + (3.0 * g * g - w * w) * s * s)
    }
    fn f(&self, s: f64) -> C64 {
        let (g, w) = (self.g, self.w);
        1.0 - w * w * s * s / 2.0 + self.dp * g * g * s.powi(3) / 3.0 - self.dp * g.powi(3) * s.powi(4) / 8.0
    }
    fn gg(&self, s: f64) -> C64 {
        let (g, w) = (self.g, self.w);
        -s + w * w * s.powi(3) / 6.0 - 5.0 * self.dp * g * g * s.powi(4) / 24.0
            + 11.0 * self.dp * g.powi(3) * s.powi(5) / 120.0
    }
    fn ft(&self, s: f64) -> C64 {
        let (g, w) = (self.g, self.w);
        w * w * s - self.dp * g * g * s * s / 2.0 + self.dp * g.powi(3) * s.powi(3) / 6.0
    }
}

fn hpz_quad(which: Coefficient, t: f64, p: &ModelParams, eps: C64, spec: &QuadratureSpec) -> WResult<C64> {
    let tr = HpzTruncated { g: eps * p.cutoff, w: eps * p.omega, dp: C64::new(p.delta * PI, 0.0), beta: p.beta };
    let (g, w) = (tr.g, tr.w);
    let damp = |tau: f64| (-g * tau).exp();
    let cos_int = || integrate_complex(|tau| damp(tau) * (w * tau).cos(), 0.0, t, spec);
    let sin_int = || integrate_complex(|tau| damp(tau) * sin_over(w, tau), 0.0, t, spec);
    let big_a = || integrate_complex(|s| tr.c(s) * tr.gg(s).powi(2) - tr.d(s) * tr.gg(s) * tr.f(s), 0.0, t, spec);
    let big_b = || {
        integrate_complex(
            |s| 2.0 * tr.c(s) * tr.f(s) * tr.gg(s) - tr.d(s) * (tr.f(s).powi(2) + tr.ft(s) * tr.gg(s)),
            0.0,
            t,
            spec,
        )
    };
    let big_c = || integrate_complex(|s| tr.c(s) * tr.f(s).powi(2) - tr.d(s) * tr.f(s) * tr.ft(s), 0.0, t, spec);
    let tildes = || -> WResult<[C64; 3]> {
        let (a, b, c) = (big_a()?, big_b()?, big_c()?);
        let (f, gg, ft) = (tr.f(t), tr.gg(t), tr.ft(t));
        let det2 = (f * f - ft * gg).powi(2);
        Ok([
            (f * f * a - f * gg * b + gg * gg * c) / det2,
            (-2.0 * f * ft * a + (f * f + ft * gg) * b - 2.0 * f * gg * c) / det2,
            (ft * ft * a - f * ft * b + f * f * c) / det2,
        ])
    };
    let dp = tr.dp;
    Ok(match which {
        Coefficient::MemA => dp * g * g / 2.0 * cos_int()?,
        Coefficient::MemB => dp * g * g / 2.0 * sin_int()?,
        Coefficient::MemC => dp * g / p.beta * cos_int()?,
        Coefficient::MemD => -dp * g / p.beta * sin_int()?,
        Coefficient::A => big_a()?,
        Coefficient::B => big_b()?,
        Coefficient::C => big_c()?,
        Coefficient::At => tildes()?[0],
        Coefficient::Bt => tildes()?[1],
        Coefficient::Ct => tildes()?[2],
    })
}

/// Numerical value of a coefficient from its integral definition.
///
/// UZ: memory coefficients in their closed truncated form with I₁'(0) by
/// quadrature, kernel coefficients by quadrature of the defining integrals.
/// HPZ: memory coefficients from the untruncated exponential-damping
/// integrals; kernel coefficients by quadrature of the flow-weighted integrals
/// of the truncated memory coefficients.
pub fn quad_coefficient(which: Coefficient, t: f64, p: &ModelParams, spec: &QuadratureSpec) -> WResult<f64> {
    if t < 0.0 {
        return Err(WError::NegativeTime(t));
    }
    p.validate()?;
    match p.model {
        Model::Uz => uz_quad(which, t, p, spec),
        Model::Hpz => hpz_quad(which, t, p, C64::new(1.0, 0.0), spec).map(|v| v.re),
    }
}

/// HPZ coefficient with (Γ, Ω) scaled by a complex ε.
pub fn quad_coefficient_scaled(
    which: Coefficient,
    t: f64,
    p: &ModelParams,
    eps: C64,
    spec: &QuadratureSpec,
) -> WResult<C64> {
    if p.model != Model::Hpz {
        return Err(WError::InvalidParam("order scaling applies to the HPZ model".into()));
    }
    if t < 0.0 {
        return Err(WError::NegativeTime(t));
    }
    hpz_quad(which, t, p, eps, spec)
}

/// Taylor coefficients F_0..F_order of an analytic F(ε) at ε = 0 from N
/// samples on the circle |ε| = radius (trapezoidal Cauchy integral).
pub fn order_project(
    f: impl Fn(C64) -> WResult<C64>,
    order: usize,
    radius: f64,
    n: usize,
) -> WResult<Vec<C64>> {
    if n <= order || radius <= 0.0 {
        return Err(WError::InvalidParam("need n > order and radius > 0".into()));
    }
    let samples: Vec<C64> = (0..n)
        .map(|j| f(C64::from_polar(radius, 2.0 * PI * j as f64 / n as f64)))
        .collect::<WResult<_>>()?;
    Ok((0..=order)
        .map(|k| {
            let mut acc = Neumaier::default();
            for (j, v) in samples.iter().enumerate() {
                acc.add(v * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64));
            }
            acc.value() / (n as f64 * radius.powi(k as i32))
        })
        .collect())
}
