//! Hu-Paz-Zhang coefficients in the small (Γ, Ω), high-temperature regime.
//!
//! All formulas are truncated polynomials or rational functions in t, written
//! generically over [`Scalar`] so they can be evaluated at complex scaled
//! parameters by the order-projection oracle.

use std::f64::consts::PI;

use crate::scalar::{horner, poly_mul, Scalar};

use super::ModelParams;

#[derive(Clone, Copy, Debug)]
pub struct HpzConsts<S> {
    pub delta: S,
    pub cutoff: S,
    pub beta: S,
    pub omega: S,
}

impl From<&ModelParams> for HpzConsts<f64> {
    fn from(p: &ModelParams) -> Self {
        HpzConsts { delta: p.delta, cutoff: p.cutoff, beta: p.beta, omega: p.omega }
    }
}

/// Flow and characteristic functions at one time.
#[derive(Clone, Copy, Debug)]
pub struct HpzFlow<S> {
    pub f: S,
    pub g: S,
    pub f_t: S,
    pub g_t: S,
    pub nu: S,
    pub kappa: S,
    pub nu_t: S,
    pub kappa_t: S,
}

fn r<S: Scalar>(x: f64) -> S {
    S::from(x)
}

impl<S: Scalar> HpzConsts<S> {
    /// δπΓ/(2β)
    pub fn k(&self) -> S {
        self.delta * r(PI) * self.cutoff / (r::<S>(2.0) * self.beta)
    }

    /// δπΓ²
    fn dpg2(&self) -> S {
        self.delta * r(PI) * self.cutoff * self.cutoff
    }

    /// [a, b, c, d] memory coefficients.
    pub fn memory(&self, t: S) -> [S; 4] {
        let (g, w) = (self.cutoff, self.omega);
        let dpg2 = self.dpg2();
        let dpg_b = self.delta * r(PI) * g / self.beta;
        let a = dpg2 / r(4.0) * t * (r::<S>(2.0) - g * t);
        let b = dpg2 / r(12.0) * t * t * (r::<S>(3.0) - r::<S>(2.0) * g * t);
        let c = dpg_b / r(6.0) * t * (r::<S>(6.0) - r::<S>(3.0) * g * t + (g * g - w * w) * t * t);
        let d = -dpg_b / r(24.0)
            * t
            * t
            * (r::<S>(12.0) - r::<S>(8.0) * g * t + (r::<S>(3.0) * g * g - w * w) * t * t);
        [a, b, c, d]
    }

    fn pa(&self) -> [S; 4] {
        let (g, w) = (self.cutoff, self.omega);
        [r(0.25), -g / r(15.0), (g * g - r::<S>(3.0) * w * w) / r(72.0), self.dpg2() / r(24.0)]
    }

    fn pb(&self) -> [S; 4] {
        let (g, w) = (self.cutoff, self.omega);
        [r(-1.0), g / r(3.0), -(g * g - r::<S>(3.0) * w * w) / r(12.0), -self.dpg2() / r(6.0)]
    }

    fn pc(&self) -> [S; 4] {
        let (g, w) = (self.cutoff, self.omega);
        [r(1.0), -g / r(3.0), (g * g - r::<S>(4.0) * w * w) / r(12.0), self.dpg2() / r(6.0)]
    }

    fn fa(&self) -> [S; 4] {
        let (g, w) = (self.cutoff, self.omega);
        [r(0.25), -g / r(15.0), (g * g - r::<S>(3.0) * w * w) / r(72.0), self.dpg2() / r(12.0)]
    }

    fn fb(&self) -> [S; 4] {
        let (g, w) = (self.cutoff, self.omega);
        [r(1.0), -g / r(3.0), (g * g - r::<S>(3.0) * w * w) / r(12.0), self.dpg2() / r(3.0)]
    }

    fn fc(&self) -> [S; 4] {
        let (g, w) = (self.cutoff, self.omega);
        [r(1.0), -g / r(3.0), (g * g - r::<S>(4.0) * w * w) / r(12.0), self.dpg2() / r(3.0)]
    }

    /// (A, B, C) of the Fourier exponent in initial variables.
    pub fn abc(&self, t: S) -> (S, S, S) {
        let k = self.k();
        let t2 = t * t;
        (
            k * t2 * t2 * horner(&self.pa(), t),
            k * t2 * t * horner(&self.pb(), t),
            k * t2 * horner(&self.pc(), t),
        )
    }

    /// Σ_{n≥1} q_n t^{n-1} where q = 4 x z - y²; q_0 cancels exactly.
    fn disc_reduced(x: &[S; 4], y: &[S; 4], z: &[S; 4], t: S) -> S {
        let xz = poly_mul(x, z);
        let yy = poly_mul(y, y);
        let q: Vec<S> = xz.iter().zip(&yy).map(|(&a, &b)| r::<S>(4.0) * a - b).collect();
        horner(&q[1..], t)
    }

    /// D = 4AC - B², evaluated without the leading-order cancellation.
    pub fn abc_disc(&self, t: S) -> S {
        let k = self.k();
        let t3 = t * t * t;
        k * k * t3 * t3 * t * Self::disc_reduced(&self.pa(), &self.pb(), &self.pc(), t)
    }

    pub fn chi(&self, t: S) -> S {
        let g = self.cutoff;
        let inner = r::<S>(1.0) + self.dpg2() / r(12.0) * t * t * t * (r::<S>(2.0) - g * t);
        inner * inner
    }

    /// (Ã, B̃, C̃) from the F_A/F_B/F_C/χ closed forms.
    pub fn tilde(&self, t: S) -> (S, S, S) {
        let k = self.k();
        let chi = self.chi(t);
        let t2 = t * t;
        (
            k * t2 * t2 * horner(&self.fa(), t) / chi,
            k * t2 * t * horner(&self.fb(), t) / chi,
            k * t2 * horner(&self.fc(), t) / chi,
        )
    }

    /// 4ÃC̃ - B̃² from the closed forms, without leading-order cancellation.
    pub fn tilde_disc(&self, t: S) -> S {
        let k = self.k();
        let chi = self.chi(t);
        let t3 = t * t * t;
        k * k * t3 * t3 * t * Self::disc_reduced(&self.fa(), &self.fb(), &self.fc(), t) / (chi * chi)
    }

    /// Right-hand side δ²π²Γ³t⁷/(60β²χ) of the discriminant identity.
    pub fn tilde_disc_target(&self, t: S) -> S {
        let g = self.cutoff;
        let t3 = t * t * t;
        self.delta * self.delta * r(PI * PI) * g * g * g * t3 * t3 * t
            / (r::<S>(60.0) * self.beta * self.beta * self.chi(t))
    }

    pub fn flow(&self, t: S) -> HpzFlow<S> {
        let w2 = self.omega * self.omega;
        let dpg2 = self.dpg2();
        let dpg3 = dpg2 * self.cutoff;
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let f = r::<S>(1.0) - w2 / r(2.0) * t2 + dpg2 / r(3.0) * t3 - dpg3 / r(8.0) * t4;
        let g = -t + w2 / r(6.0) * t3 - r::<S>(5.0) * dpg2 / r(24.0) * t4
            + r::<S>(11.0) * dpg3 / r(120.0) * t5;
        let f_t = w2 * t - dpg2 / r(2.0) * t2 + dpg3 / r(6.0) * t3;
        let nu = t - w2 / r(6.0) * t3 + dpg2 / r(24.0) * t4 - dpg3 / r(120.0) * t5;
        let kappa = r::<S>(1.0) - w2 / r(2.0) * t2 + dpg2 / r(6.0) * t3 - dpg3 / r(24.0) * t4;
        let kappa_t = -w2 * t + dpg2 / r(2.0) * t2 - dpg3 / r(6.0) * t3;
        HpzFlow { f, g, f_t, g_t: f, nu, kappa, nu_t: kappa, kappa_t }
    }
}

impl<S: Scalar> HpzFlow<S> {
    /// Λ = 1 - νκ̃/κ².
    pub fn lambda(&self) -> S {
        S::from(1.0) - self.nu * self.kappa_t / (self.kappa * self.kappa)
    }
}

/// (t*, t**) with t* = sqrt((sqrt(Ω² + δπΓ) - Ω)/(δπΓ)), t** = √3 t*.
pub fn horizon(p: &ModelParams) -> (f64, f64) {
    let dpg = p.delta * PI * p.cutoff;
    let ts = (((p.omega * p.omega + dpg).sqrt() - p.omega) / dpg).sqrt();
    (ts, 3f64.sqrt() * ts)
}
