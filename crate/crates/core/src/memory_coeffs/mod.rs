//! Time-dependent coefficients of the UZ and HPZ propagators.
//!
//! Conventions: the Fourier transform is `f̂(k, η) = ∫ f e^{-i(k·x + η·ξ)}`, the
//! kernel in output Fourier variables is
//! `Ĝ₀(k, η) = exp(-Ã|k|² - B̃ k·η - C̃|η|²)` and its real-space form is
//! `G₀(x, ξ) = g_d exp(-g_a|x|² + g_b x·ξ - g_c|ξ|²)`.

pub mod hpz;
pub mod uz;

use bitflags::bitflags;

use crate::error::{WError, WResult};

pub use hpz::{HpzConsts, HpzFlow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Uz,
    Hpz,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Uz => "uz",
            Model::Hpz => "hpz",
        })
    }
}

/// Physical constants. UZ uses (gamma, cutoff); HPZ uses (delta, cutoff, beta, omega).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub model: Model,
    pub gamma: f64,
    pub cutoff: f64,
    pub beta: f64,
    pub omega: f64,
    pub delta: f64,
}

impl ModelParams {
    pub fn uz(gamma: f64, cutoff: f64) -> Self {
        ModelParams { model: Model::Uz, gamma, cutoff, beta: 1.0, omega: 0.0, delta: 1.0 }
    }

    pub fn hpz(delta: f64, cutoff: f64, beta: f64, omega: f64) -> Self {
        ModelParams { model: Model::Hpz, gamma: 1.0, cutoff, beta, omega, delta }
    }

    pub fn validate(&self) -> WResult<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(WError::InvalidParam(format!("{name} must be positive and finite, got {v}")))
            }
        };
        pos("cutoff", self.cutoff)?;
        match self.model {
            Model::Uz => pos("gamma", self.gamma),
            Model::Hpz => {
                pos("delta", self.delta)?;
                pos("beta", self.beta)?;
                if self.omega >= 0.0 && self.omega.is_finite() {
                    Ok(())
                } else {
                    Err(WError::InvalidParam(format!("omega must be >= 0, got {}", self.omega)))
                }
            }
        }
    }

    fn hpz_consts(&self) -> HpzConsts<f64> {
        self.into()
    }
}

bitflags! {
    #[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
    pub struct CoeffFlags: u32 {
        /// HPZ: t > t_star
        const PAST_HORIZON = 1;
        /// HPZ: t > 2 t_star, truncations meaningless
        const BEYOND_VALIDITY = 1 << 1;
        /// 4AtCt - Bt² <= 0 or At <= 0 or Ct <= 0
        const NOT_POSITIVE = 1 << 2;
    }
}

/// Coefficients of `a|y|² + b y·η + c|η|²`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub fn discriminant(&self) -> f64 {
        4.0 * self.a * self.c - self.b * self.b
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelCoeffs {
    pub t: f64,
    pub dim: usize,
    pub mem_a: f64,
    pub mem_b: f64,
    pub mem_c: f64,
    pub mem_d: f64,
    /// A, B, C
    pub abc: Quadratic,
    /// Ã, B̃, C̃
    pub tilde: Quadratic,
    /// D = 4AC - B²
    pub disc: f64,
    /// 4ÃC̃ - B̃², cancellation-free
    pub tilde_disc: f64,
    pub g_a: f64,
    pub g_b: f64,
    pub g_c: f64,
    pub g_d: f64,
    pub flags: CoeffFlags,
}

impl KernelCoeffs {
    /// Coefficients with Ĝ₀ ≡ 1, used to test the resampling path alone.
    pub fn unit(dim: usize) -> Self {
        KernelCoeffs {
            t: 0.0,
            dim,
            mem_a: 0.0,
            mem_b: 0.0,
            mem_c: 0.0,
            mem_d: 0.0,
            abc: Quadratic::default(),
            tilde: Quadratic::default(),
            disc: 0.0,
            tilde_disc: 0.0,
            g_a: f64::NAN,
            g_b: f64::NAN,
            g_c: f64::NAN,
            g_d: f64::NAN,
            flags: CoeffFlags::empty(),
        }
    }

    /// Ĝ₀ at output frequency (k, η) for one axis pair.
    #[inline]
    pub fn ghat_exponent(&self, k: f64, eta: f64) -> f64 {
        -(self.tilde.a * k * k + self.tilde.b * k * eta + self.tilde.c * eta * eta)
    }

    pub fn is_positive(&self) -> bool {
        !self.flags.contains(CoeffFlags::NOT_POSITIVE)
    }
}

fn check_t(t: f64) -> WResult<()> {
    if t < 0.0 || t.is_nan() {
        Err(WError::NegativeTime(t))
    } else {
        Ok(())
    }
}

fn check_model(p: &ModelParams, m: Model) -> WResult<()> {
    if p.model == m {
        Ok(())
    } else {
        Err(WError::InvalidParam(format!("expected {m} parameters, got {}", p.model)))
    }
}

/// UZ memory coefficients (c, d).
pub fn uz_memory(t: f64, p: &ModelParams) -> WResult<(f64, f64)> {
    check_t(t)?;
    check_model(p, Model::Uz)?;
    Ok(uz::memory(t, p))
}

pub fn uz_abc(t: f64, p: &ModelParams) -> WResult<Quadratic> {
    check_t(t)?;
    check_model(p, Model::Uz)?;
    let (a, b, c) = uz::abc(t, p);
    Ok(Quadratic { a, b, c })
}

pub fn uz_tilde(t: f64, p: &ModelParams) -> WResult<Quadratic> {
    check_t(t)?;
    check_model(p, Model::Uz)?;
    let (a, b, c) = uz::tilde(t, p);
    Ok(Quadratic { a, b, c })
}

/// HPZ memory coefficients [a, b, c, d].
pub fn hpz_memory(t: f64, p: &ModelParams) -> WResult<[f64; 4]> {
    check_t(t)?;
    check_model(p, Model::Hpz)?;
    Ok(p.hpz_consts().memory(t))
}

pub fn hpz_abc(t: f64, p: &ModelParams) -> WResult<Quadratic> {
    check_t(t)?;
    check_model(p, Model::Hpz)?;
    let (a, b, c) = p.hpz_consts().abc(t);
    Ok(Quadratic { a, b, c })
}

pub fn hpz_tilde(t: f64, p: &ModelParams) -> WResult<Quadratic> {
    check_t(t)?;
    check_model(p, Model::Hpz)?;
    let (a, b, c) = p.hpz_consts().tilde(t);
    Ok(Quadratic { a, b, c })
}

/// (t_star, t_star_star); (∞, ∞) for UZ.
pub fn validity_horizon(p: &ModelParams) -> (f64, f64) {
    match p.model {
        Model::Uz => (f64::INFINITY, f64::INFINITY),
        Model::Hpz => hpz::horizon(p),
    }
}

/// Largest t for which the UZ kernel stays positive definite (∞ for HPZ,
/// whose guard is [`validity_horizon`]).
pub fn uz_positivity_horizon(p: &ModelParams) -> f64 {
    match p.model {
        Model::Uz => uz::positivity_horizon(p),
        Model::Hpz => f64::INFINITY,
    }
}

/// All coefficients at t ≥ 0. At t = 0 (or where the kernel is not positive)
/// the real-space parameters are NaN; the Fourier representation is always valid.
pub fn kernel_coeffs(t: f64, p: &ModelParams, dim: usize) -> WResult<KernelCoeffs> {
    check_t(t)?;
    p.validate()?;
    if !(1..=3).contains(&dim) {
        return Err(WError::InvalidParam(format!("dimension must be 1, 2 or 3, got {dim}")));
    }
    let mut flags = CoeffFlags::empty();
    let (mem, abc, tilde, disc, tilde_disc) = match p.model {
        Model::Uz => {
            let (c, d) = uz::memory(t, p);
            let (a, b, cc) = uz::abc(t, p);
            let (at, bt, ct) = uz::tilde(t, p);
            (
                [0.0, 0.0, c, d],
                Quadratic { a, b, c: cc },
                Quadratic { a: at, b: bt, c: ct },
                uz::disc(t, p),
                uz::tilde_disc(t, p),
            )
        }
        Model::Hpz => {
            let h = p.hpz_consts();
            let (a, b, c) = h.abc(t);
            let (at, bt, ct) = h.tilde(t);
            let (ts, _) = hpz::horizon(p);
            if t > ts {
                flags |= CoeffFlags::PAST_HORIZON;
            }
            if t > 2.0 * ts {
                flags |= CoeffFlags::BEYOND_VALIDITY;
            }
            (
                h.memory(t),
                Quadratic { a, b, c },
                Quadratic { a: at, b: bt, c: ct },
                h.abc_disc(t),
                h.tilde_disc(t),
            )
        }
    };
    let positive = tilde_disc > 0.0 && tilde.a > 0.0 && tilde.c > 0.0;
    if t > 0.0 && !positive {
        flags |= CoeffFlags::NOT_POSITIVE;
    }
    let (g_a, g_b, g_c, g_d) = if t > 0.0 && positive {
        (
            tilde.c / tilde_disc,
            tilde.b / tilde_disc,
            tilde.a / tilde_disc,
            (2.0 * std::f64::consts::PI).powi(-(dim as i32)) * tilde_disc.powf(-(dim as f64) / 2.0),
        )
    } else {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    };
    Ok(KernelCoeffs {
        t,
        dim,
        mem_a: mem[0],
        mem_b: mem[1],
        mem_c: mem[2],
        mem_d: mem[3],
        abc,
        tilde,
        disc,
        tilde_disc,
        g_a,
        g_b,
        g_c,
        g_d,
        flags,
    })
}

/// Coefficients including the real-space Gaussian parameters; requires t > 0
/// and a positive-definite kernel.
pub fn gaussian_params(t: f64, p: &ModelParams, dim: usize) -> WResult<KernelCoeffs> {
    if t == 0.0 {
        return Err(WError::SingularTime);
    }
    let k = kernel_coeffs(t, p, dim)?;
    if !k.is_positive() {
        return Err(WError::NotPositive { t, disc: k.tilde_disc });
    }
    Ok(k)
}

/// Forward phase-space flow `(z, v) ↦ (κ z + ν v, κ̃ z + ν̃ v)` per axis pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicMap {
    pub model: Model,
    pub t: f64,
    pub kappa: f64,
    pub nu: f64,
    pub kappa_t: f64,
    pub nu_t: f64,
    pub hpz: Option<HpzCharacteristics>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HpzCharacteristics {
    pub f: f64,
    pub g: f64,
    pub f_t: f64,
    pub g_t: f64,
    pub lambda: f64,
}

impl CharacteristicMap {
    pub fn identity(model: Model) -> Self {
        CharacteristicMap { model, t: 0.0, kappa: 1.0, nu: 0.0, kappa_t: 0.0, nu_t: 1.0, hpz: None }
    }

    /// UZ x-shift per unit v.
    pub fn m1(&self) -> f64 {
        self.nu
    }

    /// UZ ξ-scale.
    pub fn m2(&self) -> f64 {
        self.nu_t
    }

    pub fn det(&self) -> f64 {
        self.kappa * self.nu_t - self.nu * self.kappa_t
    }

    pub fn is_identity(&self) -> bool {
        self.kappa == 1.0 && self.nu == 0.0 && self.kappa_t == 0.0 && self.nu_t == 1.0
    }

    /// Image of a source point (z, v).
    pub fn forward(&self, z: f64, v: f64) -> (f64, f64) {
        (self.kappa * z + self.nu * v, self.kappa_t * z + self.nu_t * v)
    }
}

pub fn characteristic_map(t: f64, p: &ModelParams) -> WResult<CharacteristicMap> {
    check_t(t)?;
    Ok(match p.model {
        Model::Uz => {
            let (m1, m2) = uz::shear(t, p);
            CharacteristicMap { model: Model::Uz, t, kappa: 1.0, nu: m1, kappa_t: 0.0, nu_t: m2, hpz: None }
        }
        Model::Hpz => {
            let fl = p.hpz_consts().flow(t);
            CharacteristicMap {
                model: Model::Hpz,
                t,
                kappa: fl.kappa,
                nu: fl.nu,
                kappa_t: fl.kappa_t,
                nu_t: fl.nu_t,
                hpz: Some(HpzCharacteristics {
                    f: fl.f,
                    g: fl.g,
                    f_t: fl.f_t,
                    g_t: fl.g_t,
                    lambda: fl.lambda(),
                }),
            }
        }
    })
}
