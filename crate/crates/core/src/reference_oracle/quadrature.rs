//! Adaptive quadrature with compensated accumulation.

use num_complex::Complex64 as C64;

use crate::error::{WError, WResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    AdaptiveSimpson,
    /// adaptive bisection with a 20-point Gauss–Legendre panel rule
    GaussLegendre,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rule: Rule::GaussLegendre, abs_tol: 1e-300, rel_tol: 1e-14, max_depth: 40 }
    }
}

impl QuadratureSpec {
    pub fn simpson(rel_tol: f64) -> Self {
        QuadratureSpec { rule: Rule::AdaptiveSimpson, rel_tol, max_depth: 50, ..Default::default() }
    }

    pub fn validate(&self) -> WResult<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(WError::InvalidParam("quadrature tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Neumaier's improved Kahan summation, applied to both complex parts.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: [f64; 2],
    comp: [f64; 2],
}

impl Neumaier {
    fn add1(sum: &mut f64, comp: &mut f64, x: f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }

    pub fn add(&mut self, x: C64) {
        let [s0, s1] = &mut self.sum;
        let [c0, c1] = &mut self.comp;
        Self::add1(s0, c0, x.re);
        Self::add1(s1, c1, x.im);
    }

    pub fn add_real(&mut self, x: f64) {
        self.add(C64::new(x, 0.0));
    }

    pub fn value(&self) -> C64 {
        C64::new(self.sum[0] + self.comp[0], self.sum[1] + self.comp[1])
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const GL_N: usize = 20;

struct Panel<'a, F> {
    f: &'a F,
    nodes: (Vec<f64>, Vec<f64>),
    spec: QuadratureSpec,
    tol: f64,
    total: f64,
    acc: Neumaier,
    evals: usize,
}

impl<F: Fn(f64) -> C64> Panel<'_, F> {
    fn gl(&mut self, a: f64, b: f64) -> C64 {
        let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
        let mut s = Neumaier::default();
        for (x, w) in self.nodes.0.iter().zip(&self.nodes.1) {
            s.add((self.f)(m + h * x) * (w * h));
        }
        self.evals += GL_N;
        s.value()
    }

    fn gl_rec(&mut self, a: f64, b: f64, whole: C64, depth: usize) -> WResult<()> {
        let m = 0.5 * (a + b);
        let (l, r) = (self.gl(a, m), self.gl(m, b));
        let local = self.tol * (b - a) / self.total;
        let roundoff = 64.0 * f64::EPSILON * (l.norm() + r.norm());
        if (l + r - whole).norm() <= local.max(roundoff) {
            self.acc.add(l);
            self.acc.add(r);
            return Ok(());
        }
        if depth >= self.spec.max_depth {
            return Err(tolerance_error(a, b));
        }
        self.gl_rec(a, m, l, depth + 1)?;
        self.gl_rec(m, b, r, depth + 1)
    }

    fn simpson_rec(&mut self, a: f64, fa: C64, m: f64, fm: C64, b: f64, fb: C64, whole: C64, depth: usize) -> WResult<()> {
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = ((self.f)(lm), (self.f)(rm));
        self.evals += 2;
        let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
        let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
        let diff = left + right - whole;
        let local = self.tol * (b - a) / self.total;
        let roundoff = 64.0 * f64::EPSILON * (left.norm() + right.norm());
        if diff.norm() <= (15.0 * local).max(roundoff) {
            self.acc.add(left);
            self.acc.add(right);
            self.acc.add(diff / 15.0);
            return Ok(());
        }
        if depth >= self.spec.max_depth {
            return Err(tolerance_error(a, b));
        }
        self.simpson_rec(a, fa, lm, flm, m, fm, left, depth + 1)?;
        self.simpson_rec(m, fm, rm, frm, b, fb, right, depth + 1)
    }
}

fn tolerance_error(a: f64, b: f64) -> WError {
    WError::Oracle(format!("quadrature tolerance not met on [{a:e}, {b:e}]"))
}

/// ∫_a^b f for complex-valued integrands.
pub fn integrate_complex(f: impl Fn(f64) -> C64, a: f64, b: f64, spec: &QuadratureSpec) -> WResult<C64> {
    spec.validate()?;
    if a == b {
        return Ok(C64::default());
    }
    if b < a {
        return integrate_complex(f, b, a, spec).map(|v| -v);
    }
    let mut p = Panel {
        f: &f,
        nodes: gauss_legendre(GL_N),
        spec: *spec,
        tol: 0.0,
        total: b - a,
        acc: Neumaier::default(),
        evals: 0,
    };
    // scale for the relative tolerance from a coarse composite estimate
    let mut scale = 0.0;
    for i in 0..8 {
        let (lo, hi) = (a + (b - a) * i as f64 / 8.0, a + (b - a) * (i + 1) as f64 / 8.0);
        scale += p.gl(lo, hi).norm();
    }
    p.tol = spec.abs_tol.max(spec.rel_tol * scale);
    match spec.rule {
        Rule::GaussLegendre => {
            let whole = p.gl(a, b);
            p.gl_rec(a, b, whole, 0)?;
        }
        Rule::AdaptiveSimpson => {
            let m = 0.5 * (a + b);
            let (fa, fm, fb) = (f(a), f(m), f(b));
            let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
            p.simpson_rec(a, fa, m, fm, b, fb, whole, 0)?;
        }
    }
    Ok(p.acc.value())
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> WResult<f64> {
    integrate_complex(|x| C64::new(f(x), 0.0), a, b, spec).map(|v| v.re)
}
