//! Acceptance suite: one PASS/FAIL line per check, grouped by criterion.
//!
//! A few checks reproduce published constants that disagree with their own
//! defining formulas. They are evaluated as stated, reported as
//! "FAIL (expected)" next to the corrected value, and do not change the
//! exit status. Any other failure makes the binary exit non-zero.

use std::f64::consts::{E, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;

use wmem::cli;
use wmem::diagnostics::RecordFlags;
use wmem::hartree::{self, solve_poisson, solve_poisson_free};
use wmem::memory_coeffs::{self, hpz, uz, HpzConsts};
use wmem::phase_grid::{self, current, density, mass};
use wmem::propagator::{self, eval_g0, propagated_energy, SourceMoments};
use wmem::reference_oracle::{
    brute_force_propagate, brute_force_theta, derivative_at, order_project, quad_coefficient, quad_coefficient_scaled,
    scaled_consts, uz_i1p0, Coefficient, DerivSpec, QuadratureSpec,
};
use wmem::stepper::{self, StepConfig};
use wmem::{characteristic_map, gaussian_params, kernel_coeffs, validity_horizon, Grid, ModelParams, PhaseField};

#[derive(Default)]
struct Report {
    pass: usize,
    fail: usize,
    expected: usize,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, what: &str, detail: String) {
        if ok {
            self.pass += 1;
            println!("PASS [{id}] {what}: {detail}");
        } else {
            self.fail += 1;
            println!("FAIL [{id}] {what}: {detail}");
        }
    }

    /// A check expected to fail because the stated constant is inconsistent.
    fn check_expected(&mut self, id: &str, ok: bool, what: &str, detail: String) {
        if ok {
            self.pass += 1;
            println!("PASS [{id}] {what}: {detail}");
        } else {
            self.expected += 1;
            println!("FAIL (expected) [{id}] {what}: {detail}");
        }
    }

    fn runtime(&mut self, id: &str, took: Duration, limit: f64) {
        let s = took.as_secs_f64();
        self.check(id, s < limit, "runtime", format!("{s:.2} s (limit {limit} s)"));
    }

    fn error(&mut self, id: &str, what: &str, e: impl std::fmt::Display) {
        self.check(id, false, what, format!("error: {e}"));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn fmt_e(v: f64) -> String {
    format!("{v:.3e}")
}

// 1 ─────────────────────────────────────────────────────────────────────────

fn c1_uz_coefficients(r: &mut Report) {
    let id = "1";
    let start = Instant::now();
    let p = ModelParams::uz(0.5, 0.2);
    let spec = QuadratureSpec::default();
    let mut worst = [0.0f64; 6];
    let names = ["A", "B", "C", "At", "Bt", "Ct"];
    let which = [Coefficient::A, Coefficient::B, Coefficient::C, Coefficient::At, Coefficient::Bt, Coefficient::Ct];
    for f in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let t = f / p.gamma;
        let q = memory_coeffs::uz_abc(t, &p).unwrap();
        let tl = memory_coeffs::uz_tilde(t, &p).unwrap();
        let fast = [q.a, q.b, q.c, tl.a, tl.b, tl.c];
        for k in 0..6 {
            match quad_coefficient(which[k], t, &p, &spec) {
                Ok(o) => worst[k] = worst[k].max(rel(fast[k], o)),
                Err(e) => return r.error(id, names[k], e),
            }
        }
    }
    for k in 0..6 {
        r.check(id, worst[k] <= 1e-10, &format!("UZ {} closed form vs quadrature", names[k]), format!("max rel {}", fmt_e(worst[k])));
    }
    r.runtime(id, start.elapsed(), 5.0);
}

// 2 ─────────────────────────────────────────────────────────────────────────

fn project(f: impl Fn(C64) -> wmem::WResult<C64>) -> wmem::WResult<Vec<C64>> {
    order_project(f, 3, 1.0, 32)
}

fn c2_hpz_coefficients(r: &mut Report) {
    let id = "2";
    let p = ModelParams::hpz(1.0, 0.1, 0.5, 0.05);
    let (ts, _) = validity_horizon(&p);
    let spec = QuadratureSpec::default();
    let which = [
        ("a", Coefficient::MemA),
        ("b", Coefficient::MemB),
        ("c", Coefficient::MemC),
        ("d", Coefficient::MemD),
        ("A", Coefficient::A),
        ("B", Coefficient::B),
        ("C", Coefficient::C),
        ("At", Coefficient::At),
        ("Bt", Coefficient::Bt),
        ("Ct", Coefficient::Ct),
    ];
    let fast = |k: usize, h: &HpzConsts<C64>, t: C64| -> C64 {
        match k {
            0..=3 => h.memory(t)[k],
            4 => h.abc(t).0,
            5 => h.abc(t).1,
            6 => h.abc(t).2,
            7 => h.tilde(t).0,
            8 => h.tilde(t).1,
            _ => h.tilde(t).2,
        }
    };
    let times: Vec<f64> = [0.2, 0.4, 0.6, 0.8, 1.0].iter().map(|f| f * ts).collect();
    for (k, (name, w)) in which.iter().enumerate() {
        let mut worst = 0.0f64;
        let mut raw = 0.0f64;
        for &t in &times {
            let oracle = match project(|e| quad_coefficient_scaled(*w, t, &p, e, &spec)) {
                Ok(v) => v,
                Err(e) => return r.error(id, name, e),
            };
            let closed = project(|e| Ok(fast(k, &scaled_consts(&p, e), C64::new(t, 0.0)))).unwrap();
            let scale = oracle.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (a, b) in oracle.iter().zip(&closed) {
                worst = worst.max((a - b).norm() / scale);
            }
            let q = quad_coefficient(*w, t, &p, &spec).unwrap();
            let h: HpzConsts<f64> = (&p).into();
            let c = match k {
                0..=3 => h.memory(t)[k],
                4 => h.abc(t).0,
                5 => h.abc(t).1,
                6 => h.abc(t).2,
                7 => h.tilde(t).0,
                8 => h.tilde(t).1,
                _ => h.tilde(t).2,
            };
            raw = raw.max(rel(c, q));
        }
        r.check(
            id,
            worst <= 1e-10,
            &format!("HPZ {name} closed form vs quadrature, orders ε⁰..ε³"),
            format!("max rel {} (untruncated raw rel {})", fmt_e(worst), fmt_e(raw)),
        );
    }
    let mut worst = 0.0f64;
    let mut raw = 0.0f64;
    let h: HpzConsts<f64> = (&p).into();
    for &t in &times {
        let a = project(|e| Ok(scaled_consts(&p, e).tilde_disc(C64::new(t, 0.0)))).unwrap();
        let b = project(|e| Ok(scaled_consts(&p, e).tilde_disc_target(C64::new(t, 0.0)))).unwrap();
        let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).norm() / scale);
        }
        raw = raw.max(rel(h.tilde_disc(t), h.tilde_disc_target(t)));
    }
    r.check(
        id,
        worst <= 1e-10,
        "4ÃC̃−B̃² = δ²π²Γ³t⁷/(60β²χ), orders ε⁰..ε³",
        format!("max rel {} (raw rel {})", fmt_e(worst), fmt_e(raw)),
    );
}

// 3 ─────────────────────────────────────────────────────────────────────────

fn c3_spot_constants(r: &mut Report) {
    let id = "3";
    let p = ModelParams::uz(0.5, 0.2);
    let g = p.gamma;
    let t = 1.0 / (2.0 * g);
    let (f1, _) = uz::f1_f2(t, &p);
    let stated = (16.0 / E + 1.0 / (E * E) - 5.0) / (4.0 * g);
    let corrected = (16.0 / E + 1.0 / (E * E) - 6.0) / (4.0 * g);
    r.check_expected(
        id,
        (f1 - stated).abs() <= 1e-12,
        "F₁(1/2γ) = (1/4γ)(16/e + 1/e² − 5)",
        format!("computed {f1:.15}, stated {stated:.15}; with −6: {corrected:.15} (diff {})", fmt_e((f1 - corrected).abs())),
    );
    r.check(id, (f1 - corrected).abs() <= 1e-12, "F₁(1/2γ) = (1/4γ)(16/e + 1/e² − 6)", format!("diff {}", fmt_e((f1 - corrected).abs())));
    let h = uz::h_uz(t, &p);
    let want = -0.5 * (5.0 * E * E + 29.0) + 12.0 * E + 1.0 / E;
    r.check(id, (h - want).abs() <= 1e-12, "H_UZ(1/2γ) = −½(5e²+29) + 12e + 1/e", format!("diff {}", fmt_e((h - want).abs())));
    let i_closed = uz::i1p0(&p);
    let i_quad = uz_i1p0(&p, &QuadratureSpec::default()).unwrap();
    let want = 0.5 * (1.0 + p.cutoff * p.cutoff / (4.0 * g * g)).ln();
    r.check(
        id,
        (i_closed - want).abs() <= 1e-12 && (i_quad - want).abs() <= 1e-12,
        "I₁'(0) = ½ ln(1 + Γ²/4γ²)",
        format!("closed diff {}, quadrature diff {}", fmt_e((i_closed - want).abs()), fmt_e((i_quad - want).abs())),
    );
}

// 4 ─────────────────────────────────────────────────────────────────────────

fn slope(f: impl Fn(f64) -> f64) -> f64 {
    // least squares on log-spaced samples over [1e-4, 1e-2]
    let pts: Vec<(f64, f64)> = (0..=40)
        .map(|i| {
            let t = 10f64.powf(-4.0 + 2.0 * i as f64 / 40.0);
            (t.ln(), f(t).abs().ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx).powi(2)));
    num / den
}

fn c4_decay(r: &mut Report) {
    let id = "4";
    let cases = [
        ("UZ", ModelParams::uz(0.5, 0.2), [-4.0, -3.0, -2.0, -9.0, 6.0]),
        ("HPZ", ModelParams::hpz(1.0, 0.1, 0.5, 0.05), [-5.0, -4.0, -2.0, -10.5, 7.0]),
    ];
    let names = ["g_a", "g_b", "g_c", "g_d", "D"];
    for (label, p, target) in cases {
        for (k, name) in names.iter().enumerate() {
            let s = slope(|t| {
                let c = kernel_coeffs(t, &p, 3).unwrap();
                [c.g_a, c.g_b, c.g_c, c.g_d, c.disc][k]
            });
            let ok = (s - target[k]).abs() <= 0.05;
            let what = format!("{label} {name} ∼ t^{}", target[k]);
            if label == "HPZ" && *name == "g_c" {
                r.check_expected(id, ok, &what, format!("fitted slope {s:.4}; the closed forms give t^-3"));
                r.check(id, (s + 3.0).abs() <= 0.05, "HPZ g_c ∼ t^-3", format!("fitted slope {s:.4}"));
            } else {
                r.check(id, ok, &what, format!("fitted slope {s:.4}"));
            }
        }
    }

    let p = ModelParams::uz(0.5, 0.2);
    let i = uz::i1p0(&p);
    let g = p.gamma;
    let spec = DerivSpec { h0: 0.4, levels: 8, rel_tol: 1e-6, ..Default::default() };
    match derivative_at(|t| uz::disc(t, &p), 6, 0.0, &spec) {
        Ok(d6) => {
            let stated = 10.0 * (32.0 * g.powi(4) * i / PI).powi(2);
            let corrected = 10.0 * (32.0 * g.powi(3) * i / PI).powi(2);
            r.check_expected(
                id,
                rel(d6, stated) <= 1e-5,
                "D_UZ⁽⁶⁾(0) = 10(32γ⁴I₁'(0)/π)² at γ = 0.5",
                format!("FD {d6:.10e}, stated {stated:.10e}; γ³ form {corrected:.10e}"),
            );
            r.check(id, rel(d6, corrected) <= 1e-5, "D_UZ⁽⁶⁾(0) = 10(32γ³I₁'(0)/π)²", format!("rel {}", fmt_e(rel(d6, corrected))));
        }
        Err(e) => r.error(id, "D_UZ⁽⁶⁾(0)", e),
    }
    let p = ModelParams::hpz(1.0, 0.1, 0.5, 0.05);
    let h: HpzConsts<f64> = (&p).into();
    let spec = DerivSpec { h0: 0.4, levels: 8, rel_tol: 1e-6, ..Default::default() };
    match derivative_at(|t| h.abc_disc(t), 7, 0.0, &spec) {
        Ok(d7) => {
            let want = 84.0 * p.delta.powi(2) * PI * PI * p.cutoff.powi(3) / p.beta.powi(2);
            r.check(id, rel(d7, want) <= 1e-5, "D_HPZ⁽⁷⁾(0) = 84δ²π²Γ³/β²", format!("FD {d7:.10e}, want {want:.10e}"));
        }
        Err(e) => r.error(id, "D_HPZ⁽⁷⁾(0)", e),
    }
}

// 5 ─────────────────────────────────────────────────────────────────────────

fn c5_propagator(r: &mut Report) {
    let id = "5";
    let start = Instant::now();
    // fine enough in x for the UZ momentum contraction at the latest time
    let g = Grid::new(1, 256, 256, 20.0, 12.0).unwrap();
    let f = PhaseField::gaussian(g, 1.0, &[0.7], &[-0.4], 1.0, 0.9);
    let cases = [
        ("UZ", ModelParams::uz(0.5, 0.2), vec![0.05, 0.3, 1.0, 1.8]),
        ("HPZ", ModelParams::hpz(1.0, 0.1, 0.5, 0.05), vec![0.1, 0.6, 1.2]),
    ];
    let q0 = mass(&f);
    for (label, p, ts) in &cases {
        let mut worst = 0.0f64;
        let mut worst_e = 0.0f64;
        for &t in ts {
            let out = propagator::propagate(&f, t, p).unwrap();
            worst = worst.max(rel(mass(&out), q0));
            let c = gaussian_params(t, p, 1).unwrap();
            let m = characteristic_map(t, p).unwrap();
            let closed = propagated_energy(&SourceMoments::of(&f), &c, &m);
            worst_e = worst_e.max(rel(closed, phase_grid::kinetic_energy(&out)));
        }
        r.check(id, worst <= 1e-8, &format!("{label} mass preserved per application"), format!("max rel {}", fmt_e(worst)));
        r.check(id, worst_e <= 1e-6, &format!("{label} E[G(t)f] closed form vs grid quadrature"), format!("max rel {}", fmt_e(worst_e)));
    }

    // ∫ j[G₀] dx on a grid resolving the kernel
    for (label, p, t) in [("UZ", ModelParams::uz(0.5, 0.2), 1.0), ("HPZ", ModelParams::hpz(1.0, 0.1, 0.5, 0.05), 1.0)] {
        let c = gaussian_params(t, &p, 1).unwrap();
        // marginal widths from the covariance; 1/√g_a understates them when g_b² ≈ 4g_a g_c
        let det = 4.0 * c.g_a * c.g_c - c.g_b * c.g_b;
        let (sx, sxi) = ((2.0 * c.g_c / det).sqrt(), (2.0 * c.g_a / det).sqrt());
        let gg = Grid::new(1, 256, 256, 9.0 * sx, 9.0 * sxi).unwrap();
        let k = PhaseField::from_fn(gg, |x, xi| eval_g0(&c, x, xi));
        let jt = phase_grid::total_current(&k)[0];
        r.check(id, jt.abs() <= 1e-10, &format!("{label} ∫ j[G₀] dx = 0"), format!("|∫j| = {} (mass {:.12})", fmt_e(jt.abs()), mass(&k)));
    }

    // spectral vs direct summation on a 16² grid
    let p = ModelParams::uz(0.5, 3.0);
    let gs = Grid::new(1, 16, 16, 6.0, 2.0).unwrap();
    let src = PhaseField::from_fn(gs, |x, v| (-(x[0] - 0.3).powi(2) / 2.0).exp() * (1.0 + (PI * v[0] / 2.0).cos()).powi(6));
    let spectral = propagator::propagate(&src, 1.6, &p).unwrap();
    match brute_force_propagate(&src, 1.6, &p, 6, 2) {
        Ok(direct) => {
            let e = rel_l2(&spectral.values, &direct.values);
            r.check(id, e <= 1e-6, "spectral vs brute-force direct sum, d=1, 16²", format!("rel L² {}", fmt_e(e)));
        }
        Err(e) => r.error(id, "brute force", e),
    }
    r.runtime(id, start.elapsed(), 30.0);
}

// 6 ─────────────────────────────────────────────────────────────────────────

fn c6_hartree(r: &mut Report) {
    let id = "6";
    let mut m0_worst = 0.0f64;
    let mut m1_errs = Vec::new();
    for n in [32usize, 64, 128] {
        let g = Grid::new(1, n, n, 10.0, 10.0).unwrap();
        let f = PhaseField::gaussian(g, 1.0, &[0.4], &[0.5], 1.0, 0.8);
        let nd = density(&f);
        let pot = solve_poisson(&g, &nd, 1.0);
        let th = hartree::apply_theta(&f, &pot).unwrap();
        let m0 = density(&th.field);
        let m1 = current(&th.field);
        let nmax = nd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let gmax = pot.gradient[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        m0_worst = m0_worst.max(m0.iter().fold(0.0f64, |m, v| m.max(v.abs())) / nmax);
        let e = (0..g.nx).map(|c| (m1[0][c] - nd[c] * pot.gradient[0][c]).abs()).fold(0.0, f64::max) / (nmax * gmax);
        m1_errs.push(e);
    }
    r.check(id, m0_worst <= 1e-10, "∫Θ[V]w dξ = 0", format!("max rel {}", fmt_e(m0_worst)));
    let decreasing = m1_errs.windows(2).all(|w| w[1] <= w[0] || w[1] < 1e-12);
    r.check(
        id,
        decreasing && *m1_errs.last().unwrap() < 1e-8,
        "∫ξ Θ[V]w dξ = n∇V under refinement (32², 64², 128²)",
        m1_errs.iter().map(|e| fmt_e(*e)).collect::<Vec<_>>().join(" → "),
    );

    let mut worst = 0.0f64;
    for g in [Grid::new(1, 8, 12, 3.0, 2.5).unwrap(), Grid::new(2, 6, 6, 3.0, 2.0).unwrap()] {
        let f = PhaseField::from_fn(g, |x, xi| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let p2: f64 = xi.iter().enumerate().map(|(a, v)| (v - 0.2 * a as f64).powi(2)).sum();
            (-r2 - 0.7 * p2).exp() * (1.0 + 0.3 * x[0])
        });
        let v: Vec<f64> = (0..g.npos())
            .map(|c| {
                let i = g.pos_index(c);
                (PI * g.x(i[0]) / g.lx).sin() + 0.5 * (2.0 * PI * g.x(i[g.dim - 1]) / g.lx).cos()
            })
            .collect();
        let pot = wmem::hartree::Potential { values: v.clone(), ..wmem::hartree::Potential::zero(g) };
        let spec = hartree::apply_theta(&f, &pot).unwrap().field;
        let direct = brute_force_theta(&f, &v).unwrap();
        let scale = direct.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let e = spec.values.iter().zip(&direct.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        worst = worst.max(e);
    }
    r.check(id, worst <= 1e-10, "spectral Θ vs direct double sum (d=1 8×12, d=2 6²×6²)", format!("max rel {}", fmt_e(worst)));

    let g = Grid::new(3, 24, 2, 4.0, 1.0).unwrap();
    let n: Vec<f64> = (0..g.npos())
        .map(|c| {
            let i = g.pos_index(c);
            (-(0..3).map(|a| g.x(i[a]).powi(2)).sum::<f64>() / 0.72).exp()
        })
        .collect();
    match solve_poisson_free(&g, &n, 1.0) {
        Ok(pot) => {
            let (lhs, rhs) = wmem::diagnostics::virial_residual(&g, &n, &pot, 1.0);
            r.check(id, rel(lhs, rhs) <= 1e-6, "∫n x·∇V dx = ½‖∇V‖² (d=3, free space, 24³)", format!("{lhs:.10e} vs {rhs:.10e}, rel {}", fmt_e(rel(lhs, rhs))));
        }
        Err(e) => r.error(id, "free-space Poisson", e),
    }
}

// 7 ─────────────────────────────────────────────────────────────────────────

/// Density of the Gaussian pushforward of N(μ, Σ₀) under the flow plus the G₀ noise.
fn analytic_linear(g: Grid, p: &ModelParams, t: f64, mu: [f64; 2], s0: [f64; 2]) -> Vec<f64> {
    let c = kernel_coeffs(t, p, 1).unwrap();
    let m = characteristic_map(t, p).unwrap();
    let phi = [[m.kappa, m.nu], [m.kappa_t, m.nu_t]];
    let mean = [phi[0][0] * mu[0] + phi[0][1] * mu[1], phi[1][0] * mu[0] + phi[1][1] * mu[1]];
    let (vx, vv) = (s0[0] * s0[0], s0[1] * s0[1]);
    let sxx = phi[0][0].powi(2) * vx + phi[0][1].powi(2) * vv + 2.0 * c.tilde.a;
    let sxv = phi[0][0] * phi[1][0] * vx + phi[0][1] * phi[1][1] * vv + c.tilde.b;
    let svv = phi[1][0].powi(2) * vx + phi[1][1].powi(2) * vv + 2.0 * c.tilde.c;
    let det = sxx * svv - sxv * sxv;
    PhaseField::from_fn(g, |x, xi| {
        let (a, b) = (x[0] - mean[0], xi[0] - mean[1]);
        let q = (svv * a * a - 2.0 * sxv * a * b + sxx * b * b) / det;
        (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
    })
    .values
}

fn c7_linear(r: &mut Report) {
    let id = "7";
    let start = Instant::now();
    match cli::run_preset("uz-linear-gaussian", &[]) {
        Ok(tr) => {
            let p = ModelParams::uz(0.5, 0.2);
            let last = &tr.last;
            let want = analytic_linear(last.grid, &p, 1.0, [0.0, 0.0], [1.0, 1.0]);
            let e = rel_l2(&last.values, &want);
            r.check(
                id,
                (last.time - 1.0).abs() < 1e-12 && e <= 1e-6,
                "UZ linear run vs analytic Fourier solution at t=1 (128²)",
                format!("rel L² {}", fmt_e(e)),
            );
        }
        Err(e) => r.error(id, "linear preset", e),
    }
    r.runtime(id, start.elapsed(), 10.0);
}

// 8 ─────────────────────────────────────────────────────────────────────────

fn c8_nonlinear(r: &mut Report) {
    let id = "8";
    let start = Instant::now();
    let fine = match cli::run_preset("uz-nonlinear-gaussian", &[]) {
        Ok(t) => t,
        Err(e) => return r.error(id, "nonlinear preset", e),
    };
    let took = start.elapsed();
    let q0 = fine.records[0].q;
    let drift = fine.records.iter().map(|x| rel(x.q, q0)).fold(0.0, f64::max);
    r.check(
        id,
        matches!(fine.status, stepper::RunStatus::Completed) && drift <= 1e-6,
        "mass conserved over t ∈ [0, 1], dt = 1/64, 128²",
        format!("max rel drift {} over {} steps", fmt_e(drift), fine.records.len() - 1),
    );
    let max_ratio = fine.ratios.iter().copied().fold(0.0, f64::max);
    let all_iterated = fine.records[1..].iter().all(|x| x.picard_iters >= 2);
    r.check(id, max_ratio < 1.0 && all_iterated, "Picard differences contract at every step", format!("max ratio {max_ratio:.4}"));
    let coarse = match cli::run_preset("uz-nonlinear-gaussian", &[("dt", "0.03125")]) {
        Ok(t) => t,
        Err(e) => return r.error(id, "coarse run", e),
    };
    let res = |tr: &stepper::Trajectory| tr.records.iter().map(|x| x.continuity_residual).fold(0.0, f64::max);
    let (rc, rf) = (res(&coarse), res(&fine));
    r.check(id, rf < rc, "continuity residual decreases under dt halving", format!("dt=1/32: {}, dt=1/64: {}", fmt_e(rc), fmt_e(rf)));
    let exceeded = fine.records.iter().filter(|x| x.flags.contains(RecordFlags::ENVELOPE_EXCEEDED)).count();
    let rate = fine.monitor.envelope().map_or(f64::NAN, |e| e.rate());
    let last = fine.records.last().unwrap();
    r.check(
        id,
        exceeded == 0,
        "norms stay under the calibrated Gronwall envelope",
        format!("C = {rate:.4e}; at t=1 norm {:.6} ≤ envelope {:.6}", last.norm_sum(), last.envelope),
    );
    r.runtime(id, took, 120.0);
}

// 9 ─────────────────────────────────────────────────────────────────────────

fn c9_hpz_guardrails(r: &mut Report) {
    let id = "9";
    let sets = [(1.0, 0.1, 0.05, 0.5), (1.0, 0.2, 0.1, 0.5), (0.5, 0.05, 0.01, 1.0)];
    for (delta, cutoff, omega, beta) in sets {
        let p = ModelParams::hpz(delta, cutoff, beta, omega);
        let (ts, tss) = hpz::horizon(&p);
        let h: HpzConsts<f64> = (&p).into();
        let n = 4000;
        let lam_max = (0..=n).map(|i| h.flow(ts * i as f64 / n as f64).lambda()).fold(f64::MIN, f64::max);
        let ratio_max = (0..=n)
            .map(|i| {
                let fl = h.flow(tss * i as f64 / n as f64);
                (fl.lambda() / fl.kappa).abs()
            })
            .fold(0.0, f64::max);
        let label = format!("δ={delta} Γ={cutoff} Ω={omega} β={beta}");
        r.check(id, lam_max < 2.0, &format!("Λ < 2 on [0, t*], {label}"), format!("max Λ = {lam_max:.6} (t* = {ts:.6})"));
        r.check(id, ratio_max < 4.0, &format!("|Λ/κ| < 4 on [0, √3 t*], {label}"), format!("max |Λ/κ| = {ratio_max:.6}"));
    }

    let p = ModelParams::hpz(1.0, 0.1, 0.5, 0.05);
    let (ts, _) = validity_horizon(&p);
    let g = Grid::new(1, 32, 32, 13.0, 8.0).unwrap();
    let f = PhaseField::gaussian(g, 1.0, &[0.0], &[0.0], 1.0, 1.0);
    let cfg = StepConfig { dt: 0.0625, ..Default::default() };
    match stepper::run(&p, &cfg, 1.5 * ts, &f) {
        Ok(tr) => {
            let consistent = tr.records.iter().all(|x| x.flags.contains(RecordFlags::PAST_HORIZON) == (x.t > ts));
            let flagged = tr.records.iter().filter(|x| x.flags.contains(RecordFlags::PAST_HORIZON)).count();
            r.check(id, consistent && flagged > 0, "records beyond t* carry the horizon flag", format!("{flagged} of {} records flagged", tr.records.len()));
        }
        Err(e) => r.error(id, "HPZ run", e),
    }
    match stepper::run(&p, &cfg, 10.0, &f) {
        Ok(tr) => {
            let last = tr.records.last().unwrap();
            r.check(
                id,
                tr.status.exit_code() == 2 && (last.t - 2.0 * ts).abs() < 1e-12 && last.flags.contains(RecordFlags::CLAMPED),
                "runs past 2t* are clamped (exit status 2)",
                format!("stopped at t = {:.6}, status {}", last.t, tr.status.exit_code()),
            );
        }
        Err(e) => r.error(id, "HPZ clamp", e),
    }
}

// 10 ────────────────────────────────────────────────────────────────────────

fn c10_determinism(r: &mut Report) {
    let id = "10";
    let dir = std::env::temp_dir().join(format!("wmem-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |name: &str, threads: &str| -> wmem::WResult<Vec<u8>> {
        let path = dir.join(name);
        let flags: Vec<String> = [
            "--preset",
            "uz-nonlinear-gaussian",
            "--t_end",
            "0.25",
            "--threads",
            threads,
            "--csv",
            path.to_str().unwrap(),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let cfg = cli::parse_config("", &flags)?;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads.unwrap()).build().unwrap();
        pool.install(|| cli::execute(&cfg))?;
        std::fs::read(&path).map_err(|e| wmem::WError::Io { path, source: e })
    };
    match (run("a.csv", "4"), run("b.csv", "4"), run("c.csv", "1")) {
        (Ok(a), Ok(b), Ok(c)) => {
            r.check(id, a == b && !a.is_empty(), "identical runs give byte-identical CSV", format!("{} bytes, {} rows", a.len(), a.iter().filter(|&&x| x == b'\n').count()));
            r.check(id, a == c, "CSV independent of the worker count (4 vs 1)", format!("equal: {}", a == c));
        }
        (a, b, c) => {
            for e in [a.err(), b.err(), c.err()].into_iter().flatten() {
                r.error(id, "determinism run", e);
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
}

fn main() {
    let mut r = Report::default();
    let all = Instant::now();
    let steps: [(&str, fn(&mut Report)); 10] = [
        ("1 coefficient algebra (UZ)", c1_uz_coefficients),
        ("2 coefficient algebra (HPZ)", c2_hpz_coefficients),
        ("3 spot constants", c3_spot_constants),
        ("4 decay exponents", c4_decay),
        ("5 propagator", c5_propagator),
        ("6 Hartree operator", c6_hartree),
        ("7 linear evolution", c7_linear),
        ("8 nonlinear mild stepping", c8_nonlinear),
        ("9 HPZ guardrails", c9_hpz_guardrails),
        ("10 determinism", c10_determinism),
    ];
    for (title, f) in steps {
        println!("── criterion {title}");
        f(&mut r);
    }
    println!(
        "\nacceptance: {} passed, {} failed, {} expected failures ({:.1} s)",
        r.pass,
        r.fail,
        r.expected,
        all.elapsed().as_secs_f64()
    );
    if r.fail > 0 {
        std::process::exit(1);
    }
}
