//! Memory and kernel coefficients for both models, with their horizons.
//!
//! cargo run --release --example coefficients

use wmem::memory_coeffs::{uz_positivity_horizon, HpzConsts};
use wmem::{kernel_coeffs, validity_horizon, ModelParams};

fn main() -> wmem::WResult<()> {
    let uz = ModelParams::uz(0.5, 0.2);
    println!("UZ γ=0.5 Γ=0.2; positivity of 4ÃC̃−B̃² holds until t = {:.6}", uz_positivity_horizon(&uz));
    println!("{:>6} {:>14} {:>14} {:>14} {:>14} {:>14}", "t", "A", "B", "C", "Ã", "D");
    for t in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let c = kernel_coeffs(t, &uz, 1)?;
        println!(
            "{t:>6.2} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
            c.abc.a, c.abc.b, c.abc.c, c.tilde.a, c.disc
        );
    }

    let hpz = ModelParams::hpz(1.0, 0.1, 0.5, 0.05);
    let (ts, tss) = validity_horizon(&hpz);
    println!("\nHPZ δ=1 Γ=0.1 β=0.5 Ω=0.05; t* = {ts:.6}, √3 t* = {tss:.6}");
    let h: HpzConsts<f64> = (&hpz).into();
    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}", "t", "a", "b", "c", "d", "g_a", "g_d");
    for f in [0.25, 0.5, 0.75, 1.0] {
        let t = f * ts;
        let m = h.memory(t);
        let c = kernel_coeffs(t, &hpz, 1)?;
        println!(
            "{t:>6.3} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            m[0], m[1], m[2], m[3], c.g_a, c.g_d
        );
    }
    Ok(())
}
