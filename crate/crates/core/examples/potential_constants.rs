//! Transition energy, Psi, the mobility average, and the standing wave for
//! the quartic double well and an affine damping.

use hyperac::potential::{psi, quartic_potential, scalar_constants, standing_wave, Damping};

fn main() -> hyperac::Result<()> {
    let p = quartic_potential();
    let g: Damping = "affine:2,1".parse()?;
    let k = scalar_constants(&p, &g)?;
    println!("c0          = {:.12}  (2 sqrt2 / 3 = {:.12})", k.c0, 2.0 * 2f64.sqrt() / 3.0);
    println!("|sqrt F|_1  = {:.12}", k.sqrt_f_l1);
    println!("g_bar       = {:.12}  for g(s) = {g}", k.g_bar);
    println!("\n{:>6} {:>14}", "s", "Psi(s)");
    for s in [-1.5, -1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 1.5] {
        println!("{s:>6.2} {:>14.10}", psi(&p, s)?);
    }
    let wave = standing_wave(&p, 20.0, 4001)?;
    println!("\n{:>6} {:>16} {:>16}", "z", "U0(z)", "tanh(z/sqrt2)");
    for z in [-6.0, -2.0, -0.5, 0.0, 0.5, 2.0, 6.0] {
        println!("{z:>6.2} {:>16.12} {:>16.12}", wave.eval(z), (z / 2f64.sqrt()).tanh());
    }
    Ok(())
}
