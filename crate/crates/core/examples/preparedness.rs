//! Weighted energy and residual of layer initial data as eps decreases.

use hyperac::initial::{layer_initial_data, preparedness};
use hyperac::pde::build_grid;
use hyperac::potential::{quartic_potential, standing_wave};

fn main() -> hyperac::Result<()> {
    let p = quartic_potential();
    let wave = standing_wave(&p, 40.0, 8001)?;
    println!("{:>6} {:>14} {:>14} {:>14} {:>14}", "eps", "weighted E", "E - c0", "R", "R eps^5 tau");
    for eps in [0.08, 0.04, 0.02, 0.01] {
        let grid = build_grid(eps, 10)?;
        let init = layer_initial_data(&grid, eps, 0.6, &wave)?;
        let r = preparedness(&init, &grid, eps, 1.0, 2, 0.6, &p, 1.0)?;
        println!(
            "{eps:>6} {:>14.8} {:>14.3e} {:>14.4e} {:>14.4e}",
            r.weighted_energy, r.excess, r.residual_r, r.residual_ratio
        );
    }
    Ok(())
}
