//! Shrinking circle at eps = 0.02, tau = 1 with snapshots at slow times
//! 100, 250, 400, 450 and the interface radius along the way.

use hyperac::diagnostics::extract_interface;
use hyperac::initial::layer_initial_data;
use hyperac::pde::{build_grid, run, to_slow_time, PdeParams, RunOptions};
use hyperac::potential::{quartic_potential, standing_wave};

fn main() -> hyperac::Result<()> {
    let eps = 0.02;
    let params = PdeParams::new(2, eps, 1.0, 0.2)?;
    let grid = build_grid(eps, 10)?;
    let wave = standing_wave(&quartic_potential(), 20.0, 4001)?;
    let init = layer_initial_data(&grid, eps, 0.6, &wave)?;
    let slow = [100.0, 250.0, 400.0, 450.0];
    let opts = RunOptions {
        snapshot_times: slow.iter().map(|t| t * eps * eps).collect(),
        stride: 500,
        dt: None,
    };
    let mut rho = None;
    let out = run(&params, &grid, &init, &opts, |s| {
        rho = extract_interface(s, &grid, rho);
        println!("t_fast = {:.3}  rho = {rho:?}", s.t);
        Ok(())
    })?;
    println!("\n{} steps of dt = {:.2e}", out.steps, out.dt);
    for s in &out.snapshots {
        println!(
            "slow t = {:>5.0}: u(0) = {:+.4}, interface at {:?}",
            to_slow_time(s.t, eps),
            s.u[0],
            extract_interface(s, &grid, None)
        );
    }
    Ok(())
}
