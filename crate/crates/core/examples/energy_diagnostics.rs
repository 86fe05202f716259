//! Energy dissipation identity, its time-step convergence, and the Psi
//! variation bounds on snapshots.

use hyperac::diagnostics::{psi_variation, EnergyModel, EnergyMonitor};
use hyperac::initial::layer_initial_data;
use hyperac::pde::{build_grid, run, stable_dt, PdeParams, RunOptions, RUN_SAFETY};
use hyperac::potential::{quartic_potential, standing_wave};

fn main() -> hyperac::Result<()> {
    let eps = 0.04;
    let params = PdeParams::new(2, eps, 1.0, 0.1)?;
    let grid = build_grid(eps, 10)?;
    let wave = standing_wave(&quartic_potential(), 20.0, 4001)?;
    let init = layer_initial_data(&grid, eps, 0.6, &wave)?;
    let base = stable_dt(&params, &grid, RUN_SAFETY)?;
    for dt in [base, base / 2.0, base / 4.0] {
        let stride = (0.01 / dt).round() as usize;
        let mut mon = EnergyMonitor::new(&params, &grid, stride);
        let opts = RunOptions { dt: Some(dt), ..RunOptions::default() };
        run(&params, &grid, &init, &opts, |s| {
            mon.observe(s);
            Ok(())
        })?;
        let reps = mon.finish();
        let worst = reps.iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
        println!("dt = {dt:.3e}: E(0) = {:.8}, max interval residual = {worst:.3e}", reps[0].e_eps);
    }
    let opts = RunOptions {
        snapshot_times: vec![0.0, 0.02, 0.05, 0.1],
        ..RunOptions::default()
    };
    let out = run(&params, &grid, &init, &opts, |_| Ok(()))?;
    let model = EnergyModel::new(&params, &grid);
    let e0 = model.energy(&init);
    let var = psi_variation(&out.snapshots, &model, 1.0, e0)?;
    for (s, (t, bv)) in out.snapshots.iter().zip(&var.grad_bv) {
        println!("t = {t:.3}: grad BV of Psi(u) = {bv:.6} <= E = {:.6}", model.energy(s));
    }
    println!("max Holder ratio = {:.4}", var.max_holder_ratio());
    Ok(())
}
