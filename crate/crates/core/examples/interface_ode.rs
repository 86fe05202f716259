//! Interface radius ODE: extinction versus the classical flow, invariant
//! checks, and the singular-perturbation rate as the inertia vanishes.

use hyperac::ode::{convergence_sweep, integrate_to_extinction, t_max, OdeParams, DEFAULT_TOL};

fn main() -> hyperac::Result<()> {
    let (n, rho0) = (2, 0.6);
    println!("classical extinction T_max = {}", t_max(n, rho0));
    for eta in [1e-2, 1e-3, 1e-4] {
        let traj = integrate_to_extinction(&OdeParams::new(n, eta, rho0, 0.0)?, DEFAULT_TOL)?;
        let failed: Vec<_> = traj.invariant_checks(None).into_iter().filter(|c| !c.pass).collect();
        println!(
            "eta = {eta:.0e}: t_ext = {:.8}, {} samples, failed checks: {failed:?}",
            traj.t_extinction.unwrap_or(f64::NAN),
            traj.times.len()
        );
    }
    println!("\n{:>8} {:>14} {:>14}", "eta", "sup|rho-rho0|", "sup|nu+K|");
    for row in convergence_sweep(n, rho0, 0.0, &[1e-3, 1e-4, 1e-5], 0.15, 0.02, 1e-10)? {
        println!("{:>8.0e} {:>14.6e} {:>14.6e}", row.eta, row.sup_error_rho, row.sup_error_nu);
    }
    Ok(())
}
