//! Moving-frame energy and layer distance along an eps = 0.02 run, using the
//! interface ODE for the frame.

use hyperac::experiment::{simulate_pde, PdeRunConfig};

fn main() -> hyperac::Result<()> {
    let cfg = PdeRunConfig {
        report_stride: 500,
        ..PdeRunConfig::standard(0.02, 1.0, 0.14)?
    };
    let run = simulate_pde(&cfg)?;
    let frame = run.frame.expect("frame conditions hold for this run");
    println!("alpha = {}, window half-width a = {:.4}", frame.alpha, frame.a);
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "t", "E_phi", "P_phi", "d_eps", "rho_ode");
    for r in &run.rows {
        println!(
            "{:>8.4} {:>12.8} {:>12.8} {:>12.4e} {:>12.6}",
            r.t(),
            r.e_phi.unwrap_or(f64::NAN),
            r.p_phi.unwrap_or(f64::NAN),
            r.d_eps.unwrap_or(f64::NAN),
            r.rho_ode.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
