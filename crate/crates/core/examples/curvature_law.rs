//! Interface velocity against curvature for g(s) = 2 + s, where the mobility
//! average is 2 and the classical extinction time doubles.

use hyperac::experiment::{simulate_pde, PdeRunConfig};
use hyperac::pde::PdeParams;

fn main() -> hyperac::Result<()> {
    for eps in [0.04, 0.02] {
        let params = PdeParams::new(2, eps, 1.0, 0.4)?.with_damping("affine:2,1".parse()?)?;
        let cfg = PdeRunConfig {
            params,
            horizon: 0.28,
            ..PdeRunConfig::standard(eps, 1.0, 0.4)?
        };
        let run = simulate_pde(&cfg)?;
        println!(
            "eps = {eps}: g_bar = {:.6}, mid ratio g_bar|V|/K = {:.5}, extinction = {:?} (limit 0.36)",
            run.g_bar,
            run.mid_curvature_ratio()?,
            run.extinction_time()
        );
    }
    Ok(())
}
