//! Convergence to the sharp-interface limits through the compare driver.
//! Writes its outputs under the system temporary directory.

use hyperac::experiment::{run_experiment, ExperimentConfig, Mode, RunContext, TimeScale};

fn main() -> hyperac::Result<()> {
    let cfg = ExperimentConfig::from_toml_str("eps_list = [0.04, 0.02, 0.01]\n")?;
    let out = std::env::temp_dir().join("hyperac_mcf_limit");
    let ctx = RunContext { out: out.clone(), workers: 0, timescale: TimeScale::Fast };
    let code = run_experiment(&cfg, Some(Mode::Compare), &ctx)?;
    print!("{}", std::fs::read_to_string(out.join("compare.csv")).expect("table written"));
    println!("exit status {code}; outputs in {}", out.display());
    Ok(())
}
