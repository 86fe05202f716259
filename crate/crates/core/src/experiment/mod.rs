//! Experiment orchestration: configuration, single runs, sweeps, convergence
//! tables, and the invariant suite, each writing CSV files and a summary.

mod config;
mod drivers;
mod simulate;

pub use config::{ExperimentConfig, Mode, PotentialSpec, TauSchedule, TimeScale, DEFAULT_EPS};
pub use drivers::{
    emit_summary, run_check, run_experiment, CompareRow, RunContext, Summary, EXIT_ERROR,
    EXIT_FAILED, EXIT_NOTHING_RAN, EXIT_OK,
};
pub use simulate::{simulate_pde, PdeRun, PdeRunConfig, SeriesRow, SERIES_HEADER};
