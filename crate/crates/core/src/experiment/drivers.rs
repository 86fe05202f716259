use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, Mode, TimeScale};
use super::simulate::{simulate_pde, PdeRun, PdeRunConfig, SERIES_HEADER};
use crate::error::{Error, Result};
use crate::frame::{
    c1_constant, calibrate_c2, phi_eval, phi_property_checks, FrameContext, FrameParams, FrameRow,
};
use crate::initial::PreparednessReport;
use crate::ode::{convergence_sweep, integrate_with, mcf_exact, t_max, IntegrateOptions, OdeParams};
use crate::output::{ensure_dir, fmt_num, write_csv, write_csv_text, write_json, Check};
use crate::potential::{psi, scalar_constants, standing_wave, PsiTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_NOTHING_RAN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

/// Where and how a driver writes its outputs.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub out: PathBuf,
    /// Worker threads for sweeps; 0 picks the machine default.
    pub workers: usize,
    pub timescale: TimeScale,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub params: Value,
    pub checks: Vec<Check>,
    /// Paths relative to the output directory.
    pub files: Vec<String>,
    pub results: BTreeMap<String, Value>,
}

impl Summary {
    fn new(experiment: &str, cfg: &ExperimentConfig) -> Result<Self> {
        Ok(Self {
            experiment: experiment.to_string(),
            params: serde_json::to_value(cfg)?,
            checks: Vec::new(),
            files: Vec::new(),
            results: BTreeMap::new(),
        })
    }

    fn add_files(&mut self, root: &Path, files: impl IntoIterator<Item = PathBuf>) {
        for f in files {
            let rel = f.strip_prefix(root).unwrap_or(&f);
            self.files.push(rel.to_string_lossy().replace('\\', "/"));
        }
    }

    fn result(&mut self, key: &str, v: impl Serialize) -> Result<()> {
        self.results.insert(key.to_string(), serde_json::to_value(v)?);
        Ok(())
    }
}

/// Writes `summary.json` and maps the checks to an exit status: 0 when all
/// pass, 1 when any fails, 2 when none ran.
pub fn emit_summary(mut summary: Summary, out: &Path) -> Result<i32> {
    summary.files.push("summary.json".into());
    write_json(&out.join("summary.json"), &summary)?;
    Ok(if summary.checks.is_empty() {
        EXIT_NOTHING_RAN
    } else if summary.checks.iter().all(|c| c.pass) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

/// Runs the configured mode; `mode` overrides an absent `mode` key and must
/// agree with a present one.
pub fn run_experiment(cfg: &ExperimentConfig, mode: Option<Mode>, ctx: &RunContext) -> Result<i32> {
    cfg.validate()?;
    let mode = match (mode, cfg.mode) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Config(format!("subcommand wants mode {a}, config says {b}")))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(Error::Config("no mode given".into())),
    };
    ensure_dir(&ctx.out)?;
    let summary = match mode {
        Mode::Pde => run_pde(cfg, ctx)?,
        Mode::Ode => run_ode(cfg, ctx)?,
        Mode::Sweep => with_pool(ctx.workers, || run_sweep(cfg, ctx))?,
        Mode::Compare => with_pool(ctx.workers, || run_compare(cfg, ctx))?,
    };
    emit_summary(summary, &ctx.out)
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    pool.install(f)
}

fn time_factor(scale: TimeScale, eps: Option<f64>) -> Result<f64> {
    match (scale, eps) {
        (TimeScale::Fast, _) => Ok(1.0),
        (TimeScale::Slow, Some(e)) => Ok(1.0 / (e * e)),
        (TimeScale::Slow, None) => Err(Error::Config("slow time scale needs eps".into())),
    }
}

fn run_config(cfg: &ExperimentConfig, eps: f64) -> Result<PdeRunConfig> {
    let params = cfg.pde_params(eps)?;
    let snapshot_times = cfg.snapshot_fast_times(eps);
    if let Some(&last) = snapshot_times.last() {
        if last > params.t_end {
            return Err(Error::Config(format!(
                "snapshot at fast time {last} lies beyond t_end = {}",
                params.t_end
            )));
        }
    }
    Ok(PdeRunConfig {
        params,
        rho0: cfg.rho0,
        nu0: cfg.nu0,
        points_per_eps: cfg.points_per_eps,
        report_stride: cfg.report_stride,
        snapshot_times,
        dt: cfg.dt,
        horizon: cfg.horizon_or_default()?,
        t1: cfg.t1,
        tol: cfg.tol,
        alpha: cfg.alpha,
    })
}

fn write_pde_outputs(run: &PdeRun, dir: &Path, scale: TimeScale) -> Result<Vec<PathBuf>> {
    let eps = run.eps();
    let k = time_factor(scale, Some(eps))?;
    let slow = 1.0 / (eps * eps);
    let mut files = vec![write_csv(&dir.join("series.csv"), &SERIES_HEADER, &run.series_rows(k))?];
    files.push(write_csv(
        &dir.join("preparedness.csv"),
        &PreparednessReport::HEADER,
        &[run.preparedness.row()],
    )?);
    if run.frame.is_some() {
        let rows: Vec<Vec<Option<f64>>> = run
            .rows
            .iter()
            .filter_map(|r| {
                Some(
                    FrameRow {
                        t: r.t(),
                        e_phi: r.e_phi?,
                        p_phi: r.p_phi?,
                        d_eps_from_0: r.d_eps?,
                        alpha_margin: r.alpha_margin?,
                    }
                    .row(k),
                )
            })
            .collect();
        let mut header = vec!["t", "t_fast", "t_slow"];
        header.extend_from_slice(&FrameRow::HEADER[1..]);
        let rows: Vec<Vec<Option<f64>>> = rows
            .into_iter()
            .map(|mut r| {
                let t_fast = r[0].map(|t| t / k);
                r.splice(1..1, [t_fast, t_fast.map(|t| t * slow)]);
                r
            })
            .collect();
        files.push(write_csv(&dir.join("frame.csv"), &header, &rows)?);
    }
    for (i, s) in run.snapshots.iter().enumerate() {
        let name = format!("snapshot_{i:02}_tfast_{:.6}_tslow_{:.3}.csv", s.t, s.t * slow);
        let rows: Vec<Vec<Option<f64>>> = run
            .grid
            .r
            .iter()
            .zip(s.u.iter().zip(&s.w))
            .map(|(&r, (&u, &w))| vec![Some(s.t * k), Some(s.t), Some(s.t * slow), Some(r), Some(u), Some(w)])
            .collect();
        files.push(write_csv(
            &dir.join("snapshots").join(name),
            &["t", "t_fast", "t_slow", "r", "u", "u_t"],
            &rows,
        )?);
    }
    Ok(files)
}

fn pde_results(run: &PdeRun, summary: &mut Summary, prefix: &str) -> Result<()> {
    let eps = run.eps();
    let key = |k: &str| format!("{prefix}{k}");
    let ext = run.extinction_time();
    summary.result(&key("eps"), eps)?;
    summary.result(&key("tau"), run.config.params.tau)?;
    summary.result(&key("dt"), run.dt)?;
    summary.result(&key("steps"), run.steps)?;
    summary.result(&key("cells"), run.grid.n_cells)?;
    summary.result(&key("energy_initial"), run.e0)?;
    summary.result(&key("c0"), run.c0)?;
    summary.result(&key("g_bar"), run.g_bar)?;
    summary.result(&key("extinction_time_fast"), ext)?;
    summary.result(&key("extinction_time_slow"), ext.map(|t| t / (eps * eps)))?;
    summary.result(&key("max_abs_dissipation_residual"), run.max_abs_residual())?;
    summary.result(&key("holder_max_ratio"), run.holder_max)?;
    summary.result(&key("integrated_l1_omega_eps"), run.integrated_l1_ode())?;
    summary.result(&key("integrated_l1_omega_0"), run.integrated_l1_mcf())?;
    summary.result(&key("max_d_eps"), run.max_d_eps())?;
    summary.result(&key("mid_curvature_ratio"), run.mid_curvature_ratio().ok())?;
    summary.result(
        &key("ode_extinction_time"),
        run.ode.as_ref().and_then(|o| o.t_extinction),
    )?;
    summary.result(&key("weighted_energy_excess"), run.preparedness.excess)?;
    summary.result(&key("notes"), &run.notes)?;
    summary.result(&key("failure"), &run.failure)?;
    Ok(())
}

fn run_pde(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Summary> {
    let eps = cfg.eps_or_default();
    let run = simulate_pde(&run_config(cfg, eps)?)?;
    let mut summary = Summary::new("pde", cfg)?;
    let files = write_pde_outputs(&run, &ctx.out, ctx.timescale)?;
    summary.add_files(&ctx.out, files);
    summary.checks = run.checks();
    pde_results(&run, &mut summary, "")?;
    Ok(summary)
}

fn run_ode(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Summary> {
    let eta = cfg.ode_eta()?;
    let k = time_factor(ctx.timescale, cfg.eps)?;
    let p = OdeParams::new(cfg.n, eta, cfg.rho0, cfg.nu0)?;
    let traj = integrate_with(&p, IntegrateOptions { tol: cfg.tol, stride: cfg.ode_stride })?;
    let nm1 = f64::from(cfg.n - 1);
    let tm = t_max(cfg.n, cfg.rho0);
    let slow = cfg.eps.map(|e| 1.0 / (e * e));
    let rows: Vec<Vec<Option<f64>>> = traj
        .times
        .iter()
        .zip(traj.rho.iter().zip(&traj.nu))
        .map(|(&t, (&rho, &nu))| {
            let ro = (t < tm).then(|| mcf_exact(cfg.n, cfg.rho0, t).ok()).flatten();
            vec![
                Some(t * k),
                Some(t),
                slow.map(|s| t * s),
                Some(rho),
                Some(nu),
                ro,
                ro.map(|r| -nm1 / r),
            ]
        })
        .collect();
    let mut summary = Summary::new("ode", cfg)?;
    let file = write_csv(
        &ctx.out.join("trajectory.csv"),
        &["t", "t_fast", "t_slow", "rho", "nu", "rho_mcf", "nu_slow_manifold"],
        &rows,
    )?;
    summary.add_files(&ctx.out, [file]);
    let horizon = cfg.horizon.unwrap_or(7.0 / 9.0 * tm);
    summary.checks = traj.invariant_checks(Some(horizon));
    summary.checks.push(Check::from_margin(
        "ode_not_truncated",
        if traj.truncated { -1.0 } else { 0.0 },
    ));
    summary.result("eta", eta)?;
    summary.result("t_max", tm)?;
    summary.result("t_extinction", traj.t_extinction)?;
    summary.result("t_extinction_slow", traj.t_extinction.zip(slow).map(|(t, s)| t * s))?;
    summary.result("truncated", traj.truncated)?;
    summary.result("samples", traj.times.len())?;
    summary.result("warnings", &traj.warnings)?;
    Ok(summary)
}

struct Entry {
    eps: f64,
    dir: PathBuf,
    run: std::result::Result<PdeRun, String>,
    files: Vec<PathBuf>,
}

fn run_entries(cfg: &ExperimentConfig, ctx: &RunContext, list: &[f64]) -> Result<Vec<Entry>> {
    list.par_iter()
        .enumerate()
        .map(|(i, &eps)| {
            let dir = ctx.out.join(format!("eps_{i:02}_{eps}"));
            ensure_dir(&dir)?;
            let rc = run_config(cfg, eps)?;
            let (run, files) = match simulate_pde(&rc) {
                Ok(run) => {
                    let files = write_pde_outputs(&run, &dir, ctx.timescale)?;
                    (Ok(run), files)
                }
                Err(e) => (Err(e.to_string()), Vec::new()),
            };
            Ok(Entry { eps, dir, run, files })
        })
        .collect()
}

fn entry_name(eps: f64) -> String {
    format!("eps={eps}")
}

fn record_entries(entries: &[Entry], summary: &mut Summary, root: &Path) -> Result<()> {
    for e in entries {
        let name = entry_name(e.eps);
        summary.add_files(root, e.files.iter().cloned());
        match &e.run {
            Ok(run) => {
                for c in run.checks() {
                    summary.checks.push(Check { name: format!("{name}/{}", c.name), ..c });
                }
                pde_results(run, summary, &format!("{name}/"))?;
            }
            Err(msg) => {
                summary.checks.push(Check::from_margin(format!("{name}/pde_completed"), -1.0));
                summary.result(&format!("{name}/failure"), msg)?;
                summary.result(&format!("{name}/dir"), e.dir.strip_prefix(root).unwrap_or(&e.dir))?;
            }
        }
    }
    Ok(())
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn run_sweep(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Summary> {
    if cfg.eps_list.is_empty() && cfg.eta_list.is_empty() {
        return Err(Error::Config("sweep needs a nonempty eps_list or eta_list".into()));
    }
    let mut summary = Summary::new("sweep", cfg)?;
    if !cfg.eps_list.is_empty() {
        let entries = run_entries(cfg, ctx, &cfg.eps_list)?;
        let rows: Vec<Vec<String>> = entries
            .iter()
            .map(|e| match &e.run {
                Ok(r) => {
                    let ext = r.extinction_time();
                    let ok = r.checks().iter().all(|c| c.pass);
                    vec![
                        fmt_num(e.eps),
                        fmt_num(r.config.params.tau),
                        fmt_num(r.config.params.eta()),
                        r.steps.to_string(),
                        fmt_num(r.dt),
                        opt_cell(ext),
                        opt_cell(ext.map(|t| t / (e.eps * e.eps))),
                        fmt_num(r.sup_gap(r.config.t1, r.config.horizon)),
                        opt_cell(r.integrated_l1_ode()),
                        fmt_num(r.integrated_l1_mcf()),
                        opt_cell(r.max_d_eps()),
                        fmt_num(r.max_abs_residual()),
                        if ok { "pass" } else { "fail" }.into(),
                    ]
                }
                Err(_) => {
                    let mut row = vec![fmt_num(e.eps)];
                    row.extend(std::iter::repeat_n(String::new(), 11));
                    row.push("failed".into());
                    row
                }
            })
            .collect();
        let file = write_csv_text(
            &ctx.out.join("sweep.csv"),
            &[
                "eps",
                "tau",
                "eta",
                "steps",
                "dt",
                "extinction_fast",
                "extinction_slow",
                "sup_interface_gap",
                "l1_omega_eps",
                "l1_omega_0",
                "max_d_eps",
                "max_abs_residual",
                "status",
            ],
            &rows,
        )?;
        summary.add_files(&ctx.out, [file]);
        record_entries(&entries, &mut summary, &ctx.out)?;
    }
    if !cfg.eta_list.is_empty() {
        let horizon = cfg.horizon.unwrap_or(7.0 / 9.0 * t_max(cfg.n, cfg.rho0));
        let rows = convergence_sweep(cfg.n, cfg.rho0, cfg.nu0, &cfg.eta_list, horizon, cfg.t1, cfg.tol)?;
        let mut order_rho = f64::INFINITY;
        let mut nu_trend = f64::INFINITY;
        let cells: Vec<Vec<Option<f64>>> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let (ratio, order) = if i > 0 {
                    let prev = &rows[i - 1];
                    let ratio = prev.sup_error_rho / r.sup_error_rho;
                    let order = ratio.ln() / (prev.eta / r.eta).ln();
                    order_rho = order_rho.min(order - 5f64.log10()).min(20f64.log10() - order);
                    nu_trend = nu_trend.min(prev.sup_error_nu - r.sup_error_nu);
                    (Some(ratio), Some(order))
                } else {
                    (None, None)
                };
                vec![Some(r.eta), Some(r.sup_error_rho), Some(r.sup_error_nu), ratio, order]
            })
            .collect();
        let file = write_csv(
            &ctx.out.join("ode_convergence.csv"),
            &["eta", "sup_error_rho", "sup_error_nu", "ratio_rho", "order_rho"],
            &cells,
        )?;
        summary.add_files(&ctx.out, [file]);
        if rows.len() >= 2 {
            summary.checks.push(Check::from_margin("ode_first_order_rate", order_rho));
            summary.checks.push(Check::from_margin("ode_nu_convergence", nu_trend));
        }
    }
    Ok(summary)
}

/// One line of the convergence table produced by compare mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub eps: f64,
    pub tau: f64,
    pub l1_omega_eps: Option<f64>,
    pub l1_omega_0: Option<f64>,
    pub sup_interface_gap: Option<f64>,
    pub max_d_eps: Option<f64>,
    pub extinction_fast: Option<f64>,
    pub failed: bool,
}

fn decreasing_margin(vals: &[Option<f64>]) -> f64 {
    vals.windows(2)
        .map(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => a - b,
            _ => f64::NEG_INFINITY,
        })
        .fold(f64::INFINITY, f64::min)
}

/// `(P_phi, phi(-C1 d - eps^{1/2}))` at every row where both are defined.
fn lower_bound_samples(run: &PdeRun, c1: f64) -> Vec<(f64, f64)> {
    let p = &run.config.params;
    let se = p.eps.sqrt();
    run.rows
        .iter()
        .filter_map(|r| {
            let (pp, d, rho, nu) = (r.p_phi?, r.d_eps?, r.rho_ode?, r.nu_ode?);
            let arg = -c1 * d - se;
            if arg < -rho {
                return None;
            }
            Some((pp, phi_eval(p.n, p.eps, p.tau, rho, nu, arg).ok()?))
        })
        .collect()
}

fn run_compare(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Summary> {
    if cfg.eps_list.len() < 3 {
        return Err(Error::Config("compare needs at least three eps values".into()));
    }
    let mut list = cfg.eps_list.clone();
    list.sort_by(|a, b| b.total_cmp(a));
    list.dedup();
    if list.len() < 3 {
        return Err(Error::Config("compare needs at least three distinct eps values".into()));
    }
    let mut summary = Summary::new("compare", cfg)?;
    let entries = run_entries(cfg, ctx, &list)?;
    let table: Vec<CompareRow> = entries
        .iter()
        .map(|e| match &e.run {
            Ok(r) => CompareRow {
                eps: e.eps,
                tau: r.config.params.tau,
                l1_omega_eps: r.integrated_l1_ode(),
                l1_omega_0: Some(r.integrated_l1_mcf()),
                sup_interface_gap: Some(r.sup_gap(r.config.t1, r.config.horizon)),
                max_d_eps: r.max_d_eps(),
                extinction_fast: r.extinction_time(),
                failed: r.failure.is_some(),
            },
            Err(_) => CompareRow {
                eps: e.eps,
                tau: cfg.schedule().map(|s| s.tau(e.eps)).unwrap_or(f64::NAN),
                l1_omega_eps: None,
                l1_omega_0: None,
                sup_interface_gap: None,
                max_d_eps: None,
                extinction_fast: None,
                failed: true,
            },
        })
        .collect();
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|r| {
            vec![
                fmt_num(r.eps),
                fmt_num(r.tau),
                fmt_num(r.eps * r.eps * r.tau),
                opt_cell(r.l1_omega_eps),
                opt_cell(r.l1_omega_0),
                opt_cell(r.sup_interface_gap),
                opt_cell(r.max_d_eps),
                opt_cell(r.extinction_fast),
                if r.failed { "failed" } else { "ok" }.into(),
            ]
        })
        .collect();
    let file = write_csv_text(
        &ctx.out.join("compare.csv"),
        &[
            "eps",
            "tau",
            "eta",
            "l1_omega_eps",
            "l1_omega_0",
            "sup_interface_gap",
            "max_d_eps",
            "extinction_fast",
            "status",
        ],
        &rows,
    )?;
    summary.add_files(&ctx.out, [file]);
    record_entries(&entries, &mut summary, &ctx.out)?;

    let col = |f: fn(&CompareRow) -> Option<f64>| table.iter().map(f).collect::<Vec<_>>();
    let l1e = col(|r| r.l1_omega_eps);
    let l10 = col(|r| r.l1_omega_0);
    summary.checks.push(Check::from_margin("compare_l1_omega_eps_decreasing", decreasing_margin(&l1e)));
    summary.checks.push(Check::from_margin("compare_l1_omega_0_decreasing", decreasing_margin(&l10)));
    let halving = |v: &[Option<f64>]| match (v.first().copied().flatten(), v.last().copied().flatten()) {
        (Some(a), Some(b)) => 0.5 * a - b,
        _ => f64::NEG_INFINITY,
    };
    summary.checks.push(Check::from_margin("compare_l1_omega_eps_halving", halving(&l1e)));
    summary.checks.push(Check::from_margin("compare_l1_omega_0_halving", halving(&l10)));
    summary.checks.push(Check::from_margin(
        "compare_d_eps_decreasing",
        decreasing_margin(&col(|r| r.max_d_eps)),
    ));

    // Calibrate C2 on the coarsest run, then test the finer ones.
    let runs: Vec<&PdeRun> = entries.iter().filter_map(|e| e.run.as_ref().ok()).collect();
    if let Some(coarse) = runs.first() {
        let c1 = c1_constant(&coarse.config.params.potential)?;
        let c2 = calibrate_c2(&lower_bound_samples(coarse, c1), coarse.c0, coarse.eps());
        let mut margin = f64::INFINITY;
        let mut tested = 0usize;
        for r in runs.iter().skip(1) {
            let se = r.eps().sqrt();
            for (pp, phi) in lower_bound_samples(r, c1) {
                margin = margin.min(pp - phi * (r.c0 - c2 * se));
                tested += 1;
            }
        }
        summary.result("lower_bound_c1", c1)?;
        summary.result("lower_bound_c2", c2)?;
        summary.result("lower_bound_calibration_eps", coarse.eps())?;
        summary.result("lower_bound_samples", tested)?;
        if tested > 0 {
            summary.checks.push(Check::from_margin("frame_lower_bound", margin));
        }
    }
    summary.result("table", &table)?;
    Ok(summary)
}

/// Invariant suite: potential constants, the standing wave, the interface
/// ODE, properties of `phi`, and a short PDE run.
pub fn run_check(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<i32> {
    cfg.validate()?;
    ensure_dir(&ctx.out)?;
    let mut summary = Summary::new("check", cfg)?;
    let potential = cfg.potential.build()?;
    let consts = scalar_constants(&potential, &cfg.damping()?)?;
    summary.result("c0", consts.c0)?;
    summary.result("sqrt_f_l1", consts.sqrt_f_l1)?;
    summary.result("g_bar", consts.g_bar)?;

    let table = PsiTable::new(&potential)?;
    let mut mono = f64::INFINITY;
    let mut prev = table.eval(-1.5)?;
    for k in 1..=300 {
        let v = table.eval(-1.5 + 0.01 * k as f64)?;
        mono = mono.min(v - prev);
        prev = v;
    }
    summary.checks.push(Check::from_margin("psi_monotone", mono));
    summary.checks.push(Check::from_margin(
        "psi_c0_consistent",
        1e-9 - (psi(&potential, 1.0)? - psi(&potential, -1.0)? - consts.c0).abs(),
    ));

    // Heteroclinic identity U' = sqrt(2F(U)) by centered differences.
    let wave = standing_wave(&potential, 20.0, 4001)?;
    let h = 1e-4;
    let mut wave_res: f64 = 0.0;
    for k in 0..=160 {
        let z = -8.0 + 0.1 * k as f64;
        let d = (wave.eval(z + h) - wave.eval(z - h)) / (2.0 * h);
        wave_res = wave_res.max((d - potential.sqrt_2f(wave.eval(z))).abs());
    }
    summary.checks.push(Check::from_margin("standing_wave_residual", 1e-6 - wave_res));

    let eps = cfg.eps_or_default();
    let tau = cfg.schedule()?.tau(eps);
    let eta = cfg.eta.unwrap_or(eps * eps * tau);
    let op = OdeParams::new(cfg.n, eta, cfg.rho0, cfg.nu0)?;
    let traj = integrate_with(&op, IntegrateOptions { tol: cfg.tol, stride: 1 })?;
    let tm = t_max(cfg.n, cfg.rho0);
    let horizon = cfg.horizon.unwrap_or(7.0 / 9.0 * tm);
    summary.checks.extend(traj.invariant_checks(Some(horizon)));

    let fctx = FrameContext { n: cfg.n, eps, tau };
    let mut frame = FrameParams::with_defaults(cfg.n, cfg.rho0, horizon)?;
    frame.alpha = cfg.alpha;
    let times: Vec<f64> = (0..50).map(|k| horizon * (k as f64 + 0.5) / 50.0).collect();
    summary
        .checks
        .extend(phi_property_checks(&traj, fctx, &frame, &times, 0.05, 1e-6)?);

    let mut rc = run_config(cfg, eps)?;
    rc.params.t_end = rc.params.t_end.min(0.02);
    rc.snapshot_times = vec![0.0, 0.5 * rc.params.t_end, rc.params.t_end];
    let run = simulate_pde(&rc)?;
    for c in run.checks() {
        if c.name != "curvature_law" {
            summary.checks.push(Check { name: format!("pde_short/{}", c.name), ..c });
        }
    }
    let rows: Vec<Vec<String>> = summary
        .checks
        .iter()
        .map(|c| vec![c.name.clone(), c.pass.to_string(), fmt_num(c.margin)])
        .collect();
    let file = write_csv_text(&ctx.out.join("checks.csv"), &["name", "pass", "margin"], &rows)?;
    summary.add_files(&ctx.out, [file]);
    summary.result("eta", eta)?;
    summary.result("pde_short_t_end", rc.params.t_end)?;
    summary.result("note", json!("ODE and phi checks use eta = eps^2 tau unless eta is set"))?;
    emit_summary(summary, &ctx.out)
}
