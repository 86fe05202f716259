//! A single PDE run with its interface ODE companion and every diagnostic
//! the drivers report.

use crate::diagnostics::{
    extract_interface, l1_step_distance, psi_variation, velocity_curvature_check, CurvatureRow,
    EnergyMonitor, EnergyReport,
};
use crate::error::{invalid, Result};
use crate::frame::{d_eps, e_phi, to_moving_frame, FrameContext, FrameParams, MovingFrameView};
use crate::initial::{layer_initial_data, preparedness, PreparednessReport};
use crate::ode::{integrate_with, mcf_exact, t_max, IntegrateOptions, OdeParams, OdeTrajectory};
use crate::output::Check;
use crate::pde::{build_grid, run_partial, FieldState, PdeParams, RadialGrid, RunOptions};
use crate::potential::{scalar_constants, standing_wave, Damping, PsiTable};

/// Inputs of one PDE run.
#[derive(Debug, Clone)]
pub struct PdeRunConfig {
    pub params: PdeParams,
    pub rho0: f64,
    /// Initial interface velocity handed to the ODE companion.
    pub nu0: f64,
    pub points_per_eps: usize,
    pub report_stride: usize,
    /// Fast times.
    pub snapshot_times: Vec<f64>,
    pub dt: Option<f64>,
    pub horizon: f64,
    pub t1: f64,
    pub tol: f64,
    pub alpha: f64,
}

impl PdeRunConfig {
    /// Quartic `F`, `g = 1`, `rho0 = 0.6`, ten points per `eps`, `T = 0.14`.
    pub fn standard(eps: f64, tau: f64, t_end: f64) -> Result<Self> {
        Ok(Self {
            params: PdeParams::new(2, eps, tau, t_end)?,
            rho0: 0.6,
            nu0: 0.0,
            points_per_eps: 10,
            report_stride: 10,
            snapshot_times: Vec::new(),
            dt: None,
            horizon: 0.14,
            t1: 0.02,
            tol: crate::ode::DEFAULT_TOL,
            alpha: crate::frame::DEFAULT_ALPHA,
        })
    }
}

/// One row of the time series, aligned with the energy reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub energy: EnergyReport,
    pub rho_pde: Option<f64>,
    pub rho_ode: Option<f64>,
    pub nu_ode: Option<f64>,
    /// Limiting flow `g_bar rho' = -(n-1)/rho`; zero after extinction.
    pub rho_mcf: f64,
    /// L1 distance to the step at the ODE radius.
    pub l1_ode: Option<f64>,
    /// L1 distance to the step at the limiting radius.
    pub l1_mcf: f64,
    pub e_phi: Option<f64>,
    pub p_phi: Option<f64>,
    pub d_eps: Option<f64>,
    pub alpha_margin: Option<f64>,
}

impl SeriesRow {
    pub fn t(&self) -> f64 {
        self.energy.t
    }
}

pub const SERIES_HEADER: [&str; 21] = [
    "t",
    "t_fast",
    "t_slow",
    "E_eps",
    "dissipation_lhs",
    "dissipation_rhs",
    "residual",
    "kappa_lhs",
    "psi_grad_bv",
    "potential_mass",
    "rho_pde",
    "rho_ode",
    "nu_ode",
    "rho_mcf",
    "l1_omega_eps",
    "l1_omega_0",
    "E_phi",
    "P_phi",
    "d_eps",
    "alpha_margin",
    "interface_gap",
];

#[derive(Debug, Clone)]
pub struct PdeRun {
    pub config: PdeRunConfig,
    pub grid: RadialGrid,
    pub dt: f64,
    pub steps: usize,
    pub e0: f64,
    pub c0: f64,
    pub g_bar: f64,
    pub rows: Vec<SeriesRow>,
    pub snapshots: Vec<FieldState>,
    pub final_state: FieldState,
    /// Present when `g = 1`, the case the interface ODE describes.
    pub ode: Option<OdeTrajectory>,
    pub frame: Option<FrameParams>,
    pub notes: Vec<String>,
    pub failure: Option<String>,
    pub preparedness: PreparednessReport,
    pub holder_max: Option<f64>,
}

fn limit_radius(n: u32, rho0: f64, g_bar: f64, t: f64) -> f64 {
    let s = t / g_bar;
    if s >= t_max(n, rho0) {
        0.0
    } else {
        mcf_exact(n, rho0, s).unwrap_or(0.0)
    }
}

struct FrameState {
    ctx: FrameContext,
    params: FrameParams,
    table: PsiTable,
    first: Option<MovingFrameView>,
}

/// Runs the PDE from layer data at `rho0` and assembles the series.
///
/// Errors only on invalid inputs; a failure mid-run is recorded in
/// [`PdeRun::failure`] and the progress so far is kept.
pub fn simulate_pde(cfg: &PdeRunConfig) -> Result<PdeRun> {
    let p = &cfg.params;
    p.validate()?;
    let grid = build_grid(p.eps, cfg.points_per_eps)?;
    let consts = scalar_constants(&p.potential, &p.damping)?;
    let profile = standing_wave(&p.potential, 40.0, 8001)?;
    let init = layer_initial_data(&grid, p.eps, cfg.rho0, &profile)?;
    let prep = preparedness(&init, &grid, p.eps, p.tau, p.n, cfg.rho0, &p.potential, 1.0)?;
    let mut notes = Vec::new();

    let ode = if p.damping == Damping::Constant(1.0) {
        let op = OdeParams::new(p.n, p.eta(), cfg.rho0, cfg.nu0)?;
        Some(integrate_with(&op, IntegrateOptions { tol: cfg.tol, stride: 1 })?)
    } else {
        notes.push("damping is not g = 1; ODE companion and moving frame skipped".into());
        None
    };

    let mut frame = None;
    if let Some(traj) = &ode {
        let ctx = FrameContext { n: p.n, eps: p.eps, tau: p.tau };
        let built = FrameParams::with_defaults(p.n, cfg.rho0, cfg.horizon).and_then(|mut f| {
            f.alpha = cfg.alpha;
            f.validate_against(traj, p.eps, p.tau)?;
            Ok(f)
        });
        match built {
            Ok(params) => {
                frame = Some(FrameState {
                    ctx,
                    params,
                    table: PsiTable::new(&p.potential)?,
                    first: None,
                })
            }
            Err(e) => notes.push(format!("moving frame skipped: {e}")),
        }
    }

    let mut monitor = EnergyMonitor::new(p, &grid, cfg.report_stride);
    let mut extras: Vec<SeriesRow> = Vec::new();
    let mut calls = 0usize;
    let mut last_t = f64::NAN;
    let mut prev_rho: Option<f64> = None;
    let mut extras_for = |s: &FieldState, frame: &mut Option<FrameState>| -> Result<SeriesRow> {
        let rho_pde = extract_interface(s, &grid, prev_rho);
        prev_rho = rho_pde;
        let ode_state = ode.as_ref().map(|traj| traj.state_at(s.t).unwrap_or((0.0, 0.0)));
        let rho_mcf = limit_radius(p.n, cfg.rho0, consts.g_bar, s.t);
        let mut row = SeriesRow {
            energy: EnergyReport {
                t: s.t,
                e_eps: 0.0,
                dissipation_lhs: 0.0,
                dissipation_rhs: 0.0,
                residual: 0.0,
                kappa_lhs: 0.0,
                psi_grad_bv: 0.0,
                potential_mass: 0.0,
                interface_rho: None,
            },
            rho_pde,
            rho_ode: ode_state.map(|x| x.0),
            nu_ode: ode_state.map(|x| x.1),
            rho_mcf,
            l1_ode: ode_state.map(|x| l1_step_distance(s, &grid, p.n, x.0)),
            l1_mcf: l1_step_distance(s, &grid, p.n, rho_mcf),
            e_phi: None,
            p_phi: None,
            d_eps: None,
            alpha_margin: None,
        };
        if let (Some(fs), Some((rho, nu))) = (frame.as_mut(), ode_state) {
            if s.t <= fs.params.horizon {
                let view = to_moving_frame(s, &grid, fs.ctx, rho, nu)?;
                let (e, pp) = e_phi(&view, &p.potential);
                row.e_phi = Some(e);
                row.p_phi = Some(pp);
                row.alpha_margin = Some(1.0 - p.eta() * nu * nu - fs.params.alpha);
                let first = fs.first.get_or_insert(view.clone());
                row.d_eps = Some(d_eps(first, &view, fs.params.a, &fs.table)?);
            }
        }
        Ok(row)
    };

    let opts = RunOptions {
        snapshot_times: cfg.snapshot_times.clone(),
        stride: 1,
        dt: cfg.dt,
    };
    let stride = cfg.report_stride.max(1);
    let (out, failure) = run_partial(p, &grid, &init, &opts, |s| {
        monitor.observe(s);
        if calls == 0 || calls.is_multiple_of(stride) {
            extras.push(extras_for(s, &mut frame)?);
            last_t = s.t;
        }
        calls += 1;
        Ok(())
    })?;
    let final_state = out.final_state;
    let reports = monitor.finish();
    if last_t != final_state.t {
        extras.push(extras_for(&final_state, &mut frame)?);
    }
    if reports.len() != extras.len() {
        return Err(invalid(format!(
            "series misaligned: {} energy reports, {} rows",
            reports.len(),
            extras.len()
        )));
    }
    let rows: Vec<SeriesRow> = reports
        .into_iter()
        .zip(extras)
        .map(|(energy, mut row)| {
            row.energy = energy;
            row
        })
        .collect();

    let e0 = rows.first().map_or(0.0, |r| r.energy.e_eps);
    let holder_max = if out.snapshots.len() >= 2 {
        let model = crate::diagnostics::EnergyModel::new(p, &grid);
        Some(psi_variation(&out.snapshots, &model, p.damping.kappa(), e0)?.max_holder_ratio())
    } else {
        None
    };

    Ok(PdeRun {
        config: cfg.clone(),
        grid,
        dt: out.dt,
        steps: out.steps,
        e0,
        c0: consts.c0,
        g_bar: consts.g_bar,
        rows,
        snapshots: out.snapshots,
        final_state,
        ode,
        frame: frame.map(|f| f.params),
        notes,
        failure: failure.map(|e| e.to_string()),
        preparedness: prep,
        holder_max,
    })
}

impl PdeRun {
    pub fn eps(&self) -> f64 {
        self.config.params.eps
    }

    /// First series time at which the layer has vanished, once it existed.
    pub fn extinction_time(&self) -> Option<f64> {
        let mut seen = false;
        for r in &self.rows {
            match r.rho_pde {
                Some(_) => seen = true,
                None if seen => return Some(r.t()),
                None => {}
            }
        }
        None
    }

    /// `sup |rho_pde - rho_ode|` over rows in `[lo, hi]`; infinite if the
    /// layer or the ODE is missing there.
    pub fn sup_gap(&self, lo: f64, hi: f64) -> f64 {
        let mut sup: f64 = 0.0;
        for r in self.rows.iter().filter(|r| r.t() >= lo && r.t() <= hi) {
            match (r.rho_pde, r.rho_ode) {
                (Some(a), Some(b)) => sup = sup.max((a - b).abs()),
                _ => return f64::INFINITY,
            }
        }
        sup
    }

    fn integrate_rows(&self, f: impl Fn(&SeriesRow) -> Option<f64>) -> Option<f64> {
        let h = self.config.horizon;
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.t() <= h)
            .map(|r| f(r).map(|v| (r.t(), v)))
            .collect::<Option<_>>()?;
        Some(pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum())
    }

    /// Time integral over `[0, T]` of the L1 distance to the step at the ODE radius.
    pub fn integrated_l1_ode(&self) -> Option<f64> {
        self.ode.as_ref()?;
        self.integrate_rows(|r| r.l1_ode)
    }

    /// Time integral over `[0, T]` of the L1 distance to the limiting step.
    pub fn integrated_l1_mcf(&self) -> f64 {
        self.integrate_rows(|r| Some(r.l1_mcf)).unwrap_or(f64::NAN)
    }

    pub fn max_d_eps(&self) -> Option<f64> {
        self.frame?;
        self.rows.iter().filter_map(|r| r.d_eps).reduce(f64::max)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.energy.residual.abs()).fold(0.0, f64::max)
    }

    /// Curvature-law rows over the interval where the layer exists.
    pub fn curvature_rows(&self) -> Result<Vec<CurvatureRow>> {
        let series: Vec<(f64, f64)> = self
            .rows
            .iter()
            .map_while(|r| r.rho_pde.map(|rho| (r.t(), rho)))
            .collect();
        velocity_curvature_check(&series, self.g_bar, self.config.params.n)
    }

    /// Mean `g_bar |V| / K` over the middle fifth of the layer's lifetime.
    /// Undefined unless the run observed extinction.
    pub fn mid_curvature_ratio(&self) -> Result<f64> {
        if self.extinction_time().is_none() {
            return Err(invalid("layer lifetime not observed"));
        }
        let rows = self.curvature_rows()?;
        let (t0, t1) = (rows[0].t, rows[rows.len() - 1].t);
        let (lo, hi) = (t0 + 0.4 * (t1 - t0), t0 + 0.6 * (t1 - t0));
        let mid: Vec<f64> = rows.iter().filter(|r| r.t >= lo && r.t <= hi).map(|r| r.ratio).collect();
        if mid.is_empty() {
            return Err(invalid("no curvature samples mid-trajectory"));
        }
        Ok(mid.iter().sum::<f64>() / mid.len() as f64)
    }

    /// Every invariant this run exercises.
    pub fn checks(&self) -> Vec<Check> {
        let mut out = vec![Check::from_margin(
            "pde_completed",
            if self.failure.is_some() { -1.0 } else { 0.0 },
        )];
        let tol_rate = 10.0 * self.dt * self.e0;
        let mono = self
            .rows
            .windows(2)
            .map(|w| tol_rate * (w[1].t() - w[0].t()) - (w[1].energy.e_eps - w[0].energy.e_eps))
            .fold(f64::INFINITY, f64::min);
        if mono.is_finite() {
            out.push(Check::from_margin("energy_nonincreasing", mono));
        }
        out.push(Check::from_margin(
            "dissipation_identity",
            1e-2 * self.e0 - self.max_abs_residual(),
        ));
        // Holds exactly in exact arithmetic; allow roundoff once E is near zero.
        let slack = 1e-12 * self.e0;
        let bv = self
            .rows
            .iter()
            .map(|r| r.energy.e_eps - r.energy.psi_grad_bv + slack)
            .fold(f64::INFINITY, f64::min);
        out.push(Check::from_margin("psi_grad_bv_bound", bv));
        if let Some(h) = self.holder_max {
            out.push(Check::from_margin("psi_holder", 1.05 - h));
        }
        out.push(Check::from_margin(
            "preparedness_residual",
            1.0 - self.preparedness.residual_ratio,
        ));
        if self.ode.is_some() {
            let eps = self.eps();
            let hi = self.config.horizon.min(self.final_state.t);
            out.push(Check::from_margin(
                "pde_ode_interface_gap",
                5.0 * eps - self.sup_gap(self.config.t1, hi),
            ));
        }
        if self.frame.is_some() {
            let vals: Vec<f64> = self.rows.iter().filter_map(|r| r.e_phi).collect();
            if let Some(&first) = vals.first() {
                let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                out.push(Check::from_margin("frame_energy_control", first + 0.05 * self.c0 - max));
            }
            let alpha = self.rows.iter().filter_map(|r| r.alpha_margin).fold(f64::INFINITY, f64::min);
            if alpha.is_finite() {
                out.push(Check::from_margin("frame_alpha", alpha));
            }
        }
        if let Ok(r) = self.mid_curvature_ratio() {
            out.push(Check::from_margin("curvature_law", 0.2 - (r - 1.0).abs()));
        }
        out
    }

    /// Series as CSV cells; `scale` multiplies fast time into the `t` column.
    pub fn series_rows(&self, scale: f64) -> Vec<Vec<Option<f64>>> {
        let slow = 1.0 / (self.eps() * self.eps());
        self.rows
            .iter()
            .map(|r| {
                let e = &r.energy;
                vec![
                    Some(r.t() * scale),
                    Some(r.t()),
                    Some(r.t() * slow),
                    Some(e.e_eps),
                    Some(e.dissipation_lhs),
                    Some(e.dissipation_rhs),
                    Some(e.residual),
                    Some(e.kappa_lhs),
                    Some(e.psi_grad_bv),
                    Some(e.potential_mass),
                    r.rho_pde,
                    r.rho_ode,
                    r.nu_ode,
                    Some(r.rho_mcf),
                    r.l1_ode,
                    Some(r.l1_mcf),
                    r.e_phi,
                    r.p_phi,
                    r.d_eps,
                    r.alpha_margin,
                    r.rho_pde.zip(r.rho_ode).map(|(a, b)| (a - b).abs()),
                ]
            })
            .collect()
    }
}
