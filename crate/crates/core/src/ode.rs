//! Interface radius equation `eta rho'' + rho' + (n-1)/rho = 0`, written as
//! the first-order system `rho' = nu`, `eta nu' = -nu - (n-1)/rho`.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::output::Check;

/// Default event threshold and local error tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Steps below this size abort the integration with a truncation flag.
pub const MIN_STEP: f64 = 1e-14;
const MAX_STEPS: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeParams {
    pub n: u32,
    /// `eps^2 tau`.
    pub eta: f64,
    pub rho0: f64,
    pub nu0: f64,
    /// Permits initial velocities outside the invariant region.
    pub allow_outside_gamma: bool,
}

impl OdeParams {
    pub fn new(n: u32, eta: f64, rho0: f64, nu0: f64) -> Result<Self> {
        let p = Self {
            n,
            eta,
            rho0,
            nu0,
            allow_outside_gamma: false,
        };
        p.validate()?;
        Ok(p)
    }

    /// Same as [`OdeParams::new`] but accepts any finite `nu0`.
    pub fn outside_gamma(n: u32, eta: f64, rho0: f64, nu0: f64) -> Result<Self> {
        let p = Self {
            n,
            eta,
            rho0,
            nu0,
            allow_outside_gamma: true,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != 2 && self.n != 3 {
            return Err(invalid("dimension n must be 2 or 3"));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(invalid("eta must be finite and nonnegative"));
        }
        if !(self.rho0 > 0.0 && self.rho0 < 1.0) {
            return Err(invalid("rho0 must lie in (0, 1)"));
        }
        if !self.nu0.is_finite() {
            return Err(invalid("nu0 must be finite"));
        }
        if !self.allow_outside_gamma && !self.in_gamma() {
            return Err(invalid(format!(
                "nu0 = {} lies outside [-(n-1)/rho0, 0]; set the out-of-region flag to allow it",
                self.nu0
            )));
        }
        Ok(())
    }

    /// `-(n-1)/rho0 <= nu0 <= 0`.
    pub fn in_gamma(&self) -> bool {
        self.nu0 <= 0.0 && self.rho0 * self.nu0 + self.nm1() >= 0.0
    }

    fn nm1(&self) -> f64 {
        f64::from(self.n - 1)
    }
}

/// Classical extinction time `rho0^2 / (2(n-1))`. Requires `rho0 > 0`.
pub fn t_max(n: u32, rho0: f64) -> f64 {
    rho0 * rho0 / (2.0 * f64::from(n - 1))
}

/// Shrinking sphere `sqrt(rho0^2 - 2(n-1)t)`.
pub fn mcf_exact(n: u32, rho0: f64, t: f64) -> Result<f64> {
    let tm = t_max(n, rho0);
    if t > tm * (1.0 + 1e-14) {
        return Err(invalid(format!("t = {t} is beyond extinction at {tm}")));
    }
    Ok((rho0 * rho0 - 2.0 * f64::from(n - 1) * t).max(0.0).sqrt())
}

pub fn rhs(p: &OdeParams, state: (f64, f64)) -> Result<(f64, f64)> {
    let (rho, nu) = state;
    if !(p.eta > 0.0) {
        return Err(invalid("rhs needs eta > 0"));
    }
    if !(rho > 0.0) {
        return Err(invalid(format!("rho must be positive, got {rho}")));
    }
    Ok((nu, (-nu - p.nm1() / rho) / p.eta))
}

#[inline]
fn field(p: &OdeParams, y: [f64; 2]) -> Option<[f64; 2]> {
    (y[0] > 0.0).then(|| [y[1], (-y[1] - p.nm1() / y[0]) / p.eta])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    /// Event threshold for `rho` and local error tolerance.
    pub tol: f64,
    /// Keep every `stride`-th accepted step; the first and last are always kept.
    pub stride: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            stride: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeTrajectory {
    pub params: OdeParams,
    pub times: Vec<f64>,
    pub rho: Vec<f64>,
    pub nu: Vec<f64>,
    pub t_extinction: Option<f64>,
    /// Set when the step size underflowed before the event was located.
    pub truncated: bool,
    pub warnings: Vec<String>,
}

// Dormand-Prince 5(4) tableau; the system is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

struct Attempt {
    y: [f64; 2],
    dy: [f64; 2],
    err: [f64; 2],
}

fn dopri_step(p: &OdeParams, y: [f64; 2], k1: [f64; 2], h: f64) -> Option<Attempt> {
    let mut k = [[0.0; 2]; 7];
    k[0] = k1;
    for s in 1..7 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s] = field(p, ys)?;
        if s == 6 {
            let mut err = [0.0; 2];
            for (j, kj) in k.iter().enumerate() {
                err[0] += h * E[j] * kj[0];
                err[1] += h * E[j] * kj[1];
            }
            return Some(Attempt { y: ys, dy: k[6], err });
        }
    }
    None
}

fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

pub fn integrate_to_extinction(p: &OdeParams, tol: f64) -> Result<OdeTrajectory> {
    integrate_with(p, IntegrateOptions { tol, stride: 1 })
}

/// Adaptive Dormand-Prince integration until `rho` reaches `opts.tol`.
///
/// Steps are capped at `eta/2` while `t < 20 eta`. The event is located by
/// bisection on the cubic Hermite interpolant of the accepted step.
pub fn integrate_with(p: &OdeParams, opts: IntegrateOptions) -> Result<OdeTrajectory> {
    p.validate()?;
    let tol = opts.tol;
    if !(tol > 0.0) {
        return Err(invalid("tol must be positive"));
    }
    if !(p.eta > 0.0) {
        return Err(invalid("integration needs eta > 0; use mcf_exact for the classical limit"));
    }
    let stride = opts.stride.max(1);
    let mut traj = OdeTrajectory {
        params: *p,
        times: vec![0.0],
        rho: vec![p.rho0],
        nu: vec![p.nu0],
        t_extinction: None,
        truncated: false,
        warnings: Vec::new(),
    };
    if !p.in_gamma() {
        traj.warnings.push(format!(
            "initial velocity {} outside the invariant region; invariant checks are advisory",
            p.nu0
        ));
    }
    let t_limit = 100.0 * (t_max(p.n, p.rho0) + p.eta);
    let layer_end = 20.0 * p.eta;

    let mut t = 0.0;
    let mut y = [p.rho0, p.nu0];
    let mut k1 = field(p, y).expect("rho0 > 0");
    let mut h = (0.1 * p.eta).min(1e-3);
    let mut accepted = 0usize;

    for _ in 0..MAX_STEPS {
        if t >= t_limit {
            traj.warnings.push(format!("no extinction before t = {t_limit}"));
            break;
        }
        if t < layer_end {
            h = h.min(0.5 * p.eta);
        }
        if h < MIN_STEP {
            traj.truncated = true;
            traj.warnings.push(format!("step underflow at t = {t}, rho = {}", y[0]));
            break;
        }
        let Some(a) = dopri_step(p, y, k1, h) else {
            h *= 0.25;
            continue;
        };
        let err = (0..2)
            .map(|i| a.err[i].abs() / (tol + tol * y[i].abs().max(a.y[i].abs())))
            .fold(0.0, f64::max);
        if !(err <= 1.0) {
            h *= if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
            continue;
        }
        if a.y[0] <= tol {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if hermite(y[0], k1[0], a.y[0], a.dy[0], h, mid) > tol {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if (hi - lo) * h <= f64::EPSILON * t.max(h) {
                    break;
                }
            }
            let s = 0.5 * (lo + hi);
            let t_ext = t + s * h;
            traj.times.push(t_ext);
            traj.rho.push(hermite(y[0], k1[0], a.y[0], a.dy[0], h, s));
            traj.nu.push(hermite(y[1], k1[1], a.y[1], a.dy[1], h, s));
            traj.t_extinction = Some(t_ext);
            return Ok(traj);
        }
        t += h;
        y = a.y;
        k1 = a.dy;
        accepted += 1;
        if accepted.is_multiple_of(stride) {
            traj.times.push(t);
            traj.rho.push(y[0]);
            traj.nu.push(y[1]);
        }
        let grow = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= grow.clamp(0.2, 5.0);
    }
    if traj.times.last() != Some(&t) {
        traj.times.push(t);
        traj.rho.push(y[0]);
        traj.nu.push(y[1]);
    }
    Ok(traj)
}

impl OdeTrajectory {
    /// `(rho, nu)` at time `t` by cubic Hermite interpolation between stored
    /// samples; accurate to the integration tolerance when `stride == 1`.
    pub fn state_at(&self, t: f64) -> Option<(f64, f64)> {
        let last = *self.times.last()?;
        if !(t >= 0.0 && t <= last) {
            return None;
        }
        let i = self.times.partition_point(|&s| s <= t);
        if i == 0 {
            return Some((self.rho[0], self.nu[0]));
        }
        if i >= self.times.len() {
            let j = self.times.len() - 1;
            return Some((self.rho[j], self.nu[j]));
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let y0 = [self.rho[i - 1], self.nu[i - 1]];
        let y1 = [self.rho[i], self.nu[i]];
        let d0 = field(&self.params, y0)?;
        let d1 = field(&self.params, y1)?;
        Some((
            hermite(y0[0], d0[0], y1[0], d1[0], h, s),
            hermite(y0[1], d0[1], y1[1], d1[1], h, s),
        ))
    }

    /// Invariant-region, sandwich, extinction-bracket, and velocity-bound
    /// checks. `horizon` must be below `T_max`; pass `None` to use 0.9 `T_max`.
    pub fn invariant_checks(&self, horizon: Option<f64>) -> Vec<Check> {
        let p = &self.params;
        let tol = 10.0 * DEFAULT_TOL;
        let nm1 = f64::from(p.n - 1);
        let tm = t_max(p.n, p.rho0);
        let horizon = horizon.unwrap_or(0.9 * tm).min(tm);
        let end = self.t_extinction.unwrap_or(f64::INFINITY);
        let mut out = Vec::new();

        let nu_max = self.nu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out.push(Check::from_margin("ode_gamma_nu_nonpositive", tol - nu_max));
        let rn = self
            .rho
            .iter()
            .zip(&self.nu)
            .zip(&self.times)
            .filter(|(_, &t)| t < end)
            .map(|((r, v), _)| r * v + nm1)
            .fold(f64::INFINITY, f64::min);
        out.push(Check::from_margin("ode_gamma_rho_nu", rn + tol));

        let lower = self
            .times
            .iter()
            .zip(&self.rho)
            .filter(|(&t, _)| t <= tm)
            .map(|(&t, &r)| r - mcf_exact(p.n, p.rho0, t).unwrap_or(0.0))
            .fold(f64::INFINITY, f64::min);
        out.push(Check::from_margin("ode_sandwich_lower", lower + tol));
        if p.nu0 < 0.0 {
            let upper = self
                .times
                .iter()
                .zip(&self.rho)
                .map(|(&t, &r)| p.rho0 + p.nu0 * t - r)
                .fold(f64::INFINITY, f64::min);
            out.push(Check::from_margin("ode_sandwich_upper", upper + tol));
        }

        let vb = nm1 * nm1 / (p.rho0 * p.rho0 - 2.0 * nm1 * horizon);
        let vmax = self
            .times
            .iter()
            .zip(&self.nu)
            .filter(|(&t, _)| t <= horizon)
            .map(|(_, v)| v * v)
            .fold(0.0, f64::max);
        out.push(Check::from_margin("ode_velocity_bound", vb - vmax));

        match self.t_extinction {
            Some(te) => {
                out.push(Check::from_margin("ode_extinction_after_tmax", te - tm + tol));
                if p.nu0 < 0.0 {
                    out.push(Check::from_margin(
                        "ode_extinction_before_linear",
                        p.rho0 / p.nu0.abs() - te + tol,
                    ));
                }
            }
            None => out.push(Check::from_margin("ode_extinction_found", -1.0)),
        }
        // The layer estimate only applies once t* falls inside the trajectory.
        let ts = 10.0 * p.eta * (1.0 / p.eta).ln();
        if p.nu0 == 0.0 && p.eta < 1.0 && self.state_at(ts).is_some() {
            out.push(self.initial_layer_check());
        }
        out
    }

    /// Compares `|nu + (n-1)/rho_o|` at `t* = 10 eta ln(1/eta)` with five
    /// times the envelope `chi0 e^{-t/eta}/eta + eta (n-1)^2 / rho_o^3`.
    pub fn initial_layer_check(&self) -> Check {
        let p = &self.params;
        let nm1 = f64::from(p.n - 1);
        let ts = 10.0 * p.eta * (1.0 / p.eta).ln();
        let measured_env = self.state_at(ts).and_then(|(_, nu)| {
            let ro = mcf_exact(p.n, p.rho0, ts).ok()?;
            let chi0 = p.eta * (p.nu0 + nm1 / p.rho0).abs();
            let env = chi0 * (-ts / p.eta).exp() / p.eta + p.eta * nm1 * nm1 / ro.powi(3);
            Some(((nu + nm1 / ro).abs(), env))
        });
        match measured_env {
            Some((m, env)) => Check::from_margin("ode_initial_layer", 5.0 * env - m),
            None => Check::from_margin("ode_initial_layer", -1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub sup_error_rho: f64,
    pub sup_error_nu: f64,
}

/// Distance to the classical flow as `eta -> 0`, sorted by `eta` descending.
///
/// Suprema are taken over the stored samples together with a uniform grid
/// of 2001 interpolated times.
pub fn convergence_sweep(
    n: u32,
    rho0: f64,
    nu0: f64,
    etas: &[f64],
    horizon: f64,
    t1: f64,
    tol: f64,
) -> Result<Vec<SweepRow>> {
    if !(horizon < t_max(n, rho0)) || !(t1 > 0.0 && t1 < horizon) {
        return Err(invalid("convergence sweep needs 0 < t1 < T < T_max"));
    }
    if etas.is_empty() || etas.iter().any(|&e| !(e > 0.0)) {
        return Err(invalid("every eta in a sweep must be positive"));
    }
    let nm1 = f64::from(n - 1);
    let mut rows = etas
        .par_iter()
        .map(|&eta| {
            let p = OdeParams::new(n, eta, rho0, nu0)?;
            let traj = integrate_to_extinction(&p, tol)?;
            let grid = (0..=2000).map(|k| horizon * k as f64 / 2000.0);
            let mut samples: Vec<(f64, f64, f64)> = traj
                .times
                .iter()
                .zip(traj.rho.iter().zip(&traj.nu))
                .filter(|(&t, _)| t <= horizon)
                .map(|(&t, (&r, &v))| (t, r, v))
                .collect();
            for t in grid {
                let (r, v) = traj
                    .state_at(t)
                    .ok_or_else(|| invalid("trajectory ended before the horizon"))?;
                samples.push((t, r, v));
            }
            let mut sup_rho: f64 = 0.0;
            let mut sup_nu: f64 = 0.0;
            for (t, r, v) in samples {
                let ro = mcf_exact(n, rho0, t)?;
                sup_rho = sup_rho.max((r - ro).abs());
                if t >= t1 {
                    sup_nu = sup_nu.max((v + nm1 / ro).abs());
                }
            }
            Ok(SweepRow {
                eta,
                sup_error_rho: sup_rho,
                sup_error_nu: sup_nu,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.eta.total_cmp(&a.eta));
    Ok(rows)
}
