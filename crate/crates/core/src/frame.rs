//! Moving-frame coordinates `R = r - rho(t)` attached to the interface, the
//! integrating factor `phi`, the weighted energies `E_phi`, `P_phi`, and the
//! layer distance `d^eps`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::interp::Hermite;
use crate::ode::{mcf_exact, OdeTrajectory};
use crate::output::Check;
use crate::pde::{radial_gradient, FieldState, RadialGrid};
use crate::potential::{psi, Potential, PsiTable};

pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameParams {
    /// Required lower bound on `1 - eps^2 tau nu^2`.
    pub alpha: f64,
    /// Half-width of the analysis window `[-a, a]`.
    pub a: f64,
    /// Analysis horizon `T`.
    pub horizon: f64,
}

impl FrameParams {
    /// `alpha = 0.5` and `a = 0.9 min(rho_mcf(T), 1 - rho0)`.
    pub fn with_defaults(n: u32, rho0: f64, horizon: f64) -> Result<Self> {
        let rho_t = mcf_exact(n, rho0, horizon)?;
        if rho_t <= 0.0 {
            return Err(invalid(format!("horizon {horizon} reaches extinction")));
        }
        Ok(Self {
            alpha: DEFAULT_ALPHA,
            a: 0.9 * rho_t.min(1.0 - rho0),
            horizon,
        })
    }

    /// Smallest slack over the trajectory samples in `[0, T]` of the alpha
    /// condition and of the window containment. Errors if either is negative.
    pub fn validate_against(&self, traj: &OdeTrajectory, eps: f64, tau: f64) -> Result<f64> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha = {} must lie in (0, 1)", self.alpha)));
        }
        if !(self.a > 0.0) {
            return Err(invalid(format!("window half-width a = {} must be positive", self.a)));
        }
        let end = *traj.times.last().unwrap_or(&0.0);
        if self.horizon > end {
            return Err(invalid(format!(
                "horizon {} beyond trajectory end {end}",
                self.horizon
            )));
        }
        let e2t = eps * eps * tau;
        let mut alpha_slack = f64::INFINITY;
        let mut window_slack = f64::INFINITY;
        for ((&t, &rho), &nu) in traj.times.iter().zip(&traj.rho).zip(&traj.nu) {
            if t > self.horizon {
                break;
            }
            alpha_slack = alpha_slack.min(1.0 - e2t * nu * nu - self.alpha);
            window_slack = window_slack.min((rho - self.a).min(1.0 - rho - self.a));
        }
        if alpha_slack < 0.0 {
            return Err(Error::AlphaViolated {
                margin: alpha_slack + self.alpha,
            });
        }
        if window_slack <= 0.0 {
            return Err(invalid(format!(
                "window [-{a}, {a}] leaves the domain (slack {window_slack})",
                a = self.a
            )));
        }
        Ok(alpha_slack.min(window_slack))
    }
}

fn denominator(eps: f64, tau: f64, nu: f64) -> Result<f64> {
    let d = 1.0 - eps * eps * tau * nu * nu;
    if d <= 0.0 {
        return Err(Error::AlphaViolated { margin: d });
    }
    Ok(d)
}

/// `phi = exp(-(n-1) R / (rho D)) (1 + R/rho)^{(n-1)/D}` with `D = 1 - eps^2 tau nu^2`.
pub fn phi_eval(n: u32, eps: f64, tau: f64, rho: f64, nu: f64, r_off: f64) -> Result<f64> {
    let d = denominator(eps, tau, nu)?;
    if !(rho > 0.0) || r_off < -rho {
        return Err(invalid(format!("need rho > 0 and R >= -rho; got rho = {rho}, R = {r_off}")));
    }
    if r_off == 0.0 {
        return Ok(1.0);
    }
    if r_off == -rho {
        return Ok(if n == 1 { (1.0 / d).exp() } else { 0.0 });
    }
    let k = f64::from(n - 1) / d;
    let x = r_off / rho;
    Ok((-k * x).exp() * (1.0 + x).powf(k))
}

/// `phi_R = -(n-1) R / (rho (R + rho) D) phi`.
pub fn phi_r_eval(n: u32, eps: f64, tau: f64, rho: f64, nu: f64, r_off: f64) -> Result<f64> {
    let d = denominator(eps, tau, nu)?;
    if !(rho > 0.0) || r_off <= -rho {
        return Err(invalid(format!("need rho > 0 and R > -rho; got rho = {rho}, R = {r_off}")));
    }
    let phi = phi_eval(n, eps, tau, rho, nu, r_off)?;
    Ok(-f64::from(n - 1) * r_off / (rho * (r_off + rho) * d) * phi)
}

/// `K_T = (n-1)^2 / (alpha^2 (rho0^2 - 2(n-1)T))`.
pub fn quadratic_constant(n: u32, alpha: f64, rho0: f64, horizon: f64) -> Result<f64> {
    let nm1 = f64::from(n - 1);
    let den = alpha * alpha * (rho0 * rho0 - 2.0 * nm1 * horizon);
    if !(den > 0.0) {
        return Err(invalid(format!("horizon {horizon} not below extinction for rho0 = {rho0}")));
    }
    Ok(nm1 * nm1 / den)
}

/// `C1 = 1 / (Psi(1/4) - Psi(0))`.
pub fn c1_constant(p: &Potential) -> Result<f64> {
    Ok(1.0 / (psi(p, 0.25)? - psi(p, 0.0)?))
}

#[derive(Debug, Clone, Copy)]
pub struct FrameContext {
    pub n: u32,
    pub eps: f64,
    pub tau: f64,
}

/// Snapshot in the moving frame, sampled at the node offsets `R_i = r_i - rho`.
#[derive(Debug, Clone)]
pub struct MovingFrameView {
    pub t: f64,
    pub rho: f64,
    pub nu: f64,
    pub r_off: Vec<f64>,
    pub v: Vec<f64>,
    pub v_r: Vec<f64>,
    pub v_t: Vec<f64>,
    pub phi: Vec<f64>,
    ctx: FrameContext,
    v_interp: Hermite,
}

impl MovingFrameView {
    pub fn context(&self) -> FrameContext {
        self.ctx
    }

    /// Shape-preserving interpolant of `v` at an arbitrary offset.
    pub fn v_at(&self, r_off: f64) -> f64 {
        self.v_interp.eval(r_off)
    }

    /// Offsets covered by the view.
    pub fn span(&self) -> (f64, f64) {
        self.v_interp.domain()
    }
}

/// Moving-frame view of `state` about `(rho, nu)`; `v_t = u_t + nu u_r`.
pub fn to_moving_frame(
    state: &FieldState,
    grid: &RadialGrid,
    ctx: FrameContext,
    rho: f64,
    nu: f64,
) -> Result<MovingFrameView> {
    if !(rho > grid.dr && rho < 1.0 - grid.dr) {
        return Err(invalid(format!("rho = {rho} outside grid interior")));
    }
    let u_r = radial_gradient(&state.u, grid.dr);
    let r_off: Vec<f64> = grid.r.iter().map(|&r| r - rho).collect();
    let v_t: Vec<f64> = state.w.iter().zip(&u_r).map(|(w, ur)| w + nu * ur).collect();
    let phi = r_off
        .iter()
        .map(|&x| phi_eval(ctx.n, ctx.eps, ctx.tau, rho, nu, x.max(-rho)))
        .collect::<Result<Vec<_>>>()?;
    let v_interp = Hermite::monotone(r_off.clone(), state.u.clone())?;
    Ok(MovingFrameView {
        t: state.t,
        rho,
        nu,
        r_off,
        v: state.u.clone(),
        v_r: u_r,
        v_t,
        phi,
        ctx,
        v_interp,
    })
}

fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
        .sum()
}

/// `(E_phi, P_phi)` over `[-rho, 1 - rho]`.
pub fn e_phi(view: &MovingFrameView, potential: &Potential) -> (f64, f64) {
    let FrameContext { eps, tau, .. } = view.ctx;
    let d = 1.0 - eps * eps * tau * view.nu * view.nu;
    let m = view.v.len();
    let mut e = Vec::with_capacity(m);
    let mut p = Vec::with_capacity(m);
    for i in 0..m {
        let grad = 0.5 * eps * view.v_r[i] * view.v_r[i];
        let pot = potential.f(view.v[i]) / eps;
        let kin = 0.5 * eps.powi(3) * tau * view.v_t[i] * view.v_t[i];
        e.push((kin + d * grad + pot) * view.phi[i]);
        p.push((grad + pot) * view.phi[i]);
    }
    (trapezoid(&view.r_off, &e), trapezoid(&view.r_off, &p))
}

/// `int_{-a}^{a} |Psi(v1) - Psi(v2)| dR` on a uniform grid no coarser than
/// either view.
pub fn d_eps(v1: &MovingFrameView, v2: &MovingFrameView, a: f64, table: &PsiTable) -> Result<f64> {
    if !(a > 0.0) {
        return Err(invalid(format!("window half-width a = {a} must be positive")));
    }
    for v in [v1, v2] {
        let (lo, hi) = v.span();
        if lo > -a || hi < a {
            return Err(invalid(format!(
                "view at t = {} covers [{lo}, {hi}], not [-{a}, {a}]",
                v.t
            )));
        }
    }
    let h = spacing(v1).min(spacing(v2));
    let m = ((2.0 * a / h).ceil() as usize).max(2);
    let x: Vec<f64> = (0..=m).map(|k| -a + 2.0 * a * k as f64 / m as f64).collect();
    let f = x
        .iter()
        .map(|&r| Ok((table.eval(v1.v_at(r))? - table.eval(v2.v_at(r))?).abs()))
        .collect::<Result<Vec<_>>>()?;
    Ok(trapezoid(&x, &f))
}

fn spacing(v: &MovingFrameView) -> f64 {
    v.r_off.get(1).map_or(f64::INFINITY, |x| x - v.r_off[0])
}

/// `phi(-C1 d - eps^{1/2}) (c0 - C2 eps^{1/2})`; `None` when the argument
/// falls outside `[-rho, 0]`.
#[allow(clippy::too_many_arguments)]
pub fn lower_bound(
    ctx: FrameContext,
    rho: f64,
    nu: f64,
    d: f64,
    c0: f64,
    c1: f64,
    c2: f64,
) -> Result<Option<f64>> {
    let arg = -c1 * d - ctx.eps.sqrt();
    if arg < -rho {
        return Ok(None);
    }
    let phi = phi_eval(ctx.n, ctx.eps, ctx.tau, rho, nu, arg)?;
    Ok(Some(phi * (c0 - c2 * ctx.eps.sqrt())))
}

/// Smallest `C2 >= 0` with `P >= phi_k (c0 - C2 eps^{1/2})` for every
/// `(P, phi_k)` sample.
pub fn calibrate_c2(samples: &[(f64, f64)], c0: f64, eps: f64) -> f64 {
    samples
        .iter()
        .filter(|(_, phi)| *phi > 0.0)
        .map(|&(p, phi)| (c0 - p / phi) / eps.sqrt())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameRow {
    pub t: f64,
    pub e_phi: f64,
    pub p_phi: f64,
    pub d_eps_from_0: f64,
    pub alpha_margin: f64,
}

impl FrameRow {
    pub const HEADER: [&'static str; 5] = ["t", "E_phi", "P_phi", "d_eps_from_0", "alpha_margin"];

    pub fn row(&self, time_scale: f64) -> Vec<Option<f64>> {
        vec![
            Some(self.t * time_scale),
            Some(self.e_phi),
            Some(self.p_phi),
            Some(self.d_eps_from_0),
            Some(self.alpha_margin),
        ]
    }
}

/// Frame report for snapshots taken at or before the horizon, using the
/// interface ODE trajectory for `(rho, nu)`.
pub fn frame_report(
    snapshots: &[FieldState],
    grid: &RadialGrid,
    traj: &OdeTrajectory,
    ctx: FrameContext,
    frame: &FrameParams,
    potential: &Potential,
) -> Result<Vec<FrameRow>> {
    frame.validate_against(traj, ctx.eps, ctx.tau)?;
    let table = PsiTable::new(potential)?;
    let views = snapshots
        .iter()
        .filter(|s| s.t <= frame.horizon)
        .map(|s| {
            let (rho, nu) = traj
                .state_at(s.t)
                .ok_or_else(|| invalid(format!("trajectory does not reach t = {}", s.t)))?;
            to_moving_frame(s, grid, ctx, rho, nu)
        })
        .collect::<Result<Vec<_>>>()?;
    let Some(first) = views.first() else {
        return Ok(Vec::new());
    };
    views
        .iter()
        .map(|v| {
            let (e, p) = e_phi(v, potential);
            Ok(FrameRow {
                t: v.t,
                e_phi: e,
                p_phi: p,
                d_eps_from_0: d_eps(first, v, frame.a, &table)?,
                alpha_margin: 1.0 - ctx.eps * ctx.eps * ctx.tau * v.nu * v.nu - frame.alpha,
            })
        })
        .collect()
}

/// Pointwise properties of `phi` along a trajectory at the given times:
/// range and endpoint values, `phi(-R) <= phi(R)`, the quadratic lower bound
/// on `|R| <= r_quad`, and `phi_t <= -(rho'/rho) R phi_R` via centered
/// differences of step `h` in time.
pub fn phi_property_checks(
    traj: &OdeTrajectory,
    ctx: FrameContext,
    frame: &FrameParams,
    times: &[f64],
    r_quad: f64,
    h: f64,
) -> Result<Vec<Check>> {
    let FrameContext { n, eps, tau } = ctx;
    let p = traj.params;
    let k_t = quadratic_constant(n, frame.alpha, p.rho0, frame.horizon)?;
    let mut range = f64::INFINITY;
    let mut endpoints: f64 = 0.0;
    let mut symmetry = f64::INFINITY;
    let mut quad = f64::INFINITY;
    let mut time_deriv = f64::INFINITY;
    let at = |t: f64| {
        traj.state_at(t)
            .ok_or_else(|| invalid(format!("trajectory does not reach t = {t}")))
    };
    for &t in times {
        let (rho, nu) = at(t)?;
        let phi = |x: f64| phi_eval(n, eps, tau, rho, nu, x);
        endpoints = endpoints.max(phi(-rho)?.abs()).max((phi(0.0)? - 1.0).abs());
        let hi = 1.0 - rho;
        for k in 0..=SAMPLES {
            let x = -rho + (hi + rho) * k as f64 / SAMPLES as f64;
            let v = phi(x)?;
            range = range.min(v).min(1.0 - v);
        }
        for k in 1..=SAMPLES {
            let x = rho.min(hi) * k as f64 / (SAMPLES + 1) as f64;
            symmetry = symmetry.min(phi(x)? - phi(-x)?);
        }
        for k in 0..=SAMPLES {
            let x = -r_quad + 2.0 * r_quad * k as f64 / SAMPLES as f64;
            if x > -rho && x < hi {
                quad = quad.min(phi(x)? - (1.0 - k_t * x * x));
            }
        }
        if t - h >= 0.0 {
            let (rm, nm) = at(t - h)?;
            let (rp, np) = at(t + h)?;
            for k in 1..SAMPLES {
                let x = -0.9 * rho + 1.8 * rho.min(hi) * k as f64 / SAMPLES as f64;
                let phi_t = (phi_eval(n, eps, tau, rp, np, x)? - phi_eval(n, eps, tau, rm, nm, x)?)
                    / (2.0 * h);
                let bound = -(nu / rho) * x * phi_r_eval(n, eps, tau, rho, nu, x)?;
                time_deriv = time_deriv.min(bound + PHI_T_TOL - phi_t);
            }
        }
    }
    Ok(vec![
        Check::from_margin("phi_range", range),
        Check::from_margin("phi_endpoints", 1e-15 - endpoints),
        Check::from_margin("phi_symmetry", symmetry),
        Check::from_margin("phi_quadratic_bound", quad),
        Check::from_margin("phi_time_derivative", time_deriv),
    ])
}

const SAMPLES: usize = 200;
/// Slack allowed on the finite-difference time derivative of `phi`.
pub const PHI_T_TOL: f64 = 1e-6;
