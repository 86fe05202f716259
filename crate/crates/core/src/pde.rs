//! Method-of-lines solver for the radial damped hyperbolic Allen-Cahn
//! equation on `[0, 1]`.
//!
//! The radial Laplacian is written in flux form on cells
//! `[r_{i-1/2}, r_{i+1/2}]` with exact radial volumes. For `n = 2` this is the
//! standard centered stencil, at the origin it reduces to the ghost-node
//! operator `2n (u_1 - u_0)/dr^2`, and in every dimension it satisfies the
//! summation-by-parts identity behind the discrete energy in
//! [`crate::diagnostics`].

use crate::error::{invalid, Error, Result};
use crate::potential::{quartic_potential, Damping, Potential};

/// Largest admissible number of cells.
pub const MAX_CELLS: usize = 10_000_000;
/// Blow-up guard on `|u|`.
pub const BLOWUP_BOUND: f64 = 10.0;
/// Safety factor used by [`run`] unless overridden.
pub const RUN_SAFETY: f64 = 0.5;

/// Value imposed at `r = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Plus,
    Minus,
}

impl Boundary {
    pub fn value(self) -> f64 {
        match self {
            Boundary::Plus => 1.0,
            Boundary::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdeParams {
    pub n: u32,
    pub eps: f64,
    pub tau: f64,
    pub potential: Potential,
    pub damping: Damping,
    /// Horizon on the fast time scale.
    pub t_end: f64,
    pub boundary: Boundary,
}

impl PdeParams {
    /// Quartic potential, `g = 1`, Dirichlet `+1`.
    pub fn new(n: u32, eps: f64, tau: f64, t_end: f64) -> Result<Self> {
        let p = Self {
            n,
            eps,
            tau,
            potential: quartic_potential(),
            damping: Damping::Constant(1.0),
            t_end,
            boundary: Boundary::Plus,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_damping(mut self, damping: Damping) -> Result<Self> {
        self.damping = damping;
        self.validate()?;
        Ok(self)
    }

    pub fn with_potential(mut self, potential: Potential) -> Result<Self> {
        self.potential = potential;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != 2 && self.n != 3 {
            return Err(invalid("dimension n must be 2 or 3"));
        }
        if !(self.eps > 0.0 && self.eps <= 0.2) {
            return Err(invalid("eps must lie in (0, 0.2]"));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(invalid("tau must be positive"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end must be finite and nonnegative"));
        }
        self.damping.validate()?;
        self.potential.validate()
    }

    /// `eps^2 tau`, the inertia coefficient.
    pub fn eta(&self) -> f64 {
        self.eps * self.eps * self.tau
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub n_cells: usize,
    pub dr: f64,
    pub r: Vec<f64>,
}

impl RadialGrid {
    pub fn uniform(n_cells: usize) -> Result<Self> {
        if !(2..=MAX_CELLS).contains(&n_cells) {
            return Err(invalid(format!("cell count {n_cells} outside [2, {MAX_CELLS}]")));
        }
        let dr = 1.0 / n_cells as f64;
        let r = (0..=n_cells).map(|i| i as f64 / n_cells as f64).collect();
        Ok(Self { n_cells, dr, r })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Rejects grids coarser than `eps/8`.
    pub fn check_resolution(&self, eps: f64) -> Result<()> {
        if self.dr > eps / 8.0 * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "grid spacing {} exceeds eps/8 = {}",
                self.dr,
                eps / 8.0
            )));
        }
        Ok(())
    }
}

/// `ceil(points_per_eps / eps)` cells.
pub fn build_grid(eps: f64, points_per_eps: usize) -> Result<RadialGrid> {
    if points_per_eps < 8 {
        return Err(invalid("points_per_eps must be at least 8"));
    }
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    let cells = (points_per_eps as f64 / eps * (1.0 - 1e-12)).ceil();
    if cells > MAX_CELLS as f64 {
        return Err(invalid(format!("{cells} cells exceeds the resource guard")));
    }
    RadialGrid::uniform(cells as usize)
}

/// `(u, u_t)` at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

impl FieldState {
    pub fn constant(grid: &RadialGrid, u: f64, w: f64) -> Self {
        Self {
            t: 0.0,
            u: vec![u; grid.len()],
            w: vec![w; grid.len()],
        }
    }

    /// Samples `u = f(r)`, `w = 0` and imposes the boundary value.
    pub fn from_fn(grid: &RadialGrid, boundary: Boundary, f: impl Fn(f64) -> f64) -> Self {
        let mut u: Vec<f64> = grid.r.iter().map(|&r| f(r)).collect();
        let last = u.len() - 1;
        u[last] = boundary.value();
        Self {
            t: 0.0,
            u,
            w: vec![0.0; grid.len()],
        }
    }

    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Cell volumes and face weights of the flux-form radial Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialStencil {
    pub n: u32,
    pub dr: f64,
    /// `(r_{i+1/2}^n - r_{i-1/2}^n)/n`, clipped to `[0, 1]`; sums to `1/n`.
    pub vol: Vec<f64>,
    /// `r_{i+1/2}^{n-1}` for `i = 0..n_cells`.
    pub face: Vec<f64>,
    inv_vol_dr: Vec<f64>,
}

impl RadialStencil {
    pub fn new(grid: &RadialGrid, n: u32) -> Self {
        let m = grid.n_cells;
        let dr = grid.dr;
        let nf = f64::from(n);
        let edge = |k: f64| (k * dr).clamp(0.0, 1.0);
        let vol: Vec<f64> = (0..=m)
            .map(|i| {
                let lo = edge(i as f64 - 0.5);
                let hi = if i == m { 1.0 } else { edge(i as f64 + 0.5) };
                (hi.powi(n as i32) - lo.powi(n as i32)) / nf
            })
            .collect();
        let face = (0..m).map(|i| edge(i as f64 + 0.5).powi(n as i32 - 1)).collect();
        let inv_vol_dr = vol.iter().map(|v| 1.0 / (v * dr)).collect();
        Self {
            n,
            dr,
            vol,
            face,
            inv_vol_dr,
        }
    }

    /// Discrete `u_rr + (n-1)/r u_r` at node `i < n_cells`.
    #[inline]
    pub fn laplacian_at(&self, u: &[f64], i: usize) -> f64 {
        let right = self.face[i] * (u[i + 1] - u[i]);
        let left = if i == 0 {
            0.0
        } else {
            self.face[i - 1] * (u[i] - u[i - 1])
        };
        (right - left) * self.inv_vol_dr[i]
    }
}

/// Centered differences in the interior, second-order one-sided at both ends.
pub fn radial_gradient(u: &[f64], dr: f64) -> Vec<f64> {
    let m = u.len();
    let mut g = vec![0.0; m];
    if m < 3 {
        return g;
    }
    g[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dr);
    for i in 1..m - 1 {
        g[i] = (u[i + 1] - u[i - 1]) / (2.0 * dr);
    }
    g[m - 1] = (3.0 * u[m - 1] - 4.0 * u[m - 2] + u[m - 3]) / (2.0 * dr);
    g
}

/// Composite trapezoid of nodal values `f` against `r^{n-1}`.
pub fn trapezoid_radial(f: &[f64], grid: &RadialGrid, n: u32) -> f64 {
    let m = f.len() - 1;
    let w = |i: usize| grid.r[i].powi(n as i32 - 1) * f[i];
    let inner: f64 = (1..m).map(w).sum();
    grid.dr * (inner + 0.5 * (w(0) + w(m)))
}

/// `safety * min(eps sqrt(tau) dr, eps^2 tau / max g, eps^2 / sqrt(max |F''|))`.
pub fn stable_dt(params: &PdeParams, grid: &RadialGrid, safety: f64) -> Result<f64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(invalid("safety must lie in (0, 1]"));
    }
    let eps = params.eps;
    let wave = eps * params.tau.sqrt() * grid.dr;
    let relax = eps * eps * params.tau / params.damping.max_g();
    let reaction = eps * eps / params.potential.max_abs_fpp().sqrt();
    Ok(safety * wave.min(relax).min(reaction))
}

pub fn to_slow_time(t_fast: f64, eps: f64) -> f64 {
    t_fast / (eps * eps)
}

/// Reusable classical RK4 integrator with preallocated stage buffers.
#[derive(Debug, Clone)]
pub struct Solver {
    params: PdeParams,
    grid: RadialGrid,
    stencil: RadialStencil,
    dt_limit: f64,
    ku: Vec<f64>,
    kw: Vec<f64>,
    au: Vec<f64>,
    aw: Vec<f64>,
    tu: Vec<f64>,
    tw: Vec<f64>,
}

impl Solver {
    pub fn new(params: &PdeParams, grid: &RadialGrid) -> Result<Self> {
        params.validate()?;
        grid.check_resolution(params.eps)?;
        let m = grid.len();
        Ok(Self {
            params: params.clone(),
            grid: grid.clone(),
            stencil: RadialStencil::new(grid, params.n),
            dt_limit: stable_dt(params, grid, 1.0)?,
            ku: vec![0.0; m],
            kw: vec![0.0; m],
            au: vec![0.0; m],
            aw: vec![0.0; m],
            tu: vec![0.0; m],
            tw: vec![0.0; m],
        })
    }

    pub fn params(&self) -> &PdeParams {
        &self.params
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn stencil(&self) -> &RadialStencil {
        &self.stencil
    }

    fn check_state(&self, s: &FieldState) -> Result<()> {
        let m = self.grid.len();
        if s.u.len() != m || s.w.len() != m {
            return Err(invalid("state does not match the grid"));
        }
        Ok(())
    }

    // (ku, kw) = (w, (L u - eps^-2 F'(u) - g(u) w) / (eps^2 tau)); zero at r = 1.
    fn eval(&mut self, from_tmp: bool, u0: &[f64], w0: &[f64]) {
        let (u, w) = if from_tmp {
            (&self.tu[..], &self.tw[..])
        } else {
            (u0, w0)
        };
        let p = &self.params;
        let inv_eps2 = 1.0 / (p.eps * p.eps);
        let inv_eta = 1.0 / p.eta();
        let last = u.len() - 1;
        for i in 0..last {
            let lap = self.stencil.laplacian_at(u, i);
            let force = lap - inv_eps2 * p.potential.fp(u[i]) - p.damping.g(u[i]) * w[i];
            self.ku[i] = w[i];
            self.kw[i] = force * inv_eta;
        }
        self.ku[last] = 0.0;
        self.kw[last] = 0.0;
    }

    /// Advances `state` by `dt` in place.
    pub fn advance(&mut self, state: &mut FieldState, dt: f64) -> Result<()> {
        self.check_state(state)?;
        if !(dt > 0.0 && dt <= self.dt_limit * (1.0 + 1e-9)) {
            return Err(invalid(format!(
                "dt = {dt} outside (0, {}] (stable_dt at safety 1)",
                self.dt_limit
            )));
        }
        let m = state.u.len();
        let half = 0.5 * dt;

        self.eval(false, &state.u, &state.w);
        for i in 0..m {
            self.au[i] = self.ku[i];
            self.aw[i] = self.kw[i];
            self.tu[i] = state.u[i] + half * self.ku[i];
            self.tw[i] = state.w[i] + half * self.kw[i];
        }
        self.eval(true, &[], &[]);
        for i in 0..m {
            self.au[i] += 2.0 * self.ku[i];
            self.aw[i] += 2.0 * self.kw[i];
            self.tu[i] = state.u[i] + half * self.ku[i];
            self.tw[i] = state.w[i] + half * self.kw[i];
        }
        self.eval(true, &[], &[]);
        for i in 0..m {
            self.au[i] += 2.0 * self.ku[i];
            self.aw[i] += 2.0 * self.kw[i];
            self.tu[i] = state.u[i] + dt * self.ku[i];
            self.tw[i] = state.w[i] + dt * self.kw[i];
        }
        self.eval(true, &[], &[]);
        let sixth = dt / 6.0;
        for i in 0..m {
            state.u[i] += sixth * (self.au[i] + self.ku[i]);
            state.w[i] += sixth * (self.aw[i] + self.kw[i]);
        }
        state.u[m - 1] = self.params.boundary.value();
        state.w[m - 1] = 0.0;
        state.t += dt;
        if state
            .u
            .iter()
            .chain(&state.w)
            .any(|v| !v.is_finite())
            || state.max_abs_u() > BLOWUP_BOUND
        {
            return Err(Error::BlowUp { t: state.t });
        }
        Ok(())
    }
}

/// One RK4 step; `dt` must not exceed `stable_dt(params, grid, 1)`.
pub fn step(params: &PdeParams, grid: &RadialGrid, state: &FieldState, dt: f64) -> Result<FieldState> {
    let mut solver = Solver::new(params, grid)?;
    let mut next = state.clone();
    solver.advance(&mut next, dt)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Increasing fast times in `[init.t, t_end]` at which states are kept.
    pub snapshot_times: Vec<f64>,
    /// The hook sees the initial state, every `stride`-th step, and the final state.
    pub stride: usize,
    /// Fixed step; defaults to `stable_dt` at safety [`RUN_SAFETY`].
    pub dt: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            snapshot_times: Vec::new(),
            stride: 1,
            dt: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub final_state: FieldState,
    pub snapshots: Vec<FieldState>,
    pub dt: f64,
    pub steps: usize,
}

/// Fixed-step integration to `params.t_end`; the step before each snapshot
/// or the end time is shortened to land on it exactly.
pub fn run<H>(
    params: &PdeParams,
    grid: &RadialGrid,
    init: &FieldState,
    opts: &RunOptions,
    hook: H,
) -> Result<RunOutput>
where
    H: FnMut(&FieldState) -> Result<()>,
{
    let (out, failure) = run_partial(params, grid, init, opts, hook)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Like [`run`] but returns the progress made before a step failure.
///
/// The outer error covers invalid inputs; the inner one a failure mid-run.
pub fn run_partial<H>(
    params: &PdeParams,
    grid: &RadialGrid,
    init: &FieldState,
    opts: &RunOptions,
    mut hook: H,
) -> Result<(RunOutput, Option<Error>)>
where
    H: FnMut(&FieldState) -> Result<()>,
{
    let mut solver = Solver::new(params, grid)?;
    solver.check_state(init)?;
    let dt = match opts.dt {
        Some(dt) => dt,
        None => stable_dt(params, grid, RUN_SAFETY)?,
    };
    let t_end = params.t_end;
    let snaps = &opts.snapshot_times;
    if snaps.windows(2).any(|w| !(w[1] > w[0]))
        || snaps.iter().any(|&s| s < init.t || s > t_end)
    {
        return Err(invalid("snapshot times must increase within [t0, t_end]"));
    }
    let stride = opts.stride.max(1);

    let mut state = init.clone();
    let mut snapshots = Vec::with_capacity(snaps.len());
    let mut next_snap = 0;
    while next_snap < snaps.len() && snaps[next_snap] <= state.t {
        snapshots.push(state.clone());
        next_snap += 1;
    }
    hook(&state)?;
    let mut steps = 0usize;
    let mut hooked_last = true;
    let mut failure = None;

    // Time is anchored at the last landing point so drift cannot force a
    // spurious short step before a target.
    let mut anchor = state.t;
    let mut since_anchor = 0u32;
    while state.t < t_end {
        let target = snaps.get(next_snap).copied().unwrap_or(t_end);
        let mut h = dt;
        let lands = state.t + h >= target - 1e-9 * dt;
        if lands {
            h = target - state.t;
        }
        if let Err(e) = solver.advance(&mut state, h) {
            failure = Some(e);
            break;
        }
        steps += 1;
        since_anchor += 1;
        state.t = anchor + f64::from(since_anchor) * dt;
        if lands {
            state.t = target;
            anchor = target;
            since_anchor = 0;
            if next_snap < snaps.len() {
                snapshots.push(state.clone());
                next_snap += 1;
            }
        }
        hooked_last = false;
        if steps.is_multiple_of(stride) || state.t >= t_end {
            hook(&state)?;
            hooked_last = true;
        }
    }
    if !hooked_last && failure.is_none() {
        hook(&state)?;
    }
    Ok((
        RunOutput {
            final_state: state,
            snapshots,
            dt,
            steps,
        },
        failure,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tanh_state(grid: &RadialGrid, eps: f64, rho0: f64) -> FieldState {
        FieldState::from_fn(grid, Boundary::Plus, |r| {
            ((r - rho0) / (eps * std::f64::consts::SQRT_2)).tanh()
        })
    }

    #[test]
    fn grid_sizes() {
        let g = build_grid(0.02, 10).unwrap();
        assert_eq!(g.n_cells, 500);
        assert!((g.dr - 0.002).abs() < 1e-18);
        assert_eq!(build_grid(0.01, 10).unwrap().n_cells, 1000);
        assert_eq!(build_grid(0.001, 20).unwrap().n_cells, 20_000);
        assert!(build_grid(1e-7, 20).is_err());
        assert!(build_grid(0.02, 7).is_err());
        assert_eq!(*g.r.last().unwrap(), 1.0);
    }

    #[test]
    fn stencil_matches_ghost_node_and_centered_forms() {
        let g = RadialGrid::uniform(50).unwrap();
        let u: Vec<f64> = g.r.iter().map(|r| (3.0 * r).cos() + r * r * r).collect();
        for n in [2u32, 3] {
            let s = RadialStencil::new(&g, n);
            let total: f64 = s.vol.iter().sum();
            assert!((total - 1.0 / f64::from(n)).abs() < 1e-15);
            let origin = 2.0 * f64::from(n) * (u[1] - u[0]) / (g.dr * g.dr);
            assert!((s.laplacian_at(&u, 0) - origin).abs() < 1e-9 * origin.abs());
        }
        let s = RadialStencil::new(&g, 2);
        for i in 1..50 {
            let dr = g.dr;
            let centered = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dr * dr)
                + (u[i + 1] - u[i - 1]) / (2.0 * dr * g.r[i]);
            assert!((s.laplacian_at(&u, i) - centered).abs() < 1e-9 * centered.abs().max(1.0));
        }
    }

    #[test]
    fn stencil_is_second_order() {
        // u = cos(2r): Lu = -4cos(2r) - (n-1) 2 sin(2r)/r.
        for n in [2u32, 3] {
            let err = |m: usize| {
                let g = RadialGrid::uniform(m).unwrap();
                let s = RadialStencil::new(&g, n);
                let u: Vec<f64> = g.r.iter().map(|r| (2.0 * r).cos()).collect();
                (0..m)
                    .map(|i| {
                        let r = g.r[i];
                        let exact = if i == 0 {
                            -4.0 * f64::from(n)
                        } else {
                            -4.0 * (2.0 * r).cos() - f64::from(n - 1) * 2.0 * (2.0 * r).sin() / r
                        };
                        (s.laplacian_at(&u, i) - exact).abs()
                    })
                    .fold(0.0, f64::max)
            };
            let q = err(100) / err(200);
            assert!(q > 3.5 && q < 4.5, "n = {n}, ratio {q}");
        }
    }

    #[test]
    fn stable_dt_example() {
        let p = PdeParams::new(2, 0.02, 1.0, 0.18).unwrap();
        let g = build_grid(0.02, 10).unwrap();
        let dt = stable_dt(&p, &g, 0.5).unwrap();
        assert!((dt - 2e-5).abs() < 1e-18);
        assert!(stable_dt(&p, &g, 0.0).is_err());
        assert!(stable_dt(&p, &g, 1.5).is_err());
        let big_tau = PdeParams { tau: 1e6, ..p.clone() };
        let wave = 0.02 * 1e3 * g.dr;
        assert!(stable_dt(&big_tau, &g, 1.0).unwrap() < wave);
    }

    #[test]
    fn equilibria_are_fixed_points() {
        let p = PdeParams::new(2, 0.02, 1.0, 0.1).unwrap();
        let g = build_grid(0.02, 10).unwrap();
        let dt = stable_dt(&p, &g, 0.5).unwrap();
        let one = FieldState::constant(&g, 1.0, 0.0);
        let next = step(&p, &g, &one, dt).unwrap();
        assert_eq!(next.u, one.u);
        assert_eq!(next.w, one.w);

        let minus = FieldState::from_fn(&g, Boundary::Plus, |_| -1.0);
        let next = step(&p, &g, &minus, dt).unwrap();
        for i in 0..g.n_cells - 2 {
            assert_eq!(next.u[i], -1.0);
            assert_eq!(next.w[i], 0.0);
        }
        assert_eq!(*next.u.last().unwrap(), 1.0);
    }

    #[test]
    fn layer_starts_moving_inward() {
        let eps = 0.02;
        let p = PdeParams::new(2, eps, 1.0, 0.1).unwrap();
        let g = build_grid(eps, 10).unwrap();
        let dt = stable_dt(&p, &g, 0.5).unwrap();
        let s0 = tanh_state(&g, eps, 0.6);
        let one = step(&p, &g, &s0, dt).unwrap();
        let halves = step(&p, &g, &step(&p, &g, &s0, 0.5 * dt).unwrap(), 0.5 * dt).unwrap();
        for i in 0..g.len() {
            let r = g.r[i];
            if (r - 0.6).abs() <= 3.0 * eps {
                // u increases in r, so inward motion raises u at fixed r.
                assert!(one.w[i] > 0.0, "w({r}) = {}", one.w[i]);
                let rel = (one.w[i] - halves.w[i]).abs() / one.w[i].abs();
                assert!(rel < 1e-6, "Richardson mismatch {rel} at r = {r}");
            }
        }
    }

    #[test]
    fn oversized_step_rejected() {
        let p = PdeParams::new(2, 0.02, 1.0, 0.1).unwrap();
        let g = build_grid(0.02, 10).unwrap();
        let dt = stable_dt(&p, &g, 1.0).unwrap();
        let s = FieldState::constant(&g, 1.0, 0.0);
        assert!(step(&p, &g, &s, 1.01 * dt).is_err());
        let coarse = build_grid(0.02, 10).unwrap();
        let p4 = PdeParams::new(2, 0.01, 1.0, 0.1).unwrap();
        assert!(step(&p4, &coarse, &s, 1e-6).is_err());
    }

    #[test]
    fn run_lands_on_snapshots() {
        let eps = 0.04;
        let p = PdeParams::new(2, eps, 1.0, 0.01).unwrap();
        let g = build_grid(eps, 10).unwrap();
        let init = tanh_state(&g, eps, 0.6);
        let opts = RunOptions {
            snapshot_times: vec![0.0, 0.00123, 0.01],
            stride: 7,
            dt: None,
        };
        let mut seen = Vec::new();
        let out = run(&p, &g, &init, &opts, |s| {
            seen.push(s.t);
            Ok(())
        })
        .unwrap();
        let ts: Vec<f64> = out.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(ts, vec![0.0, 0.00123, 0.01]);
        assert_eq!(out.final_state, *out.snapshots.last().unwrap());
        assert_eq!(seen[0], 0.0);
        assert_eq!(*seen.last().unwrap(), 0.01);
    }

    #[test]
    fn empty_run_returns_init() {
        let p = PdeParams::new(2, 0.04, 1.0, 0.0).unwrap();
        let g = build_grid(0.04, 10).unwrap();
        let init = tanh_state(&g, 0.04, 0.6);
        let out = run(&p, &g, &init, &RunOptions::default(), |_| Ok(())).unwrap();
        assert_eq!(out.final_state, init);
        assert_eq!(out.steps, 0);
        assert!(out.snapshots.is_empty());
    }

    #[test]
    fn blow_up_is_reported() {
        let p = PdeParams::new(2, 0.04, 1.0, 0.01).unwrap();
        let g = build_grid(0.04, 10).unwrap();
        let mut init = FieldState::constant(&g, 1.0, 0.0);
        init.w[10] = 1e7;
        let err = run(&p, &g, &init, &RunOptions::default(), |_| Ok(())).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
    }

    #[test]
    fn slow_time() {
        assert!((to_slow_time(0.18, 0.02) - 450.0).abs() < 1e-9);
        assert_eq!(to_slow_time(0.0, 0.3), 0.0);
        assert!((to_slow_time(0.18, 0.01) - 1800.0).abs() < 1e-9);
    }
}
