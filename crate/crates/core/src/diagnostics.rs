//! Fixed-frame functionals: discrete energy and its dissipation identity,
//! Psi-variation bounds, interface extraction, L1 step distances, and the
//! velocity-curvature law.
//!
//! The energy uses the solver's cell volumes for the nodal terms and its
//! face weights for the staggered gradient, so that along the semi-discrete
//! flow `dE/dt = -eps sum vol g(u) w^2` holds exactly and the dissipation
//! residual measures time-discretisation error only.

use crate::error::{invalid, Result};
use crate::pde::{FieldState, PdeParams, RadialGrid, RadialStencil};
use crate::potential::{Damping, Potential, PsiTable};

/// Energy functional bound to one grid, dimension, and parameter set.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    pub eps: f64,
    pub tau: f64,
    pub potential: Potential,
    pub damping: Damping,
    stencil: RadialStencil,
    // Node volume split at the cell centre: [r_i, r_{i+1/2}] and [r_{i-1/2}, r_i].
    right_half: Vec<f64>,
    left_half: Vec<f64>,
}

impl EnergyModel {
    pub fn new(params: &PdeParams, grid: &RadialGrid) -> Self {
        Self::from_parts(
            grid,
            params.n,
            params.eps,
            params.tau,
            &params.potential,
            &params.damping,
        )
    }

    pub fn from_parts(
        grid: &RadialGrid,
        n: u32,
        eps: f64,
        tau: f64,
        potential: &Potential,
        damping: &Damping,
    ) -> Self {
        let stencil = RadialStencil::new(grid, n);
        let nf = f64::from(n);
        let ni = n as i32;
        let m = grid.n_cells;
        let half = 0.5 * grid.dr;
        let right_half = (0..=m)
            .map(|i| {
                let r = grid.r[i];
                let hi = (r + half).min(1.0);
                (hi.powi(ni) - r.powi(ni)) / nf
            })
            .collect::<Vec<_>>();
        let left_half = (0..=m).map(|i| stencil.vol[i] - right_half[i]).collect();
        Self {
            eps,
            tau,
            potential: potential.clone(),
            damping: *damping,
            stencil,
            right_half,
            left_half,
        }
    }

    pub fn stencil(&self) -> &RadialStencil {
        &self.stencil
    }

    /// `E_eps = sum vol [eps^3 tau/2 w^2 + F(u)/eps] + eps/2 sum face dr (du/dr)^2`.
    pub fn energy(&self, s: &FieldState) -> f64 {
        let (eps, tau) = (self.eps, self.tau);
        let kin = 0.5 * eps.powi(3) * tau;
        let mut nodal = 0.0;
        for i in 0..s.u.len() {
            nodal += self.stencil.vol[i] * (kin * s.w[i] * s.w[i] + self.potential.f(s.u[i]) / eps);
        }
        nodal + 0.5 * eps * self.gradient_sq(s)
    }

    // sum over faces of face dr (du/dr)^2.
    fn gradient_sq(&self, s: &FieldState) -> f64 {
        let dr = self.stencil.dr;
        self.stencil
            .face
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let d = (s.u[i + 1] - s.u[i]) / dr;
                f * dr * d * d
            })
            .sum()
    }

    /// `eps sum vol g(u) w^2`, the instantaneous dissipation.
    pub fn dissipation_rate(&self, s: &FieldState) -> f64 {
        self.eps
            * s.u
                .iter()
                .zip(&s.w)
                .zip(&self.stencil.vol)
                .map(|((&u, &w), v)| v * self.damping.g(u) * w * w)
                .sum::<f64>()
    }

    /// `eps sum vol w^2` (no damping weight).
    pub fn kinetic_rate(&self, s: &FieldState) -> f64 {
        self.eps * s.w.iter().zip(&self.stencil.vol).map(|(w, v)| v * w * w).sum::<f64>()
    }

    /// `sum vol F(u)`, the discrete `int F(u) r^{n-1} dr`.
    pub fn potential_mass(&self, s: &FieldState) -> f64 {
        s.u.iter()
            .zip(&self.stencil.vol)
            .map(|(&u, v)| v * self.potential.f(u))
            .sum()
    }

    /// Discrete `int |Psi'(u) u_r| r^{n-1} dr` on faces, with `F` averaged
    /// over the two half-volumes adjacent to each face. Young's inequality
    /// then gives `grad_bv <= E_eps` exactly.
    pub fn grad_bv(&self, s: &FieldState) -> f64 {
        let dr = self.stencil.dr;
        let mut total = 0.0;
        for (i, &face) in self.stencil.face.iter().enumerate() {
            let m = face * dr;
            if m == 0.0 {
                continue;
            }
            let fbar = (self.right_half[i] * self.potential.f(s.u[i])
                + self.left_half[i + 1] * self.potential.f(s.u[i + 1]))
                / m;
            total += m * (2.0 * fbar).sqrt() * ((s.u[i + 1] - s.u[i]) / dr).abs();
        }
        total
    }

    /// `sum vol |Psi(u2) - Psi(u1)|`.
    pub fn psi_distance(&self, a: &FieldState, b: &FieldState, psi: &PsiTable) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..a.u.len() {
            total += self.stencil.vol[i] * (psi.eval(b.u[i])? - psi.eval(a.u[i])?).abs();
        }
        Ok(total)
    }
}

/// Discrete energy of `state`; see [`EnergyModel::energy`].
pub fn energy_eps(
    state: &FieldState,
    grid: &RadialGrid,
    eps: f64,
    tau: f64,
    n: u32,
    potential: &Potential,
) -> f64 {
    EnergyModel::from_parts(grid, n, eps, tau, potential, &Damping::Constant(1.0)).energy(state)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalResidual {
    pub t0: f64,
    pub t1: f64,
    /// Trapezoid in time of `eps int g u_t^2`.
    pub lhs: f64,
    /// `E(t0) - E(t1)`.
    pub rhs: f64,
    pub residual: f64,
}

/// Dissipation identity per consecutive pair of `states`.
pub fn dissipation_residual(
    states: &[FieldState],
    grid: &RadialGrid,
    params: &PdeParams,
) -> Vec<IntervalResidual> {
    let model = EnergyModel::new(params, grid);
    let e: Vec<(f64, f64)> = states
        .iter()
        .map(|s| (model.energy(s), model.dissipation_rate(s)))
        .collect();
    states
        .windows(2)
        .zip(e.windows(2))
        .map(|(s, v)| {
            let lhs = 0.5 * (s[1].t - s[0].t) * (v[0].1 + v[1].1);
            let rhs = v[0].0 - v[1].0;
            IntervalResidual {
                t0: s[0].t,
                t1: s[1].t,
                lhs,
                rhs,
                residual: lhs - rhs,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub t: f64,
    pub e_eps: f64,
    /// `eps int int g(u) u_t^2` over `[t_prev, t]`, accumulated per step.
    pub dissipation_lhs: f64,
    /// `E(t_prev) - E(t)`.
    pub dissipation_rhs: f64,
    pub residual: f64,
    /// `eps kappa int int u_t^2` over the same interval.
    pub kappa_lhs: f64,
    pub psi_grad_bv: f64,
    /// `int F(u) r^{n-1} dr`.
    pub potential_mass: f64,
    pub interface_rho: Option<f64>,
}

/// Streaming energy bookkeeping. Feed every step to [`EnergyMonitor::observe`];
/// a report is emitted every `report_stride` observations and on [`EnergyMonitor::finish`].
#[derive(Debug, Clone)]
pub struct EnergyMonitor {
    model: EnergyModel,
    grid: RadialGrid,
    kappa: f64,
    report_stride: usize,
    count: usize,
    prev: Option<(f64, f64, f64)>,
    acc: f64,
    acc_kappa: f64,
    interval_energy: f64,
    last_state: Option<FieldState>,
    reported_last: bool,
    rho: Option<f64>,
    reports: Vec<EnergyReport>,
}

impl EnergyMonitor {
    pub fn new(params: &PdeParams, grid: &RadialGrid, report_stride: usize) -> Self {
        Self {
            model: EnergyModel::new(params, grid),
            grid: grid.clone(),
            kappa: params.damping.kappa(),
            report_stride: report_stride.max(1),
            count: 0,
            prev: None,
            acc: 0.0,
            acc_kappa: 0.0,
            interval_energy: 0.0,
            last_state: None,
            reported_last: false,
            rho: None,
            reports: Vec::new(),
        }
    }

    pub fn observe(&mut self, s: &FieldState) {
        let e = self.model.energy(s);
        let d = self.model.dissipation_rate(s);
        let k = self.kappa * self.model.kinetic_rate(s);
        match self.prev {
            None => {
                self.interval_energy = e;
                self.prev = Some((s.t, d, k));
                self.emit(s, e);
            }
            Some((t0, d0, k0)) => {
                let h = s.t - t0;
                self.acc += 0.5 * h * (d0 + d);
                self.acc_kappa += 0.5 * h * (k0 + k);
                self.prev = Some((s.t, d, k));
                self.count += 1;
                if self.count.is_multiple_of(self.report_stride) {
                    self.emit(s, e);
                } else {
                    self.reported_last = false;
                    self.last_state = Some(s.clone());
                }
            }
        }
    }

    fn emit(&mut self, s: &FieldState, e: f64) {
        let rhs = self.interval_energy - e;
        self.rho = extract_interface(s, &self.grid, self.rho);
        self.reports.push(EnergyReport {
            t: s.t,
            e_eps: e,
            dissipation_lhs: self.acc,
            dissipation_rhs: rhs,
            residual: self.acc - rhs,
            kappa_lhs: self.acc_kappa,
            psi_grad_bv: self.model.grad_bv(s),
            potential_mass: self.model.potential_mass(s),
            interface_rho: self.rho,
        });
        self.acc = 0.0;
        self.acc_kappa = 0.0;
        self.interval_energy = e;
        self.reported_last = true;
        self.last_state = None;
    }

    /// Flushes a trailing partial interval and returns all reports.
    pub fn finish(mut self) -> Vec<EnergyReport> {
        if !self.reported_last {
            if let Some(s) = self.last_state.take() {
                let e = self.model.energy(&s);
                self.emit(&s, e);
            }
        }
        self.reports
    }

    pub fn reports(&self) -> &[EnergyReport] {
        &self.reports
    }

    pub fn model(&self) -> &EnergyModel {
        &self.model
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderEntry {
    pub t1: f64,
    pub t2: f64,
    pub time_bv: f64,
    pub bound: f64,
    /// `time_bv / (sqrt(2/kappa) M (t2 - t1)^{1/2})`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiVariation {
    /// `(t, grad_bv)` per state.
    pub grad_bv: Vec<(f64, f64)>,
    /// `(t1, t2, time_bv)` per consecutive interval.
    pub time_bv: Vec<(f64, f64, f64)>,
    /// Every pair `i < j`.
    pub holder: Vec<HolderEntry>,
}

impl PsiVariation {
    pub fn max_holder_ratio(&self) -> f64 {
        self.holder.iter().map(|h| h.ratio).fold(0.0, f64::max)
    }
}

/// Psi-variation bounds over `states` from one run, with `m` the energy bound.
pub fn psi_variation(
    states: &[FieldState],
    model: &EnergyModel,
    kappa: f64,
    m: f64,
) -> Result<PsiVariation> {
    if !(kappa > 0.0) {
        return Err(invalid("kappa must be positive"));
    }
    let psi = PsiTable::new(&model.potential)?;
    let grad_bv = states.iter().map(|s| (s.t, model.grad_bv(s))).collect();
    let mut time_bv = Vec::new();
    let mut holder = Vec::new();
    let scale = (2.0 / kappa).sqrt() * m;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let (a, b) = (&states[i], &states[j]);
            let tv = model.psi_distance(a, b, &psi)?;
            if j == i + 1 {
                time_bv.push((a.t, b.t, tv));
            }
            let dt = b.t - a.t;
            if dt > 0.0 {
                let bound = scale * dt.sqrt();
                holder.push(HolderEntry {
                    t1: a.t,
                    t2: b.t,
                    time_bv: tv,
                    bound,
                    ratio: tv / bound,
                });
            }
        }
    }
    Ok(PsiVariation {
        grad_bv,
        time_bv,
        holder,
    })
}

/// Zero crossing of `u` nearest `prev_rho`, or the outermost one when
/// `prev_rho` is absent; `None` if `u` keeps one sign.
pub fn extract_interface(state: &FieldState, grid: &RadialGrid, prev_rho: Option<f64>) -> Option<f64> {
    let u = &state.u;
    let mut best: Option<f64> = None;
    let mut pick = |c: f64| {
        best = Some(match (best, prev_rho) {
            (None, _) => c,
            (Some(b), Some(p)) => {
                if (c - p).abs() < (b - p).abs() {
                    c
                } else {
                    b
                }
            }
            (Some(b), None) => b.max(c),
        });
    };
    for i in 0..u.len() {
        if u[i] == 0.0 {
            pick(grid.r[i]);
        } else if i + 1 < u.len() && u[i] * u[i + 1] < 0.0 {
            pick(grid.r[i] + grid.dr * u[i] / (u[i] - u[i + 1]));
        }
    }
    best
}

// int_a^b |p + q r| r^{n-1} dr for a sign-definite linear integrand.
fn linear_moment(p: f64, q: f64, a: f64, b: f64, n: i32) -> f64 {
    let nf = f64::from(n);
    (p * (b.powi(n) - a.powi(n)) / nf + q * (b.powi(n + 1) - a.powi(n + 1)) / (nf + 1.0)).abs()
}

/// `int_0^1 |u - omega| r^{n-1} dr` with `omega = -1` below `rho_ref` and
/// `+1` above, exact for the piecewise-linear interpolant of `u`.
pub fn l1_step_distance(state: &FieldState, grid: &RadialGrid, n: u32, rho_ref: f64) -> f64 {
    let ni = n as i32;
    let mut total = 0.0;
    for i in 0..grid.n_cells {
        let (r0, r1) = (grid.r[i], grid.r[i + 1]);
        let (u0, u1) = (state.u[i], state.u[i + 1]);
        let slope = (u1 - u0) / (r1 - r0);
        let mut cuts = vec![r0];
        if rho_ref > r0 && rho_ref < r1 {
            cuts.push(rho_ref);
        }
        cuts.push(r1);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let omega = if 0.5 * (a + b) < rho_ref { -1.0 } else { 1.0 };
            // d(r) = p + q r on [a, b].
            let q = slope;
            let p = u0 - slope * r0 - omega;
            let (da, db) = (p + q * a, p + q * b);
            if da * db < 0.0 {
                let root = -p / q;
                total += linear_moment(p, q, a, root, ni) + linear_moment(p, q, root, b, ni);
            } else {
                total += linear_moment(p, q, a, b, ni);
            }
        }
    }
    total
}

/// `(2/n) |rho_eps^n - rho_0ref^n|`, the L1 distance between two step profiles.
pub fn omega_pair_distance(rho_eps: f64, rho_0ref: f64, n: u32) -> f64 {
    let ni = n as i32;
    2.0 / f64::from(n) * (rho_eps.powi(ni) - rho_0ref.powi(ni)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureRow {
    pub t: f64,
    pub measured_v: f64,
    /// `K / g_bar` with `K = (n-1)/rho`.
    pub k_over_gbar: f64,
    /// `g_bar |V| / K`.
    pub ratio: f64,
}

/// Centered-difference velocities compared with `K / g_bar`, skipping the
/// first and last 10% of the time span.
pub fn velocity_curvature_check(series: &[(f64, f64)], g_bar: f64, n: u32) -> Result<Vec<CurvatureRow>> {
    if series.len() < 3 {
        return Err(invalid("velocity check needs at least 5 usable samples"));
    }
    let (t0, t1) = (series[0].0, series[series.len() - 1].0);
    let (lo, hi) = (t0 + 0.1 * (t1 - t0), t1 - 0.1 * (t1 - t0));
    let nm1 = f64::from(n - 1);
    let rows: Vec<CurvatureRow> = series
        .windows(3)
        .filter(|w| w[1].0 >= lo && w[1].0 <= hi)
        .map(|w| {
            let v = (w[2].1 - w[0].1) / (w[2].0 - w[0].0);
            let k = nm1 / w[1].1;
            CurvatureRow {
                t: w[1].0,
                measured_v: v,
                k_over_gbar: k / g_bar,
                ratio: g_bar * v.abs() / k,
            }
        })
        .collect();
    if rows.len() < 5 {
        return Err(invalid(format!("velocity check needs at least 5 usable samples, got {}", rows.len())));
    }
    Ok(rows)
}
