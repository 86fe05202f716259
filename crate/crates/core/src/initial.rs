//! Layer initial data and the preparedness functionals evaluated on them.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::pde::{radial_gradient, trapezoid_radial, Boundary, FieldState, RadialGrid, RadialStencil};
use crate::potential::{psi, Potential, WaveProfile};

/// `u0(r) = U0((r - rho0)/eps)`, `u1 = 0`, with `u(1) = 1`.
pub fn layer_initial_data(
    grid: &RadialGrid,
    eps: f64,
    rho0: f64,
    profile: &WaveProfile,
) -> Result<FieldState> {
    if !(rho0 > 4.0 * eps && rho0 < 1.0 - 4.0 * eps) {
        return Err(invalid(format!(
            "rho0 = {rho0} must lie in (4 eps, 1 - 4 eps) = ({}, {})",
            4.0 * eps,
            1.0 - 4.0 * eps
        )));
    }
    Ok(FieldState::from_fn(grid, Boundary::Plus, |r| {
        profile.eval((r - rho0) / eps)
    }))
}

/// `theta(r) = exp(-(n-1)(r/rho0 - 1)) (r/rho0)^{n-1}`.
pub fn theta_weight(n: u32, rho0: f64, r: f64) -> f64 {
    let nm1 = f64::from(n - 1);
    let x = r / rho0;
    (-nm1 * (x - 1.0)).exp() * x.powi(n as i32 - 1)
}

/// Trapezoid of `[eps^3 tau/2 u1^2 + eps/2 u0_r^2 + F(u0)/eps] theta(r)`.
pub fn weighted_energy(
    state: &FieldState,
    grid: &RadialGrid,
    eps: f64,
    tau: f64,
    n: u32,
    rho0: f64,
    potential: &Potential,
) -> f64 {
    let ur = radial_gradient(&state.u, grid.dr);
    let dens: Vec<f64> = (0..state.u.len())
        .map(|i| {
            let d = 0.5 * eps.powi(3) * tau * state.w[i] * state.w[i]
                + 0.5 * eps * ur[i] * ur[i]
                + potential.f(state.u[i]) / eps;
            d * theta_weight(n, rho0, grid.r[i])
        })
        .collect();
    // theta already carries the radial factor; integrate against dr only.
    trapezoid_radial(&dens, grid, 1)
}

/// `R[u0,u1] = eps^-2 tau^-1 int (L u0 - eps^-2 F'(u0) - u1)^2 r^{n-1} + int (u1_r)^2 r^{n-1}`.
pub fn prepared_residual(
    state: &FieldState,
    grid: &RadialGrid,
    eps: f64,
    tau: f64,
    n: u32,
    potential: &Potential,
) -> f64 {
    let stencil = RadialStencil::new(grid, n);
    let m = state.u.len();
    let inv_eps2 = 1.0 / (eps * eps);
    let mut res = vec![0.0; m];
    for (i, r) in res.iter_mut().enumerate().take(m - 1) {
        let v = stencil.laplacian_at(&state.u, i) - inv_eps2 * potential.fp(state.u[i]) - state.w[i];
        *r = v * v;
    }
    let wr = radial_gradient(&state.w, grid.dr);
    let wr2: Vec<f64> = wr.iter().map(|v| v * v).collect();
    inv_eps2 / tau * trapezoid_radial(&res, grid, n) + trapezoid_radial(&wr2, grid, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreparednessReport {
    pub eps: f64,
    pub tau: f64,
    pub n: u32,
    pub rho0: f64,
    pub weighted_energy: f64,
    pub c0: f64,
    pub excess: f64,
    pub residual_r: f64,
    /// `C eps^-5 tau^-1`.
    pub residual_bound: f64,
    /// `R eps^5 tau`.
    pub residual_ratio: f64,
}

impl PreparednessReport {
    pub const HEADER: [&'static str; 10] = [
        "eps",
        "tau",
        "n",
        "rho0",
        "weighted_energy",
        "c0",
        "excess",
        "residual_R",
        "residual_bound",
        "residual_ratio",
    ];

    pub fn row(&self) -> Vec<Option<f64>> {
        [
            self.eps,
            self.tau,
            f64::from(self.n),
            self.rho0,
            self.weighted_energy,
            self.c0,
            self.excess,
            self.residual_r,
            self.residual_bound,
            self.residual_ratio,
        ]
        .into_iter()
        .map(Some)
        .collect()
    }
}

#[allow(clippy::too_many_arguments)]
pub fn preparedness(
    state: &FieldState,
    grid: &RadialGrid,
    eps: f64,
    tau: f64,
    n: u32,
    rho0: f64,
    potential: &Potential,
    c_bound: f64,
) -> Result<PreparednessReport> {
    let c0 = psi(potential, 1.0)?;
    let we = weighted_energy(state, grid, eps, tau, n, rho0, potential);
    let r = prepared_residual(state, grid, eps, tau, n, potential);
    Ok(PreparednessReport {
        eps,
        tau,
        n,
        rho0,
        weighted_energy: we,
        c0,
        excess: we - c0,
        residual_r: r,
        residual_bound: c_bound / (eps.powi(5) * tau),
        residual_ratio: r * eps.powi(5) * tau,
    })
}
