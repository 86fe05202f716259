//! Numerical laboratory for the damped hyperbolic Allen-Cahn equation
//!
//! ```text
//! eps^2 tau u_tt + g(u) u_t = u_rr + (n-1)/r u_r - eps^-2 F'(u),   0 < r < 1
//! ```
//!
//! with radial symmetry, `u(1, t) = 1` and `u_r(0, t) = 0`, on the fast time
//! scale. Alongside the PDE solver the crate integrates the interface ODE
//! `eps^2 tau rho'' + rho' + (n-1)/rho = 0`, evaluates the energy functionals
//! in the fixed and moving frames, and orchestrates convergence experiments
//! towards mean curvature flow.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod frame;
pub mod initial;
pub mod interp;
pub mod ode;
pub mod output;
pub mod pde;
pub mod potential;
pub mod quadrature;

pub use error::{Error, Result};
