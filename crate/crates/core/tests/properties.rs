//! Property tests for invariants that must hold across parameter ranges.

use hyperac::diagnostics::{energy_eps, l1_step_distance, omega_pair_distance};
use hyperac::frame::{phi_eval, phi_r_eval};
use hyperac::interp::Hermite;
use hyperac::ode::{integrate_to_extinction, OdeParams};
use hyperac::output::fmt_num;
use hyperac::pde::{Boundary, FieldState, RadialGrid, RadialStencil};
use hyperac::potential::{psi, quartic_potential, standing_wave, WaveProfile};
use proptest::prelude::*;
use std::sync::OnceLock;

fn wave() -> &'static WaveProfile {
    static W: OnceLock<WaveProfile> = OnceLock::new();
    W.get_or_init(|| standing_wave(&quartic_potential(), 20.0, 4001).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_is_monotone_and_odd(a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let p = quartic_potential();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(psi(&p, lo).unwrap() <= psi(&p, hi).unwrap() + 1e-12);
        let mid = psi(&p, 0.0).unwrap();
        prop_assert!((psi(&p, -a).unwrap() + psi(&p, a).unwrap() - 2.0 * mid).abs() < 1e-10);
    }

    #[test]
    fn standing_wave_matches_closed_form(z in -8.0f64..8.0) {
        // The quartic well has the explicit layer tanh(z / sqrt 2).
        prop_assert!((wave().eval(z) - (z / 2f64.sqrt()).tanh()).abs() < 1e-6);
    }

    #[test]
    fn standing_wave_satisfies_first_integral(i in 2usize..3999) {
        let (z, u) = (wave().z_samples(), wave().u_samples());
        let h = z[i + 1] - z[i];
        let du = (-u[i + 2] + 8.0 * u[i + 1] - 8.0 * u[i - 1] + u[i - 2]) / (12.0 * h);
        prop_assert!((du - (1.0 - u[i] * u[i]) / 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn gamma_is_invariant(rho0 in 0.2f64..0.9, frac in 0.0f64..1.0, log_eta in -4.0f64..-1.0) {
        let nu0 = -frac / rho0;
        let eta = 10f64.powf(log_eta);
        let traj = integrate_to_extinction(&OdeParams::new(2, eta, rho0, nu0).unwrap(), 1e-9).unwrap();
        for (&rho, &nu) in traj.rho.iter().zip(&traj.nu) {
            prop_assert!(nu <= 1e-9);
            prop_assert!(rho * nu + 1.0 >= -1e-7);
        }
    }

    #[test]
    fn phi_symmetry_and_range(rho in 0.05f64..0.95, nu in -10.0f64..0.0, x in 0.0f64..1.0, n in 2u32..4) {
        let (eps, tau) = (0.02, 1.0);
        let r = x * rho;
        let plus = phi_eval(n, eps, tau, rho, nu, r).unwrap();
        let minus = phi_eval(n, eps, tau, rho, nu, -r).unwrap();
        prop_assert!((0.0..=1.0).contains(&plus) && (0.0..=1.0).contains(&minus));
        prop_assert!(minus <= plus + 1e-15);
    }

    #[test]
    fn phi_r_matches_difference_quotient(rho in 0.1f64..0.9, nu in -5.0f64..0.0, x in -0.8f64..0.8) {
        let (eps, tau, h) = (0.05, 1.0, 1e-6);
        let r = x * rho;
        let fd = (phi_eval(2, eps, tau, rho, nu, r + h).unwrap()
            - phi_eval(2, eps, tau, rho, nu, r - h).unwrap()) / (2.0 * h);
        let exact = phi_r_eval(2, eps, tau, rho, nu, r).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()));
    }

    #[test]
    fn laplacian_of_quadratic_is_exact_in_the_plane(m in 8usize..400) {
        let grid = RadialGrid::uniform(m).unwrap();
        let st = RadialStencil::new(&grid, 2);
        let u: Vec<f64> = grid.r.iter().map(|r| r * r).collect();
        for i in 0..m {
            prop_assert!((st.laplacian_at(&u, i) - 4.0).abs() < 1e-12 * (m * m) as f64 + 1e-9);
        }
    }

    #[test]
    fn energy_is_nonnegative(seed in proptest::collection::vec(-1.2f64..1.2, 51), w in -1.0f64..1.0) {
        let grid = RadialGrid::uniform(50).unwrap();
        let mut s = FieldState::constant(&grid, 1.0, w);
        s.u.copy_from_slice(&seed);
        let e = energy_eps(&s, &grid, 0.05, 1.0, 2, &quartic_potential());
        prop_assert!(e >= 0.0);
    }

    #[test]
    fn l1_distance_is_nonnegative_and_bounded(rho_ref in 0.0f64..1.0, c in 0.05f64..0.95) {
        let grid = RadialGrid::uniform(200).unwrap();
        let s = FieldState::from_fn(&grid, Boundary::Plus, |r| if r < c { -1.0 } else { 1.0 });
        let d = l1_step_distance(&s, &grid, 2, rho_ref);
        prop_assert!(d >= 0.0);
        // Step profiles differ only between the two radii, up to one cell of ramp.
        prop_assert!(d <= omega_pair_distance(c, rho_ref, 2) + 2.0 * grid.dr);
    }

    #[test]
    fn monotone_hermite_stays_monotone(mut ys in proptest::collection::vec(-5.0f64..5.0, 3..20), q in 0.0f64..1.0) {
        ys.sort_by(f64::total_cmp);
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
        let h = Hermite::monotone(xs.clone(), ys.clone()).unwrap();
        let x = q * (ys.len() - 1) as f64;
        let (a, b) = (h.eval(x), h.eval((x + 0.01).min((ys.len() - 1) as f64)));
        prop_assert!(a <= b + 1e-12);
        prop_assert!(a >= ys[0] - 1e-12 && a <= ys[ys.len() - 1] + 1e-12);
    }

    #[test]
    fn csv_numbers_round_trip(x in proptest::num::f64::NORMAL) {
        prop_assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }
}
