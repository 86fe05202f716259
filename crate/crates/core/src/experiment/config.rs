use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::t_max;
use crate::pde::{Boundary, PdeParams};
use crate::potential::{quartic_potential, scalar_constants, Damping, Potential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Pde,
    Ode,
    Sweep,
    Compare,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Pde => "pde",
            Mode::Ode => "ode",
            Mode::Sweep => "sweep",
            Mode::Compare => "compare",
        })
    }
}

/// Time scale used for the `t` column of time-stamped outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeScale {
    #[default]
    Fast,
    Slow,
}

impl FromStr for TimeScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(TimeScale::Fast),
            "slow" => Ok(TimeScale::Slow),
            other => Err(Error::Config(format!("time scale must be fast or slow, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Named(String),
    /// Polynomial coefficients in increasing degree.
    Coefficients(Vec<f64>),
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        match self {
            PotentialSpec::Named(s) if s == "quartic" => Ok(quartic_potential()),
            PotentialSpec::Named(s) => Err(Error::Config(format!("unknown potential {s:?}"))),
            PotentialSpec::Coefficients(c) => Potential::from_coefficients(c.clone()),
        }
    }
}

/// `tau(eps)`: `const:<v>` or `power:<c>,<p>` meaning `c eps^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauSchedule {
    Const(f64),
    Power { c: f64, p: f64 },
}

impl TauSchedule {
    pub fn tau(&self, eps: f64) -> f64 {
        match *self {
            TauSchedule::Const(v) => v,
            TauSchedule::Power { c, p } => c * eps.powf(p),
        }
    }
}

impl FromStr for TauSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("tau schedule {s:?}: expected const:<v> or power:<c>,<p>"));
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let sched = match kind.trim() {
            "const" => TauSchedule::Const(num(rest)?),
            "power" => {
                let (c, p) = rest.split_once(',').ok_or_else(bad)?;
                TauSchedule::Power { c: num(c)?, p: num(p)? }
            }
            _ => return Err(bad()),
        };
        let probe = sched.tau(0.1);
        if !(probe > 0.0 && probe.is_finite()) {
            return Err(Error::Config(format!("tau schedule {s:?} must give positive tau")));
        }
        Ok(sched)
    }
}

fn parse_boundary(s: &str) -> Result<Boundary> {
    match s.trim() {
        "+1" | "1" | "plus" => Ok(Boundary::Plus),
        "-1" | "minus" => Ok(Boundary::Minus),
        other => Err(Error::Config(format!("boundary must be +1 or -1, got {other:?}"))),
    }
}

/// One experiment, read from a TOML file of `key = value` pairs. Every key is
/// optional; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub name: Option<String>,
    pub n: u32,
    pub rho0: f64,
    pub nu0: f64,
    pub eps: Option<f64>,
    pub tau: f64,
    /// ODE inertia; defaults to `eps^2 tau`.
    pub eta: Option<f64>,
    pub potential: PotentialSpec,
    pub damping: String,
    pub boundary: String,
    /// Fast-time end of PDE runs; defaults to `(10/9) T_max g_bar`.
    pub t_end: Option<f64>,
    pub points_per_eps: usize,
    /// Steps between series rows.
    pub report_stride: usize,
    pub dt: Option<f64>,
    /// Analysis horizon `T`; defaults to `(7/9) T_max g_bar`.
    pub horizon: Option<f64>,
    /// Start of the window for interface-gap and velocity checks.
    pub t1: f64,
    pub tol: f64,
    pub ode_stride: usize,
    pub alpha: f64,
    pub tau_schedule: Option<String>,
    pub eps_list: Vec<f64>,
    pub eta_list: Vec<f64>,
    pub snapshot_times: Vec<f64>,
    pub snapshot_scale: TimeScale,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: None,
            name: None,
            n: 2,
            rho0: 0.6,
            nu0: 0.0,
            eps: None,
            tau: 1.0,
            eta: None,
            potential: PotentialSpec::Named("quartic".into()),
            damping: "const:1".into(),
            boundary: "+1".into(),
            t_end: None,
            points_per_eps: 10,
            report_stride: 10,
            dt: None,
            horizon: None,
            t1: 0.02,
            tol: crate::ode::DEFAULT_TOL,
            ode_stride: 1,
            alpha: crate::frame::DEFAULT_ALPHA,
            tau_schedule: None,
            eps_list: Vec::new(),
            eta_list: Vec::new(),
            snapshot_times: Vec::new(),
            snapshot_scale: TimeScale::Fast,
        }
    }
}

pub const DEFAULT_EPS: f64 = 0.02;

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::output::io_err(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.n != 2 && self.n != 3 {
            return cfg(format!("n must be 2 or 3, got {}", self.n));
        }
        if !(self.rho0 > 0.0 && self.rho0 < 1.0) {
            return cfg(format!("rho0 must lie in (0, 1), got {}", self.rho0));
        }
        if self.points_per_eps < 8 {
            return cfg("points_per_eps must be at least 8".into());
        }
        if self.report_stride == 0 || self.ode_stride == 0 {
            return cfg("strides must be positive".into());
        }
        if !(self.t1 >= 0.0) || !(self.tol > 0.0) {
            return cfg("t1 must be nonnegative and tol positive".into());
        }
        if self.snapshot_times.windows(2).any(|w| !(w[1] > w[0])) {
            return cfg("snapshot_times must be strictly increasing".into());
        }
        self.potential.build()?;
        self.damping()?;
        parse_boundary(&self.boundary)?;
        self.schedule()?;
        if self.eps_list.iter().chain(&self.eta_list).any(|&x| !(x > 0.0)) {
            return cfg("eps_list and eta_list entries must be positive".into());
        }
        Ok(())
    }

    pub fn damping(&self) -> Result<Damping> {
        self.damping.parse()
    }

    pub fn boundary(&self) -> Result<Boundary> {
        parse_boundary(&self.boundary)
    }

    pub fn schedule(&self) -> Result<TauSchedule> {
        match &self.tau_schedule {
            Some(s) => s.parse(),
            None => Ok(TauSchedule::Const(self.tau)),
        }
    }

    pub fn eps_or_default(&self) -> f64 {
        self.eps.unwrap_or(DEFAULT_EPS)
    }

    /// `g_bar`, which rescales the classical flow time.
    pub fn g_bar(&self) -> Result<f64> {
        Ok(scalar_constants(&self.potential.build()?, &self.damping()?)?.g_bar)
    }

    /// Extinction time of the limiting flow `g_bar rho' = -(n-1)/rho`.
    pub fn limit_extinction(&self) -> Result<f64> {
        Ok(t_max(self.n, self.rho0) * self.g_bar()?)
    }

    pub fn t_end_or_default(&self) -> Result<f64> {
        match self.t_end {
            Some(t) => Ok(t),
            None => Ok(10.0 / 9.0 * self.limit_extinction()?),
        }
    }

    pub fn horizon_or_default(&self) -> Result<f64> {
        match self.horizon {
            Some(t) => Ok(t),
            None => Ok(7.0 / 9.0 * self.limit_extinction()?),
        }
    }

    /// PDE parameters at `eps`, with `tau` from the schedule.
    pub fn pde_params(&self, eps: f64) -> Result<PdeParams> {
        let tau = self.schedule()?.tau(eps);
        let mut p = PdeParams::new(self.n, eps, tau, self.t_end_or_default()?)?
            .with_potential(self.potential.build()?)?
            .with_damping(self.damping()?)?;
        p.boundary = self.boundary()?;
        Ok(p)
    }

    /// Snapshot times on the fast scale at `eps`.
    pub fn snapshot_fast_times(&self, eps: f64) -> Vec<f64> {
        let k = match self.snapshot_scale {
            TimeScale::Fast => 1.0,
            TimeScale::Slow => eps * eps,
        };
        self.snapshot_times.iter().map(|t| t * k).collect()
    }

    /// ODE inertia: `eta`, else `eps^2 tau(eps)`.
    pub fn ode_eta(&self) -> Result<f64> {
        match (self.eta, self.eps) {
            (Some(e), _) => Ok(e),
            (None, Some(eps)) => Ok(eps * eps * self.schedule()?.tau(eps)),
            (None, None) => Err(Error::Config("ode mode needs eta or eps".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_parsing() {
        let c = ExperimentConfig::from_toml_str("mode = \"pde\"\neps = 0.02\n").unwrap();
        assert_eq!(c.mode, Some(Mode::Pde));
        assert_eq!(c.n, 2);
        assert!((c.t_end_or_default().unwrap() - 0.2).abs() < 1e-14);
        assert!((c.horizon_or_default().unwrap() - 0.14).abs() < 1e-14);
        let p = c.pde_params(0.02).unwrap();
        assert_eq!(p.tau, 1.0);
        assert_eq!(c.snapshot_fast_times(0.02), Vec::<f64>::new());
    }

    #[test]
    fn slow_snapshots_map_to_fast() {
        let c = ExperimentConfig::from_toml_str(
            "snapshot_times = [100.0, 250.0, 400.0, 450.0]\nsnapshot_scale = \"slow\"\n",
        )
        .unwrap();
        let f = c.snapshot_fast_times(0.02);
        let want = [0.04, 0.1, 0.16, 0.18];
        for (a, b) in f.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn schedules_and_potentials() {
        let s: TauSchedule = "power:1,1".parse().unwrap();
        assert_eq!(s.tau(0.02), 0.02);
        assert_eq!("const:0.5".parse::<TauSchedule>().unwrap().tau(0.3), 0.5);
        assert!("power:1".parse::<TauSchedule>().is_err());
        assert!("const:-1".parse::<TauSchedule>().is_err());
        let c = ExperimentConfig::from_toml_str("potential = [0.25, 0.0, -0.5, 0.0, 0.25]\n").unwrap();
        let p = c.potential.build().unwrap();
        assert!((p.f(0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml_str("bogus = 1\n").is_err());
        assert!(ExperimentConfig::from_toml_str("n = 4\n").is_err());
        assert!(ExperimentConfig::from_toml_str("mode = \"fly\"\n").is_err());
        assert!(ExperimentConfig::from_toml_str("damping = \"const:0\"\n").is_err());
        assert!(ExperimentConfig::from_toml_str("boundary = \"0\"\n").is_err());
        assert!(ExperimentConfig::from_toml_str("snapshot_times = [0.2, 0.1]\n").is_err());
    }

    #[test]
    fn affine_damping_rescales_time() {
        let c = ExperimentConfig::from_toml_str("damping = \"affine:2,1\"\n").unwrap();
        assert!((c.g_bar().unwrap() - 2.0).abs() < 1e-9);
        assert!((c.limit_extinction().unwrap() - 0.36).abs() < 1e-8);
    }

    #[test]
    fn eta_resolution() {
        let mut c = ExperimentConfig::default();
        assert!(c.ode_eta().is_err());
        c.eps = Some(0.1);
        assert!((c.ode_eta().unwrap() - 0.01).abs() < 1e-15);
        c.eta = Some(1e-4);
        assert_eq!(c.ode_eta().unwrap(), 1e-4);
    }
}
