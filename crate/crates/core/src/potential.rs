//! Double-well potential, damping, and the derived one-dimensional objects:
//! the primitive Psi, the transition energy c0, the mean damping g_bar, and
//! the standing-wave profile.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::interp::Hermite;
use crate::quadrature::{integrate, integrate_with_breaks};

/// Absolute tolerance for every Psi-type integral.
pub const PSI_TOL: f64 = 1e-10;
/// Samples per validation interval.
pub const VALIDATION_SAMPLES: usize = 401;
/// Range on which damping bounds and stiffness maxima are sampled.
pub const SAMPLE_RANGE: (f64, f64) = (-1.5, 1.5);

const WELL_TOL: f64 = 1e-10;
const WELL_SPLIT: f64 = 1e-6;
const WAVE_CLIP: f64 = 1e-8;

fn samples(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let m = VALIDATION_SAMPLES - 1;
    (0..=m).map(move |k| lo + (hi - lo) * k as f64 / m as f64)
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * s + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect()
}

/// Optional growth constants: `c1 |s|^(gamma/2+1) <= F(s) <= big_c1 |s|^gamma`
/// for `|s| >= k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBounds {
    pub gamma: f64,
    pub c1: f64,
    pub big_c1: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Quartic,
    Polynomial { f: Vec<f64>, fp: Vec<f64>, fpp: Vec<f64> },
}

/// A double-well potential with wells at +-1.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    shape: Shape,
    growth: Option<GrowthBounds>,
}

/// `F(s) = (s^2 - 1)^2 / 4`.
pub fn quartic_potential() -> Potential {
    Potential {
        shape: Shape::Quartic,
        growth: None,
    }
}

impl Potential {
    /// Polynomial potential from ascending coefficients of `F`.
    pub fn from_coefficients(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(invalid("potential coefficients must be finite and nonempty"));
        }
        let fp = derivative(&coeffs);
        let fpp = derivative(&fp);
        let p = Self {
            shape: Shape::Polynomial { f: coeffs, fp, fpp },
            growth: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_growth(mut self, growth: GrowthBounds) -> Result<Self> {
        self.growth = Some(growth);
        self.validate()?;
        Ok(self)
    }

    pub fn growth(&self) -> Option<GrowthBounds> {
        self.growth
    }

    pub fn name(&self) -> String {
        match &self.shape {
            Shape::Quartic => "quartic".to_string(),
            Shape::Polynomial { f, .. } => {
                let parts: Vec<String> = f.iter().map(|c| format!("{c:?}")).collect();
                format!("poly[{}]", parts.join(","))
            }
        }
    }

    #[inline]
    pub fn f(&self, s: f64) -> f64 {
        match &self.shape {
            // Factored so the wells are resolved to full relative precision.
            Shape::Quartic => {
                let q = (s - 1.0) * (s + 1.0);
                0.25 * q * q
            }
            Shape::Polynomial { f, .. } => horner(f, s),
        }
    }

    #[inline]
    pub fn fp(&self, s: f64) -> f64 {
        match &self.shape {
            Shape::Quartic => s * (s - 1.0) * (s + 1.0),
            Shape::Polynomial { fp, .. } => horner(fp, s),
        }
    }

    #[inline]
    pub fn fpp(&self, s: f64) -> f64 {
        match &self.shape {
            Shape::Quartic => 3.0 * s * s - 1.0,
            Shape::Polynomial { fpp, .. } => horner(fpp, s),
        }
    }

    /// The bistable reaction `f = -F'`.
    #[inline]
    pub fn reaction(&self, s: f64) -> f64 {
        -self.fp(s)
    }

    /// `sqrt(2 F(s))`, clamped at zero against rounding.
    #[inline]
    pub fn sqrt_2f(&self, s: f64) -> f64 {
        (2.0 * self.f(s)).max(0.0).sqrt()
    }

    /// Largest `|F''|` over [`SAMPLE_RANGE`].
    pub fn max_abs_fpp(&self) -> f64 {
        samples(SAMPLE_RANGE.0, SAMPLE_RANGE.1)
            .map(|s| self.fpp(s).abs())
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        for w in [-1.0, 1.0] {
            if self.f(w).abs() > WELL_TOL || self.fp(w).abs() > WELL_TOL {
                return Err(invalid(format!("potential must vanish to second order at {w}")));
            }
            if !(self.fpp(w) > 0.0) {
                return Err(invalid(format!("F''({w}) must be positive")));
            }
        }
        for s in samples(-2.0, 2.0) {
            if (s.abs() - 1.0).abs() >= 1e-3 && !(self.f(s) > 0.0) {
                return Err(invalid(format!("F({s}) must be positive away from the wells")));
            }
        }
        if let Some(g) = self.growth {
            if !(g.k > 0.0 && g.c1 > 0.0 && g.big_c1 > 0.0 && g.gamma > 0.0) {
                return Err(invalid("growth constants must be positive"));
            }
            for a in samples(g.k, 4.0 * g.k) {
                for s in [a, -a] {
                    let f = self.f(s);
                    let lo = g.c1 * a.powf(g.gamma / 2.0 + 1.0);
                    let hi = g.big_c1 * a.powf(g.gamma);
                    if f < lo || f > hi {
                        return Err(invalid(format!("growth bounds fail at s = {s}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Damping coefficient `g` in front of `u_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damping {
    Constant(f64),
    /// `g(s) = a + b s`.
    Affine { a: f64, b: f64 },
}

impl Damping {
    #[inline]
    pub fn g(&self, s: f64) -> f64 {
        match *self {
            Damping::Constant(k) => k,
            Damping::Affine { a, b } => a + b * s,
        }
    }

    /// Lower bound of `g` over [`SAMPLE_RANGE`].
    pub fn kappa(&self) -> f64 {
        samples(SAMPLE_RANGE.0, SAMPLE_RANGE.1)
            .map(|s| self.g(s))
            .fold(f64::INFINITY, f64::min)
    }

    /// Upper bound of `g` over [`SAMPLE_RANGE`].
    pub fn max_g(&self) -> f64 {
        samples(SAMPLE_RANGE.0, SAMPLE_RANGE.1)
            .map(|s| self.g(s))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.kappa();
        if k > 0.0 && k.is_finite() && self.max_g().is_finite() {
            Ok(())
        } else {
            Err(invalid(format!("damping must be bounded below by kappa > 0, got {k}")))
        }
    }
}

impl fmt::Display for Damping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Damping::Constant(k) => write!(f, "const:{k:?}"),
            Damping::Affine { a, b } => write!(f, "affine:{a:?},{b:?}"),
        }
    }
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("not a number: {s:?}")))
}

impl FromStr for Damping {
    type Err = Error;

    /// Accepts `const:<k>` or `affine:<a>,<b>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("damping descriptor {s:?} lacks a kind")))?;
        let d = match kind.trim() {
            "const" => Damping::Constant(parse_num(rest)?),
            "affine" => {
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Config(format!("affine damping needs a,b: {s:?}")))?;
                Damping::Affine {
                    a: parse_num(a)?,
                    b: parse_num(b)?,
                }
            }
            other => return Err(Error::Config(format!("unknown damping kind {other:?}"))),
        };
        d.validate()?;
        Ok(d)
    }
}

/// `Psi(x) = int_{-1}^{x} sqrt(2F(s)) ds`.
pub fn psi(p: &Potential, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid("psi argument must be finite"));
    }
    let breaks = [-1.0 - WELL_SPLIT, -1.0 + WELL_SPLIT, 1.0 - WELL_SPLIT, 1.0, 1.0 + WELL_SPLIT];
    integrate_with_breaks(|s| p.sqrt_2f(s), -1.0, x, &breaks, 0.1 * PSI_TOL)
}

/// Tabulated Psi on [`SAMPLE_RANGE`] with exact slopes, knots on the wells.
///
/// Evaluation outside the table falls back to [`psi`].
#[derive(Debug, Clone)]
pub struct PsiTable {
    potential: Potential,
    table: Hermite,
}

impl PsiTable {
    const KNOTS_PER_UNIT: usize = 2000;

    pub fn new(p: &Potential) -> Result<Self> {
        let (lo, hi) = SAMPLE_RANGE;
        let m = ((hi - lo) * Self::KNOTS_PER_UNIT as f64).round() as usize;
        let x: Vec<f64> = (0..=m)
            .map(|k| lo + k as f64 / Self::KNOTS_PER_UNIT as f64)
            .collect();
        let mut y = Vec::with_capacity(x.len());
        let mut acc = psi(p, lo)?;
        y.push(acc);
        for w in x.windows(2) {
            acc += integrate(|s| p.sqrt_2f(s), w[0], w[1], 1e-15)?;
            y.push(acc);
        }
        let d = x.iter().map(|&s| p.sqrt_2f(s)).collect();
        Ok(Self {
            potential: p.clone(),
            table: Hermite::with_slopes(x, y, d)?,
        })
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.table.domain();
        if (lo..=hi).contains(&s) {
            Ok(self.table.eval(s))
        } else {
            psi(&self.potential, s)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarConstants {
    /// Transition energy `Psi(1)`.
    pub c0: f64,
    /// `int_{-1}^{1} sqrt(F)`.
    pub sqrt_f_l1: f64,
    /// `sqrt(F)`-weighted mean of `g` over [-1, 1].
    pub g_bar: f64,
}

pub fn scalar_constants(p: &Potential, d: &Damping) -> Result<ScalarConstants> {
    let breaks = [-1.0 + WELL_SPLIT, 1.0 - WELL_SPLIT];
    let tol = 0.1 * PSI_TOL;
    let c0 = psi(p, 1.0)?;
    let root_f = |s: f64| p.f(s).max(0.0).sqrt();
    let sqrt_f_l1 = integrate_with_breaks(root_f, -1.0, 1.0, &breaks, tol)?;
    let weighted = integrate_with_breaks(|s| root_f(s) * d.g(s), -1.0, 1.0, &breaks, tol)?;
    Ok(ScalarConstants {
        c0,
        sqrt_f_l1,
        g_bar: weighted / sqrt_f_l1,
    })
}

/// Heteroclinic profile `U0` sampled on a uniform symmetric grid in `z`.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    interp: Hermite,
}

impl WaveProfile {
    pub fn z_samples(&self) -> &[f64] {
        self.interp.x()
    }

    pub fn u_samples(&self) -> &[f64] {
        self.interp.y()
    }

    pub fn z_max(&self) -> f64 {
        self.interp.domain().1
    }

    /// `U0(z)`, clamped to +-1 beyond the sampled support.
    pub fn eval(&self, z: f64) -> f64 {
        let (lo, hi) = self.interp.domain();
        if z < lo {
            -1.0
        } else if z > hi {
            1.0
        } else {
            self.interp.eval(z)
        }
    }
}

/// Solves `U0' = sqrt(2F(U0))`, `U0(0) = 0` by inverting
/// `z(u) = int_0^u ds / sqrt(2F(s))`.
///
/// A uniform table in `u` on `(-1+1e-8, 1-1e-8)` gives a monotone cubic
/// first guess; each sample is then polished by safeguarded Newton on the
/// exact quadrature. Beyond the table the linearised exponential tail is used.
pub fn standing_wave(p: &Potential, z_max: f64, n_pts: usize) -> Result<WaveProfile> {
    if !(z_max > 0.0) || n_pts < 3 || n_pts.is_multiple_of(2) {
        return Err(invalid("standing_wave needs z_max > 0 and an odd n_pts >= 3"));
    }
    let (k_minus, k_plus) = (p.fpp(-1.0), p.fpp(1.0));
    if !(k_minus > 0.0 && k_plus > 0.0) {
        return Err(invalid("F''(+-1) must be positive for a standing wave"));
    }
    let inv = |s: f64| 1.0 / p.sqrt_2f(s);

    const HALF: i64 = 2000;
    let edge = 1.0 - WAVE_CLIP;
    let ut: Vec<f64> = (-HALF..=HALF).map(|k| edge * k as f64 / HALF as f64).collect();
    let mid = HALF as usize;
    let mut zt = vec![0.0; ut.len()];
    for k in mid..ut.len() - 1 {
        zt[k + 1] = zt[k] + integrate(inv, ut[k], ut[k + 1], 1e-12)?;
    }
    for k in (1..=mid).rev() {
        zt[k - 1] = zt[k] - integrate(inv, ut[k - 1], ut[k], 1e-12)?;
    }
    let guess = Hermite::monotone(zt.clone(), ut.clone())?;
    let (z_lo, z_hi) = (zt[0], zt[zt.len() - 1]);

    let half = (n_pts / 2) as i64;
    let z: Vec<f64> = (-half..=half).map(|k| z_max * k as f64 / half as f64).collect();
    let mut u = Vec::with_capacity(n_pts);
    for &zj in &z {
        let v = if zj == 0.0 {
            0.0
        } else if zj >= z_hi {
            1.0 - WAVE_CLIP * (-(k_plus.sqrt()) * (zj - z_hi)).exp()
        } else if zj <= z_lo {
            -1.0 + WAVE_CLIP * (-(k_minus.sqrt()) * (z_lo - zj)).exp()
        } else {
            let k = zt.partition_point(|&v| v <= zj).saturating_sub(1).min(zt.len() - 2);
            polish(inv, ut[k], ut[k + 1], zt[k], zj, guess.eval(zj))?
        };
        u.push(v);
    }
    let d = u.iter().map(|&v| p.sqrt_2f(v)).collect();
    Ok(WaveProfile {
        interp: Hermite::with_slopes(z, u, d)?,
    })
}

// Root of z_a + int_{u_a}^{u} inv - target on [u_a, u_b].
fn polish<F: Fn(f64) -> f64 + Copy>(
    inv: F,
    u_a: f64,
    u_b: f64,
    z_a: f64,
    target: f64,
    start: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = (u_a, u_b);
    let mut u = start.clamp(lo, hi);
    for _ in 0..60 {
        let g = z_a + integrate(inv, u_a, u, 1e-13)? - target;
        if g == 0.0 {
            return Ok(u);
        }
        if g > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let mut next = u - g / inv(u);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - u).abs() <= 4.0 * f64::EPSILON * u.abs().max(1e-300) {
            return Ok(next);
        }
        u = next;
    }
    Ok(u)
}
