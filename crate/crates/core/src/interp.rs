//! Piecewise cubic Hermite interpolation on increasing abscissae.

use crate::error::{invalid, Result};

/// Cubic Hermite interpolant. Built either with Fritsch-Carlson monotone
/// slopes ([`Hermite::monotone`]) or with caller-supplied exact slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermite {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

fn check_abscissae(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() < 2 || x.len() != y.len() {
        return Err(invalid("interpolation needs at least two matching samples"));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("interpolation abscissae must be strictly increasing"));
    }
    Ok(())
}

impl Hermite {
    /// Shape-preserving interpolant: no overshoot between monotone samples.
    pub fn monotone(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_abscissae(&x, &y)?;
        let m = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..m - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; m];
        if m == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..m - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[m - 1] = end_slope(h[m - 2], h[m - 3], delta[m - 2], delta[m - 3]);
        }
        Ok(Self { x, y, d })
    }

    pub fn with_slopes(x: Vec<f64>, y: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        check_abscissae(&x, &y)?;
        if d.len() != x.len() {
            return Err(invalid("slope count must match sample count"));
        }
        Ok(Self { x, y, d })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn slopes(&self) -> &[f64] {
        &self.d
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Evaluates the interpolant; outside the domain the end value is held.
    pub fn eval(&self, xq: f64) -> f64 {
        let m = self.x.len();
        if xq <= self.x[0] {
            return self.y[0];
        }
        if xq >= self.x[m - 1] {
            return self.y[m - 1];
        }
        let i = self.x.partition_point(|&v| v <= xq) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (xq - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

// Three-point end slope, limited so the end interval stays monotone.
fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data() {
        let x: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let p = Hermite::monotone(x, y).unwrap();
        for k in 0..50 {
            let q = k as f64 / 49.0;
            assert!((p.eval(q) - (3.0 * q - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn step_data_has_no_overshoot() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|&v| if v < 10.0 { -1.0 } else { 1.0 }).collect();
        let p = Hermite::monotone(x, y).unwrap();
        for k in 0..1000 {
            let v = p.eval(k as f64 * 0.019);
            assert!((-1.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn exact_slopes_give_fourth_order() {
        let err = |m: usize| {
            let x: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
            let y = x.iter().map(|v| v.sin()).collect();
            let d = x.iter().map(|v| v.cos()).collect();
            let p = Hermite::with_slopes(x, y, d).unwrap();
            (0..997)
                .map(|k| {
                    let q = k as f64 / 996.0;
                    (p.eval(q) - q.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(10) / err(20);
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_unsorted_abscissae() {
        assert!(Hermite::monotone(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }
}
