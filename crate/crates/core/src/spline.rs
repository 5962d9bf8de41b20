//! Cubic splines: natural end conditions on an interval, and periodic on a
//! uniform circle grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Natural cubic spline (`s'' = 0` at both ends) through strictly increasing
/// knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalCubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second_derivatives: Vec<f64>,
}

impl NaturalCubicSpline {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: knots.len(),
                right: values.len(),
            });
        }
        if knots.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: knots.len(),
            });
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::Malformed("non-finite spline data".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Malformed(
                "spline knots must be strictly increasing".into(),
            ));
        }
        let second_derivatives = natural_second_derivatives(&knots, &values);
        Ok(Self {
            knots,
            values,
            second_derivatives,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn second_derivatives(&self) -> &[f64] {
        &self.second_derivatives
    }

    /// Rebuilds a spline from serialized parts after checking their
    /// consistency.
    pub(crate) fn validated(self) -> Result<Self> {
        let rebuilt = Self::new(self.knots, self.values)?;
        if rebuilt.second_derivatives.len() != self.second_derivatives.len() {
            return Err(Error::Malformed("second-derivative count mismatch".into()));
        }
        Ok(rebuilt)
    }

    /// Evaluates the spline. Outside the knot range the end cubic is
    /// extended.
    pub fn evaluate(&self, x: f64) -> f64 {
        let n = self.knots.len();
        let i = self
            .knots
            .partition_point(|&k| k <= x)
            .saturating_sub(1)
            .min(n - 2);
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        let (m0, m1) = (self.second_derivatives[i], self.second_derivatives[i + 1]);
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
    }
}

fn natural_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior equations.
    let k = n - 2;
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for j in 0..k {
        let i = j + 1;
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[j] = 2.0 * (h0 + h1);
        upper[j] = h1;
        rhs[j] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for j in 1..k {
        let lower = x[j + 1] - x[j];
        let w = lower / diag[j - 1];
        diag[j] -= w * upper[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for j in (0..k - 1).rev() {
        m[j + 1] = (rhs[j] - upper[j] * m[j + 2]) / diag[j];
    }
    m
}

/// Periodic cubic spline through `R` samples at `θ_r = 2πr/R`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpline {
    values: Vec<f64>,
    second_derivatives: Vec<f64>,
    step: f64,
}

impl PeriodicSpline {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 3 {
            return Err(Error::TooFewSamples { needed: 3, got: n });
        }
        let step = std::f64::consts::TAU / n as f64;
        let rhs: Vec<f64> = (0..n)
            .map(|i| {
                let prev = values[(i + n - 1) % n];
                let next = values[(i + 1) % n];
                6.0 * (next - 2.0 * values[i] + prev) / (step * step)
            })
            .collect();
        let second_derivatives = solve_cyclic_141(&rhs);
        Ok(Self {
            values,
            second_derivatives,
            step,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.values
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        let n = self.values.len();
        let t = theta.rem_euclid(std::f64::consts::TAU) / self.step;
        let i = (t.floor() as usize).min(n - 1);
        let b = t - i as f64;
        let a = 1.0 - b;
        let j = (i + 1) % n;
        let h = self.step;
        a * self.values[i]
            + b * self.values[j]
            + ((a * a * a - a) * self.second_derivatives[i]
                + (b * b * b - b) * self.second_derivatives[j])
                * h
                * h
                / 6.0
    }
}

/// Solves the circulant system `m[i-1] + 4 m[i] + m[i+1] = r[i]` (indices mod
/// n) by Sherman-Morrison on top of a tridiagonal solve.
fn solve_cyclic_141(r: &[f64]) -> Vec<f64> {
    let n = r.len();
    let (alpha, beta) = (1.0, 1.0); // corner entries
    let gamma = -4.0;
    let mut diag = vec![4.0; n];
    diag[0] -= gamma;
    diag[n - 1] -= alpha * beta / gamma;

    let x = solve_tridiagonal_unit_offdiag(&diag, r);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal_unit_offdiag(&diag, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn solve_tridiagonal_unit_offdiag(diag: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = 1.0 / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - c[i - 1];
        c[i] = 1.0 / denom;
        d[i] = (rhs[i] - d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
