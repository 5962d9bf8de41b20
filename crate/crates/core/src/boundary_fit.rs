//! Boundary traces of formal powers, their orthonormalization on the unit
//! circle, and the collocation fit of a Dirichlet condition.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pseudoanalytic::{Coefficient, FormalPowerSet};
use crate::spline::PeriodicSpline;

/// Segments used for the trapezoidal error integral over `[0, 2π)`.
pub const ERROR_SEGMENTS: usize = 1000;

/// Relative residual norm below which a trace is dropped during
/// orthonormalization.
pub const DROP_THRESHOLD: f64 = 1e-10;

/// Collocation systems with a condition estimate above this are solved by
/// least squares and flagged.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Real samples of a function on the unit circle at `θ_r = 2πr/R`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace(Vec<f64>);

impl BoundaryTrace {
    pub fn new(samples: Vec<f64>) -> Self {
        Self(samples)
    }

    pub fn from_fn(samples: usize, f: impl Fn(f64) -> f64) -> Self {
        Self(
            (0..samples)
                .map(|r| f(TAU * r as f64 / samples as f64))
                .collect(),
        )
    }

    pub fn samples(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Which formal power produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceLabel {
    pub n: usize,
    pub coeff: Coefficient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTrace {
    pub label: TraceLabel,
    pub trace: BoundaryTrace,
}

/// Real parts of the boundary values, ordered `Re Z^(n)(1)` for `n = 0..=N`
/// and then `Re Z^(n)(i)` for `n = 1..=N`. `Re Z^(0)(i) ≡ 0` is left out.
pub fn boundary_traces(powers: &FormalPowerSet) -> Vec<LabeledTrace> {
    let n_max = powers.n_max();
    let one = (0..=n_max).map(|n| (n, Coefficient::One));
    let imag = (1..=n_max).map(|n| (n, Coefficient::I));
    one.chain(imag)
        .map(|(n, coeff)| LabeledTrace {
            label: TraceLabel { n, coeff },
            trace: BoundaryTrace(powers.boundary(n, coeff).iter().map(|z| z.re).collect()),
        })
        .collect()
}

/// Trapezoidal `∫₀^{2π} f g dθ` on the periodic sample grid.
pub fn inner_product(f: &BoundaryTrace, g: &BoundaryTrace) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    if f.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    Ok(dot(&f.0, &g.0) * TAU / f.len() as f64)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal traces `u_k` with their provenance.
#[derive(Debug, Clone)]
pub struct OrthonormalSystem {
    members: Vec<BoundaryTrace>,
    labels: Vec<TraceLabel>,
    /// Row `k` holds the weights of `u_k` over the input traces.
    transform: Vec<Vec<f64>>,
    dropped: Vec<usize>,
    splines: Vec<PeriodicSpline>,
}

/// Modified Gram-Schmidt (with one reorthogonalization pass) under
/// [`inner_product`], preserving input order.
///
/// A trace whose residual norm falls below `DROP_THRESHOLD ×` the largest
/// input norm is dropped; more than one drop is reported as ill-conditioning.
pub fn orthonormalize(traces: &[LabeledTrace]) -> Result<OrthonormalSystem> {
    let Some(first) = traces.first() else {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    };
    let samples = first.trace.len();
    if samples < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: samples,
        });
    }
    let weight = TAU / samples as f64;
    let ip = |a: &[f64], b: &[f64]| dot(a, b) * weight;

    let mut largest = 0.0f64;
    for t in traces {
        if t.trace.len() != samples {
            return Err(Error::LengthMismatch {
                left: t.trace.len(),
                right: samples,
            });
        }
        largest = largest.max(ip(&t.trace.0, &t.trace.0).sqrt());
    }

    let count = traces.len();
    let mut members: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut transform: Vec<Vec<f64>> = Vec::new();
    let mut dropped = Vec::new();
    for (idx, t) in traces.iter().enumerate() {
        let mut v = t.trace.0.clone();
        let mut weights = vec![0.0; count];
        weights[idx] = 1.0;
        for _pass in 0..2 {
            for (u, row) in members.iter().zip(&transform) {
                let c = ip(&v, u);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= c * ui;
                }
                for (w, r) in weights.iter_mut().zip(row) {
                    *w -= c * r;
                }
            }
        }
        let norm = ip(&v, &v).sqrt();
        if !(norm > DROP_THRESHOLD * largest) {
            dropped.push(idx);
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        weights.iter_mut().for_each(|x| *x /= norm);
        members.push(v);
        labels.push(t.label);
        transform.push(weights);
    }
    if dropped.len() > 1 {
        return Err(Error::IllConditioned { dropped });
    }
    let splines = members
        .iter()
        .map(|m| PeriodicSpline::new(m.clone()))
        .collect::<Result<_>>()?;
    Ok(OrthonormalSystem {
        members: members.into_iter().map(BoundaryTrace).collect(),
        labels,
        transform,
        dropped,
        splines,
    })
}

impl OrthonormalSystem {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[BoundaryTrace] {
        &self.members
    }

    pub fn labels(&self) -> &[TraceLabel] {
        &self.labels
    }

    /// Input indices rejected by the drop threshold.
    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    pub fn transform(&self) -> &[Vec<f64>] {
        &self.transform
    }

    /// Gram matrix of the members under [`inner_product`].
    pub fn gram(&self) -> Vec<Vec<f64>> {
        self.members
            .iter()
            .map(|a| {
                self.members
                    .iter()
                    .map(|b| inner_product(a, b).expect("members share a grid"))
                    .collect()
            })
            .collect()
    }

    /// Member `k` re-expressed as labeled traces, e.g. to re-orthonormalize.
    pub fn as_labeled(&self) -> Vec<LabeledTrace> {
        self.members
            .iter()
            .zip(&self.labels)
            .map(|(m, l)| LabeledTrace {
                label: *l,
                trace: m.clone(),
            })
            .collect()
    }

    /// Periodic cubic-spline interpolation of member `k` at `theta`.
    pub fn evaluate_trace(&self, k: usize, theta: f64) -> f64 {
        self.splines[k].evaluate(theta)
    }

    /// `Σ α_k u_k(θ)`.
    pub fn reconstruct(&self, alpha: &[f64], theta: f64) -> f64 {
        alpha
            .iter()
            .enumerate()
            .map(|(k, a)| a * self.evaluate_trace(k, theta))
            .sum()
    }

    /// Extends the fitted combination into the disk by applying `α` and the
    /// Gram-Schmidt weights to the real parts of the interior formal powers.
    /// Needs powers computed with [`crate::pseudoanalytic::Retain::Full`] and
    /// the same trace ordering as [`boundary_traces`].
    pub fn interior_value(
        &self,
        alpha: &[f64],
        powers: &FormalPowerSet,
        ray: usize,
        node: usize,
    ) -> Option<f64> {
        let n_max = powers.n_max();
        let raw_label = |j: usize| {
            if j <= n_max {
                (j, Coefficient::One)
            } else {
                (j - n_max, Coefficient::I)
            }
        };
        let mut total = 0.0;
        for (a, row) in alpha.iter().zip(&self.transform) {
            for (j, w) in row.iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                let (n, c) = raw_label(j);
                total += a * w * powers.at(n, c, ray, node)?.re;
            }
        }
        Some(total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    /// Square system at `2N+1` equispaced angles.
    #[default]
    Collocation,
    /// Least squares over every sample angle.
    LeastSquares,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub alpha: Vec<f64>,
    pub error: f64,
    /// `Σ α_k u_k(θ_j) − u(θ_j)` at the fitting nodes.
    pub residuals: Vec<f64>,
    pub condition_estimate: f64,
    /// Set when the system was singular or its condition estimate exceeded
    /// [`CONDITION_LIMIT`]; `alpha` then comes from least squares.
    pub ill_conditioned: bool,
    pub mode: FitMode,
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn least_squares(m: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    m.clone()
        .svd(true, true)
        .solve(b, 1e-14)
        .map_err(|_| Error::Singular)
}

/// Fits `Σ α_k u_k ≈ condition` on the circle.
///
/// In collocation mode the `(2N+1)×(2N+1)` system `u_k(θ_j) α = u(θ_j)` with
/// `θ_j = 2πj/(2N+1)` is solved by LU with partial pivoting; the member
/// values come from [`OrthonormalSystem::evaluate_trace`] and the condition is
/// evaluated exactly.
pub fn collocation_fit(
    system: &OrthonormalSystem,
    condition: &dyn Fn(f64) -> f64,
    mode: FitMode,
) -> Result<FitResult> {
    let k = system.len();
    if k == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let (matrix, rhs) = match mode {
        FitMode::Collocation => {
            let nodes: Vec<f64> = (0..k).map(|j| TAU * j as f64 / k as f64).collect();
            let m = DMatrix::from_fn(k, k, |j, c| system.evaluate_trace(c, nodes[j]));
            let b = DVector::from_iterator(k, nodes.iter().map(|&t| condition(t)));
            (m, b)
        }
        FitMode::LeastSquares => {
            let r = system.members()[0].len();
            let m = DMatrix::from_fn(r, k, |j, c| system.members()[c].samples()[j]);
            let b = DVector::from_fn(r, |j, _| condition(TAU * j as f64 / r as f64));
            (m, b)
        }
    };
    let condition_estimate = condition_number(&matrix);
    let mut ill_conditioned = !(condition_estimate <= CONDITION_LIMIT);
    let alpha = match mode {
        FitMode::Collocation if !ill_conditioned => match matrix.clone().lu().solve(&rhs) {
            Some(a) => a,
            None => {
                ill_conditioned = true;
                least_squares(&matrix, &rhs)?
            }
        },
        _ => least_squares(&matrix, &rhs)?,
    };
    let residuals = (&matrix * &alpha - &rhs).iter().copied().collect();
    let alpha: Vec<f64> = alpha.iter().copied().collect();
    let error = absolute_error(system, &alpha, condition)?;
    Ok(FitResult {
        alpha,
        error,
        residuals,
        condition_estimate,
        ill_conditioned,
        mode,
    })
}

/// `E = ( ∫₀^{2π} (Σ α_k u_k − u)² dθ )^{1/2}` by the trapezoidal rule over
/// [`ERROR_SEGMENTS`] equal segments.
pub fn absolute_error(
    system: &OrthonormalSystem,
    alpha: &[f64],
    condition: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    if alpha.len() != system.len() {
        return Err(Error::LengthMismatch {
            left: alpha.len(),
            right: system.len(),
        });
    }
    let h = TAU / ERROR_SEGMENTS as f64;
    // Periodic integrand: the trapezoid reduces to a plain sum.
    let sum: f64 = (0..ERROR_SEGMENTS)
        .map(|i| {
            let t = h * i as f64;
            let d = system.reconstruct(alpha, t) - condition(t);
            d * d
        })
        .sum();
    Ok((sum * h).sqrt())
}
