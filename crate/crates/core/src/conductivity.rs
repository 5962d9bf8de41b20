//! Catalogued analytic conductivities with exact solutions of
//! `div(σ grad u) = 0`.
//!
//! Every entry is a pure function of `(x, y)`; the two separable entries also
//! expose their factorization `σ = σ1(x)·σ2(y)`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Slack allowed on `x² + y² ≤ 1` so that boundary nodes computed from
/// `(cos θ, sin θ)` are accepted.
pub const DISK_TOLERANCE: f64 = 1e-12;

pub(crate) fn in_closed_disk(x: f64, y: f64) -> bool {
    x * x + y * y <= 1.0 + DISK_TOLERANCE
}

/// A scalar conductivity field on the plane.
pub trait ConductivityField: Sync {
    fn sigma(&self, x: f64, y: f64) -> f64;
}

impl<F> ConductivityField for F
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    fn sigma(&self, x: f64, y: f64) -> f64 {
        self(x, y)
    }
}

/// A conductivity that factors as `σ1(x)·σ2(y)`, possibly only piecewise.
pub trait SeparableField: Sync {
    /// Returns `(σ1(x), σ2(y))` for the factorization valid at `(x, y)`.
    fn factors(&self, x: f64, y: f64) -> Result<(f64, f64)>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConductivityId {
    /// `σ = e^{x+y}`, `u = e^{-x-y}`.
    Exponential,
    /// `σ = 1/((x²+0.1)(y²+0.1))`, `u = (x³+y³)/3 + 0.1(x+y)`.
    Lorentzian,
    /// `σ = e^{xy}`, `u = e^{-xy}`.
    ExponentialXy,
    /// `σ = 1/((x+y)²+1)`, `u = (x+y)³/3 + x + y`.
    LorentzianXy,
    /// `σ = x+y+10`, `u = ln(x+y+10)`.
    Polynomial,
    /// `σ = 1 + sin(xy)`, `u = 1/(tan(xy/2)+1)`.
    Sinusoidal,
    /// `σ ≡ 1`, `u = eˣ cos y`. Test-only; not part of [`catalog`].
    #[doc(hidden)]
    Unit,
}

/// One catalogued conductivity together with an exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyticConductivity {
    id: ConductivityId,
}

/// Factor pair of a separable catalog entry.
#[derive(Debug, Clone, Copy)]
pub struct SeparableFactors {
    id: ConductivityId,
}

impl SeparableFactors {
    pub fn sigma1(&self, x: f64) -> f64 {
        match self.id {
            ConductivityId::Exponential => x.exp(),
            ConductivityId::Lorentzian => 1.0 / (x * x + 0.1),
            _ => 1.0,
        }
    }

    pub fn sigma2(&self, y: f64) -> f64 {
        match self.id {
            ConductivityId::Exponential => y.exp(),
            ConductivityId::Lorentzian => 1.0 / (y * y + 0.1),
            _ => 1.0,
        }
    }
}

impl SeparableField for SeparableFactors {
    fn factors(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        if !in_closed_disk(x, y) {
            return Err(Error::OutsideDisk { x, y });
        }
        Ok((self.sigma1(x), self.sigma2(y)))
    }
}

impl AnalyticConductivity {
    pub const fn new(id: ConductivityId) -> Self {
        Self { id }
    }

    /// Constant unit conductivity, used for sanity checks where formal powers
    /// reduce to `zⁿ`.
    #[doc(hidden)]
    pub const fn unit() -> Self {
        Self::new(ConductivityId::Unit)
    }

    pub fn id(&self) -> ConductivityId {
        self.id
    }

    pub fn sigma(&self, x: f64, y: f64) -> f64 {
        use ConductivityId::*;
        match self.id {
            Exponential => (x + y).exp(),
            Lorentzian => 1.0 / ((x * x + 0.1) * (y * y + 0.1)),
            ExponentialXy => (x * y).exp(),
            LorentzianXy => 1.0 / ((x + y).powi(2) + 1.0),
            Polynomial => x + y + 10.0,
            Sinusoidal => 1.0 + (x * y).sin(),
            Unit => 1.0,
        }
    }

    /// Exact solution at `(x, y)`; points outside the closed unit disk are
    /// rejected.
    pub fn exact_u(&self, x: f64, y: f64) -> Result<f64> {
        use ConductivityId::*;
        if !in_closed_disk(x, y) {
            return Err(Error::OutsideDisk { x, y });
        }
        Ok(match self.id {
            Exponential => (-x - y).exp(),
            Lorentzian => (x.powi(3) + y.powi(3)) / 3.0 + 0.1 * (x + y),
            ExponentialXy => (-x * y).exp(),
            LorentzianXy => {
                let s = x + y;
                s.powi(3) / 3.0 + s
            }
            Polynomial => (x + y + 10.0).ln(),
            // |xy/2| ≤ 1/4 on the disk, far from the poles of tan.
            Sinusoidal => 1.0 / ((x * y / 2.0).tan() + 1.0),
            Unit => x.exp() * y.cos(),
        })
    }

    pub fn separable_factors(&self) -> Option<SeparableFactors> {
        match self.id {
            ConductivityId::Exponential | ConductivityId::Lorentzian | ConductivityId::Unit => {
                Some(SeparableFactors { id: self.id })
            }
            _ => None,
        }
    }

    /// Dirichlet data `u(cos θ, sin θ)`.
    pub fn boundary_condition(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        // (cos θ, sin θ) is always within DISK_TOLERANCE of the circle.
        self.exact_u(c, s)
            .expect("boundary point lies on the unit circle")
    }
}

impl ConductivityField for AnalyticConductivity {
    fn sigma(&self, x: f64, y: f64) -> f64 {
        AnalyticConductivity::sigma(self, x, y)
    }
}

/// The six catalogued conductivities, in the order they are studied.
pub fn catalog() -> Vec<AnalyticConductivity> {
    use ConductivityId::*;
    [
        Exponential,
        Lorentzian,
        ExponentialXy,
        LorentzianXy,
        Polynomial,
        Sinusoidal,
    ]
    .into_iter()
    .map(AnalyticConductivity::new)
    .collect()
}

/// Result of scanning a conductivity over a disk grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityReport {
    pub min_sigma: f64,
    pub location: (f64, f64),
    /// `false` when the minimum is not strictly positive.
    pub positive: bool,
}

/// Scans a `resolution × resolution` lattice over `[-1, 1]²`, restricted to the
/// closed unit disk, for the minimum of `σ`.
pub fn validate_positivity(
    field: &dyn ConductivityField,
    resolution: usize,
) -> Result<PositivityReport> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let step = 2.0 / (resolution - 1) as f64;
    let mut min_sigma = f64::INFINITY;
    let mut location = (0.0, 0.0);
    for i in 0..resolution {
        let x = -1.0 + i as f64 * step;
        for j in 0..resolution {
            let y = -1.0 + j as f64 * step;
            if x * x + y * y > 1.0 {
                continue;
            }
            let s = field.sigma(x, y);
            // NaN counts as non-positive.
            if s < min_sigma || s.is_nan() {
                min_sigma = s;
                location = (x, y);
            }
        }
    }
    Ok(PositivityReport {
        min_sigma,
        location,
        positive: min_sigma > 0.0,
    })
}
