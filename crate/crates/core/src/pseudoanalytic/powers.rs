//! Formal powers `Z^(n)(a, 0; z)` on the ray lattice.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::integral::fg_integral_into;
use super::lattice::RayLattice;
use super::pair::GeneratingPairField;
use crate::error::{Error, Result};

/// The two real basis coefficients of a formal power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Coefficient {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "i")]
    I,
}

impl Coefficient {
    pub fn value(self) -> Complex64 {
        match self {
            Coefficient::One => Complex64::new(1.0, 0.0),
            Coefficient::I => Complex64::new(0.0, 1.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Coefficient::One => "1",
            Coefficient::I => "i",
        }
    }
}

/// How much of each formal-power field to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Retain {
    /// Every lattice node (`R·P` values per power).
    Full,
    /// Only the boundary nodes (`R` values per power).
    Boundary,
}

/// `Z^(n)(1)` and `Z^(n)(i)` for `n = 0..=N`, belonging to the target pair.
#[derive(Debug, Clone)]
pub struct FormalPowerSet {
    n_max: usize,
    lattice: RayLattice,
    boundary: [Vec<Vec<Complex64>>; 2],
    fields: Option<[Vec<Vec<Complex64>>; 2]>,
}

fn slot(c: Coefficient) -> usize {
    match c {
        Coefficient::One => 0,
        Coefficient::I => 1,
    }
}

impl FormalPowerSet {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn lattice(&self) -> &RayLattice {
        &self.lattice
    }

    /// Values at the `R` boundary nodes, indexed by ray.
    pub fn boundary(&self, n: usize, coeff: Coefficient) -> &[Complex64] {
        &self.boundary[slot(coeff)][n]
    }

    /// Full lattice field (ray-major), when retained.
    pub fn field(&self, n: usize, coeff: Coefficient) -> Option<&[Complex64]> {
        self.fields.as_ref().map(|f| f[slot(coeff)][n].as_slice())
    }

    pub fn at(&self, n: usize, coeff: Coefficient, ray: usize, node: usize) -> Option<Complex64> {
        if node + 1 == self.lattice.nodes_per_ray() {
            return Some(self.boundary(n, coeff)[ray]);
        }
        self.field(n, coeff)
            .map(|f| f[self.lattice.index(ray, node)])
    }

    /// `Z^(n)(a) = a′ Z^(n)(1) + a″ Z^(n)(i)` on the boundary.
    pub fn combine_boundary(&self, n: usize, a: Complex64) -> Vec<Complex64> {
        self.boundary(n, Coefficient::One)
            .iter()
            .zip(self.boundary(n, Coefficient::I))
            .map(|(one, i)| a.re * one + a.im * i)
            .collect()
    }

    /// Writes boundary values as CSV with columns `theta,n,coeff,re,im`.
    pub fn write_boundary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let to_err = |e: csv::Error| Error::Malformed(e.to_string());
        w.write_record(["theta", "n", "coeff", "re", "im"])
            .map_err(to_err)?;
        for n in 0..=self.n_max {
            for coeff in [Coefficient::One, Coefficient::I] {
                for (ray, v) in self.boundary(n, coeff).iter().enumerate() {
                    w.write_record([
                        self.lattice.theta(ray).to_string(),
                        n.to_string(),
                        coeff.label().to_string(),
                        v.re.to_string(),
                        v.im.to_string(),
                    ])
                    .map_err(to_err)?;
                }
            }
        }
        w.flush().map_err(|e| Error::Malformed(e.to_string()))?;
        Ok(())
    }
}

fn check_pairs(
    target: &GeneratingPairField,
    other: &GeneratingPairField,
    lattice: &RayLattice,
) -> Result<()> {
    if target.lattice() != lattice || other.lattice() != lattice {
        return Err(Error::InvalidParameter(
            "generating pairs must be sampled on the same lattice".into(),
        ));
    }
    if target.parity() == other.parity() {
        return Err(Error::InvalidParameter(
            "the two pairs must have opposite parity".into(),
        ));
    }
    for pair in [target, other] {
        let c = pair.center();
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::NonPositive {
                what: "p(z0)",
                value: c,
                x: 0.0,
                y: 0.0,
            });
        }
    }
    Ok(())
}

/// Runs the recursion `Z^(k) = k ∫ Z^(k−1) d_(F,G) z` along one ray, where
/// level `k` integrates with respect to `pairs[(start + k) % 2]`. Returns the
/// level-by-level values on that ray.
fn chain_on_ray(
    pairs: [&[f64]; 2],
    centers: [f64; 2],
    start: usize,
    a: Complex64,
    n_max: usize,
    dz: Complex64,
) -> Result<Vec<Vec<Complex64>>> {
    let p0 = pairs[start];
    let c = centers[start];
    // Real λ, μ with λ F(z0) + μ G(z0) = a.
    let lambda = a.re / c;
    let mu = a.im * c;
    let mut levels = Vec::with_capacity(n_max + 1);
    levels.push(
        p0.iter()
            .map(|&p| Complex64::new(lambda * p, mu / p))
            .collect::<Vec<_>>(),
    );
    for k in 1..=n_max {
        let pk = pairs[(start + k) % 2];
        let mut next = Vec::with_capacity(p0.len());
        fg_integral_into(&levels[k - 1], pk, dz, k as f64, &mut next)?;
        levels.push(next);
    }
    Ok(levels)
}

/// Per-ray values of `Z_target^(n)(a)` for `n = 0..=N`.
fn powers_on_ray(
    target: &GeneratingPairField,
    other: &GeneratingPairField,
    ray: usize,
    a: Complex64,
    n_max: usize,
) -> Result<Vec<Vec<Complex64>>> {
    let lattice = target.lattice();
    let dz = lattice.dz(ray);
    let pairs = [target.ray(ray), other.ray(ray)];
    let centers = [target.center(), other.center()];
    // Chain 0 starts on the target pair and lands on it at even n; chain 1
    // starts on the other pair and lands on the target at odd n.
    let even = chain_on_ray(pairs, centers, 0, a, n_max, dz)?;
    let odd = if n_max >= 1 {
        chain_on_ray(pairs, centers, 1, a, n_max, dz)?
    } else {
        Vec::new()
    };
    Ok(even
        .into_iter()
        .zip(odd.into_iter().map(Some).chain(std::iter::repeat(None)))
        .enumerate()
        .map(|(n, (e, o))| {
            if n % 2 == 0 {
                e
            } else {
                o.expect("odd chain computed")
            }
        })
        .collect())
}

/// Formal powers with coefficients `1` and `i` belonging to `target`, with
/// `other` the opposite-parity pair of the same period-2 sequence.
///
/// `Z^(0)(1) = F/p(z0)` and `Z^(0)(i) = p(z0)·G`; higher powers follow the
/// recursion with pair parities alternating so that level `n` belongs to
/// `target`. Rays are processed in parallel.
pub fn formal_powers(
    target: &GeneratingPairField,
    other: &GeneratingPairField,
    lattice: &RayLattice,
    n_max: usize,
    retain: Retain,
) -> Result<FormalPowerSet> {
    check_pairs(target, other, lattice)?;
    let rays = lattice.rays();
    let per_ray: Vec<[Vec<Vec<Complex64>>; 2]> = (0..rays)
        .into_par_iter()
        .map(|ray| {
            let keep = |levels: Vec<Vec<Complex64>>| match retain {
                Retain::Full => levels,
                Retain::Boundary => levels
                    .into_iter()
                    .map(|l| vec![*l.last().expect("ray has nodes")])
                    .collect(),
            };
            Ok([
                keep(powers_on_ray(
                    target,
                    other,
                    ray,
                    Coefficient::One.value(),
                    n_max,
                )?),
                keep(powers_on_ray(
                    target,
                    other,
                    ray,
                    Coefficient::I.value(),
                    n_max,
                )?),
            ])
        })
        .collect::<Result<_>>()?;

    let boundary = [0, 1].map(|c| {
        (0..=n_max)
            .map(|n| {
                per_ray
                    .iter()
                    .map(|r| *r[c][n].last().expect("ray has nodes"))
                    .collect()
            })
            .collect()
    });
    let fields = match retain {
        Retain::Boundary => None,
        Retain::Full => Some([0, 1].map(|c| {
            (0..=n_max)
                .map(|n| {
                    per_ray
                        .iter()
                        .flat_map(|r| r[c][n].iter().copied())
                        .collect()
                })
                .collect()
        })),
    };
    Ok(FormalPowerSet {
        n_max,
        lattice: *lattice,
        boundary,
        fields,
    })
}

/// Full lattice fields of `Z_target^(n)(a)` for a general complex coefficient,
/// computed directly through the recursion.
pub fn formal_powers_with_coefficient(
    target: &GeneratingPairField,
    other: &GeneratingPairField,
    lattice: &RayLattice,
    n_max: usize,
    a: Complex64,
) -> Result<Vec<Vec<Complex64>>> {
    check_pairs(target, other, lattice)?;
    let per_ray: Vec<Vec<Vec<Complex64>>> = (0..lattice.rays())
        .into_par_iter()
        .map(|ray| powers_on_ray(target, other, ray, a, n_max))
        .collect::<Result<_>>()?;
    Ok((0..=n_max)
        .map(|n| per_ray.iter().flat_map(|r| r[n].iter().copied()).collect())
        .collect())
}
