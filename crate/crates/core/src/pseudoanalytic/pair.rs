//! Generating pairs `(F, G) = (p, i/p)` of the period-2 sequence attached to a
//! separable conductivity, and the differential operators built on them.
//!
//! Complex derivatives follow the unhalved convention
//! `∂_z = ∂_x − i∂_y`, `∂_z̄ = ∂_x + i∂_y` throughout.

use num_complex::Complex64;
use rayon::prelude::*;

use super::lattice::RayLattice;
use crate::conductivity::{ConductivityField, SeparableField};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Position in the period-2 generating sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// `p = √σ2(y) / √σ1(x)`.
    Even,
    /// `p = √(σ1(x) σ2(y))`.
    Odd,
}

impl Parity {
    pub fn from_index(m: usize) -> Self {
        if m.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn index(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Pointwise evaluator of the real profile `p` of one pair in the sequence.
#[derive(Clone, Copy)]
pub struct PairProfile<'a> {
    factors: &'a dyn SeparableField,
    parity: Parity,
}

impl<'a> PairProfile<'a> {
    pub fn new(factors: &'a dyn SeparableField, parity: Parity) -> Self {
        Self { factors, parity }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn p(&self, x: f64, y: f64) -> Result<f64> {
        let (s1, s2) = self.factors.factors(x, y)?;
        if !(s1 > 0.0) {
            return Err(Error::NonPositive {
                what: "sigma1",
                value: s1,
                x,
                y,
            });
        }
        if !(s2 > 0.0) {
            return Err(Error::NonPositive {
                what: "sigma2",
                value: s2,
                x,
                y,
            });
        }
        Ok(match self.parity {
            Parity::Even => s2.sqrt() / s1.sqrt(),
            Parity::Odd => s1.sqrt() * s2.sqrt(),
        })
    }

    pub fn f(&self, x: f64, y: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.p(x, y)?, 0.0))
    }

    pub fn g(&self, x: f64, y: f64) -> Result<Complex64> {
        Ok(I / self.p(x, y)?)
    }
}

/// A generating pair sampled on a [`RayLattice`]: `F = p`, `G = i/p`.
#[derive(Debug, Clone)]
pub struct GeneratingPairField {
    parity: Parity,
    lattice: RayLattice,
    p: Vec<f64>,
}

impl GeneratingPairField {
    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn lattice(&self) -> &RayLattice {
        &self.lattice
    }

    /// Profile values, ray-major.
    pub fn profile(&self) -> &[f64] {
        &self.p
    }

    pub fn ray(&self, ray: usize) -> &[f64] {
        let n = self.lattice.nodes_per_ray();
        &self.p[ray * n..(ray + 1) * n]
    }

    pub fn f(&self, ray: usize, node: usize) -> Complex64 {
        Complex64::new(self.p[self.lattice.index(ray, node)], 0.0)
    }

    pub fn g(&self, ray: usize, node: usize) -> Complex64 {
        I / self.p[self.lattice.index(ray, node)]
    }

    /// `p(z0)` at the lattice center.
    pub fn center(&self) -> f64 {
        self.p[0]
    }
}

/// Samples the pair of the given parity at every lattice node.
pub fn build_pair(
    factors: &dyn SeparableField,
    parity: Parity,
    lattice: &RayLattice,
) -> Result<GeneratingPairField> {
    let profile = PairProfile::new(factors, parity);
    let n = lattice.nodes_per_ray();
    let mut p = vec![0.0; lattice.len()];
    p.par_chunks_mut(n)
        .enumerate()
        .try_for_each(|(ray, chunk)| {
            for (k, slot) in chunk.iter_mut().enumerate() {
                let z = lattice.node(ray, k);
                *slot = profile.p(z.re, z.im)?;
            }
            Ok::<(), Error>(())
        })?;
    Ok(GeneratingPairField {
        parity,
        lattice: *lattice,
        p,
    })
}

/// The pair of functions `(∂_z f, ∂_z̄ f)` by central differences.
pub fn wirtinger<E>(
    f: impl Fn(f64, f64) -> Result<Complex64, E>,
    x: f64,
    y: f64,
    h: f64,
) -> Result<(Complex64, Complex64), E> {
    let dx = (f(x + h, y)? - f(x - h, y)?) / (2.0 * h);
    let dy = (f(x, y + h)? - f(x, y - h)?) / (2.0 * h);
    Ok((dx - I * dy, dx + I * dy))
}

fn check_stencil(x: f64, y: f64, h: f64) -> Result<()> {
    if !(h > 0.0) || (x * x + y * y).sqrt() + h > 1.0 {
        return Err(Error::StencilOutsideDisk { x, y, h });
    }
    Ok(())
}

/// Characteristic coefficients `(A, a, B, b)` of a generating pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicCoefficients {
    pub a_upper: Complex64,
    pub a_lower: Complex64,
    pub b_upper: Complex64,
    pub b_lower: Complex64,
}

/// Evaluates the characteristic coefficients of an arbitrary pair `(F, G)`
/// from the general formulas, using central differences of step `h`.
pub fn characteristic_coefficients_of(
    f: impl Fn(f64, f64) -> Result<Complex64>,
    g: impl Fn(f64, f64) -> Result<Complex64>,
    x: f64,
    y: f64,
    h: f64,
) -> Result<CharacteristicCoefficients> {
    check_stencil(x, y, h)?;
    let (fv, gv) = (f(x, y)?, g(x, y)?);
    let (fz, fzb) = wirtinger(&f, x, y, h)?;
    let (gz, gzb) = wirtinger(&g, x, y, h)?;
    let denom = fv * gv.conj() - gv * fv.conj();
    Ok(CharacteristicCoefficients {
        a_upper: (fv.conj() * gz - gv.conj() * fz) / denom,
        a_lower: -(fv.conj() * gzb - gv.conj() * fzb) / denom,
        b_upper: (fv * gz - gv * fz) / denom,
        b_lower: -(gv * fzb - fv * gzb) / denom,
    })
}

/// Characteristic coefficients of the pair `(p, i/p)` at `(x, y)`. For this
/// form `A = a = 0` and `B = ∂_z p/p`, `b = ∂_z̄ p/p` up to the difference
/// error.
pub fn characteristic_coefficients(
    profile: &PairProfile<'_>,
    x: f64,
    y: f64,
    h: f64,
) -> Result<CharacteristicCoefficients> {
    characteristic_coefficients_of(|x, y| profile.f(x, y), |x, y| profile.g(x, y), x, y, h)
}

/// `∂_(F,G) W = ∂_z W − A W − B W̄` at `(x, y)`.
pub fn fg_derivative(
    w: impl Fn(f64, f64) -> Complex64,
    profile: &PairProfile<'_>,
    x: f64,
    y: f64,
    h: f64,
) -> Result<Complex64> {
    let c = characteristic_coefficients(profile, x, y, h)?;
    let wv = w(x, y);
    let (wz, _) = wirtinger(|x, y| Ok::<_, Error>(w(x, y)), x, y, h)?;
    Ok(wz - c.a_upper * wv - c.b_upper * wv.conj())
}

/// Max over `points` of `|∂_z̄W − (∂_z̄p/p) W̄|`.
pub fn vekua_residual(
    w: impl Fn(f64, f64) -> Complex64,
    profile: &PairProfile<'_>,
    points: &[(f64, f64)],
    h: f64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &(x, y) in points {
        check_stencil(x, y, h)?;
        let (_, wzb) = wirtinger(|x, y| Ok::<_, Error>(w(x, y)), x, y, h)?;
        let (_, pzb) = wirtinger(|x, y| profile.f(x, y), x, y, h)?;
        let p = profile.p(x, y)?;
        let r = (wzb - pzb / p * w(x, y).conj()).norm();
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Vekua residual of a field sampled on the ray lattice, using polar central
/// differences `∂_z̄ = e^{iθ}(∂_r + (i/r)∂_θ)` on nodes with radius in
/// `[r_min, r_max]`. `b = ∂_z̄p/p` is taken from the pair samples the same way.
pub fn lattice_vekua_residual(
    values: &[Complex64],
    pair: &GeneratingPairField,
    r_min: f64,
    r_max: f64,
) -> Result<f64> {
    let lattice = pair.lattice();
    if values.len() != lattice.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: lattice.len(),
        });
    }
    let rays = lattice.rays();
    let n = lattice.nodes_per_ray();
    let dr = lattice.step();
    let dtheta = std::f64::consts::TAU / rays as f64;
    let p = pair.profile();
    let dbar = |field: &dyn Fn(usize) -> Complex64, ray: usize, k: usize| {
        let r = lattice.radius(k);
        let next = (ray + 1) % rays;
        let prev = (ray + rays - 1) % rays;
        let d_r =
            (field(lattice.index(ray, k + 1)) - field(lattice.index(ray, k - 1))) / (2.0 * dr);
        let d_t = (field(lattice.index(next, k)) - field(lattice.index(prev, k))) / (2.0 * dtheta);
        lattice.direction(ray) * (d_r + I * d_t / r)
    };
    let w_at = |i: usize| values[i];
    let p_at = |i: usize| Complex64::new(p[i], 0.0);
    let mut worst = 0.0f64;
    for ray in 0..rays {
        for k in 1..n - 1 {
            let r = lattice.radius(k);
            if r < r_min || r > r_max {
                continue;
            }
            let i = lattice.index(ray, k);
            let wzb = dbar(&w_at, ray, k);
            let pzb = dbar(&p_at, ray, k);
            let res = (wzb - pzb / p[i] * values[i].conj()).norm();
            worst = worst.max(res);
        }
    }
    Ok(worst)
}

/// `W = √σ (∂_x u − i ∂_y u)` at `(x, y)` by central differences.
pub fn transform_solution_to_w(
    u: impl Fn(f64, f64) -> f64,
    sigma: &dyn ConductivityField,
    x: f64,
    y: f64,
    h: f64,
) -> Result<Complex64> {
    check_stencil(x, y, h)?;
    let ux = (u(x + h, y) - u(x - h, y)) / (2.0 * h);
    let uy = (u(x, y + h) - u(x, y - h)) / (2.0 * h);
    let s = sigma.sigma(x, y);
    if !(s > 0.0) {
        return Err(Error::NonPositive {
            what: "sigma",
            value: s,
            x,
            y,
        });
    }
    Ok(s.sqrt() * Complex64::new(ux, -uy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conductivity::{AnalyticConductivity, ConductivityId};
    use approx::assert_abs_diff_eq;

    fn exp_factors() -> crate::conductivity::SeparableFactors {
        AnalyticConductivity::new(ConductivityId::Exponential)
            .separable_factors()
            .unwrap()
    }

    fn unit_factors() -> crate::conductivity::SeparableFactors {
        AnalyticConductivity::unit().separable_factors().unwrap()
    }

    #[test]
    fn unit_pair_is_trivial() {
        let l = RayLattice::new(8, 5).unwrap();
        let f = unit_factors();
        for parity in [Parity::Even, Parity::Odd] {
            let pair = build_pair(&f, parity, &l).unwrap();
            for r in 0..8 {
                for k in 0..5 {
                    assert_eq!(pair.f(r, k), Complex64::new(1.0, 0.0));
                    assert_eq!(pair.g(r, k), I);
                }
            }
        }
    }

    #[test]
    fn exponential_pair_profiles() {
        let l = RayLattice::new(12, 7).unwrap();
        let f = exp_factors();
        let even = build_pair(&f, Parity::Even, &l).unwrap();
        let odd = build_pair(&f, Parity::Odd, &l).unwrap();
        for r in 0..12 {
            for k in 0..7 {
                let z = l.node(r, k);
                assert_abs_diff_eq!(
                    even.f(r, k).re,
                    ((z.im - z.re) / 2.0).exp(),
                    epsilon = 1e-14
                );
                assert_abs_diff_eq!(odd.f(r, k).re, ((z.re + z.im) / 2.0).exp(), epsilon = 1e-14);
                // F·G = i and Im(conj(F)G) > 0.
                let fg = even.f(r, k) * even.g(r, k);
                assert_abs_diff_eq!(fg.re, 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(fg.im, 1.0, epsilon = 1e-12);
                assert!((even.f(r, k).conj() * even.g(r, k)).im > 0.0);
            }
        }
    }

    #[test]
    fn build_pair_reports_non_positive_factor() {
        struct Bad;
        impl SeparableField for Bad {
            fn factors(&self, x: f64, _y: f64) -> Result<(f64, f64)> {
                Ok((x, 1.0))
            }
        }
        let l = RayLattice::new(4, 3).unwrap();
        let err = build_pair(&Bad, Parity::Even, &l).unwrap_err();
        assert!(matches!(err, Error::NonPositive { what: "sigma1", .. }));
    }

    #[test]
    fn unit_coefficients_vanish() {
        let f = unit_factors();
        let prof = PairProfile::new(&f, Parity::Even);
        let c = characteristic_coefficients(&prof, 0.2, -0.1, 1e-4).unwrap();
        for v in [c.a_upper, c.a_lower, c.b_upper, c.b_lower] {
            assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn exponential_even_coefficients_match_analytic() {
        // p = e^{(y−x)/2}: ∂_z p/p = −1/2 − i/2, ∂_z̄ p/p = −1/2 + i/2.
        let f = exp_factors();
        let prof = PairProfile::new(&f, Parity::Even);
        for (x, y) in [(0.0, 0.0), (0.3, -0.4), (-0.5, 0.2)] {
            let c = characteristic_coefficients(&prof, x, y, 1e-4).unwrap();
            assert_abs_diff_eq!(c.a_upper.norm(), 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(c.a_lower.norm(), 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(
                (c.b_upper - Complex64::new(-0.5, -0.5)).norm(),
                0.0,
                epsilon = 1e-8
            );
            assert_abs_diff_eq!(
                (c.b_lower - Complex64::new(-0.5, 0.5)).norm(),
                0.0,
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn coefficients_reject_stencil_outside_disk() {
        let f = unit_factors();
        let prof = PairProfile::new(&f, Parity::Even);
        assert!(matches!(
            characteristic_coefficients(&prof, 0.9999, 0.0, 1e-3),
            Err(Error::StencilOutsideDisk { .. })
        ));
    }

    #[test]
    fn fg_derivatives_of_pair_members_vanish() {
        let model = AnalyticConductivity::new(ConductivityId::Lorentzian);
        let f = model.separable_factors().unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let prof = PairProfile::new(&f, parity);
            for (x, y) in [(0.1, 0.2), (-0.4, 0.3), (0.5, -0.5)] {
                let h = 1e-4;
                let df = fg_derivative(|x, y| prof.f(x, y).unwrap(), &prof, x, y, h).unwrap();
                let dg = fg_derivative(|x, y| prof.g(x, y).unwrap(), &prof, x, y, h).unwrap();
                assert!(df.norm() < 1e-6, "{parity:?} {df}");
                assert!(dg.norm() < 1e-6, "{parity:?} {dg}");
            }
        }
    }

    #[test]
    fn unhalved_derivative_of_z_squared_is_4z() {
        let f = unit_factors();
        let prof = PairProfile::new(&f, Parity::Even);
        let z2 = |x: f64, y: f64| Complex64::new(x, y).powi(2);
        for (x, y) in [(0.3, 0.1), (-0.2, 0.6)] {
            let d = fg_derivative(z2, &prof, x, y, 1e-4).unwrap();
            let expected = 4.0 * Complex64::new(x, y);
            assert_abs_diff_eq!((d - expected).norm(), 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn vekua_residual_of_transformed_exponential_solution() {
        // W = −(1−i) e^{−(x+y)/2} solves the even-parity Vekua equation.
        let f = exp_factors();
        let prof = PairProfile::new(&f, Parity::Even);
        let w = |x: f64, y: f64| -Complex64::new(1.0, -1.0) * (-(x + y) / 2.0).exp();
        let pts: Vec<(f64, f64)> = (0..25)
            .map(|i| {
                let t = i as f64 * 0.25;
                (0.6 * t.cos(), 0.6 * t.sin())
            })
            .collect();
        // Differencing scales ∂_z̄W and ∂_z̄p by the same factor here, so the
        // residual sits far below the h² bound.
        for h in [1e-2, 5e-3, 1e-3] {
            let r = vekua_residual(w, &prof, &pts, h).unwrap();
            assert!(r <= 1e-2 * h * h, "h = {h}: {r}");
        }
        let wrong = |x: f64, y: f64| w(x, y) * Complex64::new(1.0 + 0.1 * x, 0.0);
        assert!(vekua_residual(wrong, &prof, &pts, 1e-2).unwrap() > 1e-2);

        let unit = unit_factors();
        let uprof = PairProfile::new(&unit, Parity::Even);
        let r = vekua_residual(Complex64::new, &uprof, &pts, 1e-3).unwrap();
        assert!(r < 1e-10);
    }

    #[test]
    fn transform_examples() {
        let unit = AnalyticConductivity::unit();
        let w = transform_solution_to_w(|x, _| x, &unit, 0.1, 0.2, 1e-4).unwrap();
        assert_abs_diff_eq!((w - Complex64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-10);

        let exp = AnalyticConductivity::new(ConductivityId::Exponential);
        let w = transform_solution_to_w(|x, y| (-x - y).exp(), &exp, 0.0, 0.0, 1e-5).unwrap();
        assert_abs_diff_eq!((w + Complex64::new(1.0, -1.0)).norm(), 0.0, epsilon = 1e-8);

        let poly = AnalyticConductivity::new(ConductivityId::Polynomial);
        let w = transform_solution_to_w(|x, y| (x + y + 10.0).ln(), &poly, 0.0, 0.0, 1e-5).unwrap();
        let expected = Complex64::new(1.0, -1.0) / 10f64.sqrt();
        assert_abs_diff_eq!((w - expected).norm(), 0.0, epsilon = 1e-9);

        assert!(transform_solution_to_w(|x, _| x, &unit, 1.0, 0.0, 1e-3).is_err());
    }
}
