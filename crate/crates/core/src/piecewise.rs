//! Piecewise separable-variables approximation of an arbitrary conductivity.
//!
//! The disk is cut into `M` vertical strips. Inside strip `j` the conductivity
//! is replaced by `((x + K_j)/(χ_j + K_j)) · f_j(y)`, where `f_j` is a natural
//! cubic spline through samples taken along the crossing line `x = χ_j`.

use serde::{Deserialize, Serialize};

use crate::conductivity::{in_closed_disk, ConductivityField, SeparableField};
use crate::error::{Error, Result};
use crate::spline::NaturalCubicSpline;

pub const DEFAULT_STRIPS: usize = 1001;
pub const DEFAULT_K: f64 = 60.0;
pub const DEFAULT_LINE_SAMPLES: usize = 1000;

/// Crossing lines whose half-chord is shorter than this carry a constant
/// profile instead of a spline.
pub const DEGENERATE_CHORD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripDecomposition {
    edges: Vec<f64>,
    chi: Vec<f64>,
    k: Vec<f64>,
}

impl StripDecomposition {
    pub fn strip_count(&self) -> usize {
        self.chi.len()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn width(&self) -> f64 {
        2.0 / self.strip_count() as f64
    }

    /// Index of the strip holding abscissa `x`, using half-open membership
    /// `[x_j, x_{j+1})` with the last strip closed. `None` outside `[-1, 1]`.
    pub fn strip_of(&self, x: f64) -> Option<usize> {
        let m = self.strip_count();
        if !(-1.0..=1.0).contains(&x) {
            return None;
        }
        let mut j = (((x + 1.0) / self.width()).floor() as usize).min(m - 1);
        while j > 0 && x < self.edges[j] {
            j -= 1;
        }
        while j < m - 1 && x >= self.edges[j + 1] {
            j += 1;
        }
        Some(j)
    }

    fn validate(&self) -> Result<()> {
        let m = self.chi.len();
        let bad = |msg: &str| Err(Error::Malformed(msg.to_string()));
        if m == 0 || self.edges.len() != m + 1 || self.k.len() != m {
            return bad("strip arrays have inconsistent lengths");
        }
        if self.edges[0] != -1.0 || self.edges[m] != 1.0 {
            return bad("edges must span [-1, 1]");
        }
        if self.edges.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("edges must be strictly increasing");
        }
        for j in 0..m {
            if !(self.chi[j] > self.edges[j] && self.chi[j] < self.edges[j + 1]) {
                return bad("crossing line must lie strictly inside its strip");
            }
            if !(self.k[j].is_finite() && self.k[j] > -self.edges[j]) {
                return bad("x + K must stay positive across each strip");
            }
        }
        if self.edges.contains(&0.0) {
            return bad("the center x = 0 must not sit on a strip edge");
        }
        Ok(())
    }
}

/// Equidistant strips over `[-1, 1]` with crossing lines at the strip
/// midpoints and a shared constant `K`.
pub fn build_strips(strips: usize, k: f64) -> Result<StripDecomposition> {
    if strips < 3 || strips.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "strip count must be odd and at least 3 so x = 0 falls inside a strip, got {strips}"
        )));
    }
    if !(k > 1.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "K must be a finite constant greater than 1, got {k}"
        )));
    }
    let width = 2.0 / strips as f64;
    let mut edges: Vec<f64> = (0..=strips).map(|j| -1.0 + j as f64 * width).collect();
    edges[strips] = 1.0;
    let chi = (0..strips)
        .map(|j| {
            // The middle strip is symmetric about 0; pin its midpoint exactly.
            if 2 * j + 1 == strips {
                0.0
            } else {
                0.5 * (edges[j] + edges[j + 1])
            }
        })
        .collect();
    Ok(StripDecomposition {
        edges,
        chi,
        k: vec![k; strips],
    })
}

/// Conductivity samples along one crossing line.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingLineSamples {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    /// Half-chord was below [`DEGENERATE_CHORD`]; the profile is constant.
    pub degenerate: bool,
}

/// Samples `σ(χ, y)` at `n_samples` equidistant `y` spanning the chord of the
/// disk at `x = χ`.
pub fn sample_crossing_line(
    source: &dyn ConductivityField,
    chi: f64,
    n_samples: usize,
) -> Result<CrossingLineSamples> {
    if !(chi.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "crossing line x = {chi} does not cut the open disk"
        )));
    }
    if n_samples < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: n_samples,
        });
    }
    let y_max = (1.0 - chi * chi).sqrt();
    if y_max < DEGENERATE_CHORD {
        let v = source.sigma(chi, 0.0);
        return Ok(CrossingLineSamples {
            knots: vec![-y_max, y_max],
            values: vec![v, v],
            degenerate: true,
        });
    }
    let step = 2.0 * y_max / (n_samples - 1) as f64;
    let mut knots: Vec<f64> = (0..n_samples).map(|k| -y_max + k as f64 * step).collect();
    knots[n_samples - 1] = y_max;
    if n_samples % 2 == 1 {
        knots[n_samples / 2] = 0.0;
    }
    let values = knots.iter().map(|&y| source.sigma(chi, y)).collect();
    Ok(CrossingLineSamples {
        knots,
        values,
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StripProfile {
    Spline(NaturalCubicSpline),
    Constant { value: f64, y_max: f64 },
}

impl StripProfile {
    fn evaluate(&self, y: f64) -> f64 {
        match self {
            StripProfile::Spline(s) => s.evaluate(y),
            StripProfile::Constant { value, .. } => *value,
        }
    }

    fn y_max(&self) -> f64 {
        match self {
            StripProfile::Spline(s) => *s.knots().last().expect("spline has knots"),
            StripProfile::Constant { y_max, .. } => *y_max,
        }
    }
}

/// A conductivity of the form `((x+K_j)/(χ_j+K_j)) f_j(y)` on each strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseSeparableConductivity {
    decomposition: StripDecomposition,
    profiles: Vec<StripProfile>,
}

/// Builds the piecewise approximation of `source` with `strips` strips,
/// constant `k` and `n_samples` samples per crossing line.
pub fn build_piecewise(
    source: &dyn ConductivityField,
    strips: usize,
    k: f64,
    n_samples: usize,
) -> Result<PiecewiseSeparableConductivity> {
    let decomposition = build_strips(strips, k)?;
    let mut profiles = Vec::with_capacity(strips);
    for &chi in decomposition.chi() {
        let samples = sample_crossing_line(source, chi, n_samples)?;
        for (&y, &v) in samples.knots.iter().zip(&samples.values) {
            if !(v > 0.0) {
                return Err(Error::NonPositive {
                    what: "sampled conductivity",
                    value: v,
                    x: chi,
                    y,
                });
            }
        }
        let profile = if samples.degenerate {
            StripProfile::Constant {
                value: samples.values[0],
                y_max: samples.knots[1],
            }
        } else {
            StripProfile::Spline(NaturalCubicSpline::new(samples.knots, samples.values)?)
        };
        profiles.push(profile);
    }
    Ok(PiecewiseSeparableConductivity {
        decomposition,
        profiles,
    })
}

impl PiecewiseSeparableConductivity {
    pub fn decomposition(&self) -> &StripDecomposition {
        &self.decomposition
    }

    pub fn profiles(&self) -> &[StripProfile] {
        &self.profiles
    }

    /// `(σ1(x), σ2(y))` for the strip containing `x`; `y` is clamped to the
    /// crossing line's chord before the profile is evaluated.
    pub fn separable_factors_at(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        if !in_closed_disk(x, y) {
            return Err(Error::OutsideDisk { x, y });
        }
        let x = x.clamp(-1.0, 1.0);
        let j = self
            .decomposition
            .strip_of(x)
            .ok_or(Error::OutsideDisk { x, y })?;
        let k = self.decomposition.k[j];
        let chi = self.decomposition.chi[j];
        let profile = &self.profiles[j];
        let y_max = profile.y_max();
        let sigma1 = (x + k) / (chi + k);
        let sigma2 = profile.evaluate(y.clamp(-y_max, y_max));
        Ok((sigma1, sigma2))
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        let (s1, s2) = self.separable_factors_at(x, y)?;
        Ok(s1 * s2)
    }

    /// Value of the profile for the strip containing `x = 0`, evaluated at
    /// the center.
    pub fn center_value(&self) -> f64 {
        self.evaluate(0.0, 0.0).expect("origin is inside the disk")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }

    /// Loads a decomposition dump, rejecting anything that violates the strip
    /// or spline invariants.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        raw.decomposition.validate()?;
        if raw.profiles.len() != raw.decomposition.strip_count() {
            return Err(Error::Malformed("one profile per strip is required".into()));
        }
        let profiles = raw
            .profiles
            .into_iter()
            .map(|p| match p {
                StripProfile::Spline(s) => {
                    let s = s.validated()?;
                    let (first, last) = (s.knots()[0], *s.knots().last().expect("validated"));
                    if last > 0.0 && last <= 1.0 && first == -last {
                        Ok(StripProfile::Spline(s))
                    } else {
                        Err(Error::Malformed(
                            "spline knots must span a symmetric chord [-y, y] with 0 < y <= 1"
                                .into(),
                        ))
                    }
                }
                StripProfile::Constant { value, y_max } => {
                    if value > 0.0 && value.is_finite() && (0.0..=1.0).contains(&y_max) {
                        Ok(StripProfile::Constant { value, y_max })
                    } else {
                        Err(Error::Malformed("invalid constant profile".into()))
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            decomposition: raw.decomposition,
            profiles,
        })
    }

    /// Max and mean of `|pw − σ|/σ` over a `resolution²` grid intersected with
    /// the closed disk.
    pub fn deviation_from(
        &self,
        source: &dyn ConductivityField,
        resolution: usize,
    ) -> DeviationStats {
        let step = 2.0 / (resolution.max(2) - 1) as f64;
        let mut max = 0.0f64;
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..resolution {
            let x = -1.0 + i as f64 * step;
            for j in 0..resolution {
                let y = -1.0 + j as f64 * step;
                if x * x + y * y > 1.0 {
                    continue;
                }
                let exact = source.sigma(x, y);
                let approx = self.evaluate(x, y).expect("grid point is inside the disk");
                let rel = ((approx - exact) / exact).abs();
                max = max.max(rel);
                sum += rel;
                count += 1;
            }
        }
        DeviationStats {
            max_relative: max,
            mean_relative: if count > 0 { sum / count as f64 } else { 0.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationStats {
    pub max_relative: f64,
    pub mean_relative: f64,
}

impl SeparableField for PiecewiseSeparableConductivity {
    fn factors(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        self.separable_factors_at(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conductivity::{catalog, AnalyticConductivity, ConductivityId};
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn strips_small_case() {
        let d = build_strips(3, 60.0).unwrap();
        let third = 1.0 / 3.0;
        let expected = [-1.0, -third, third, 1.0];
        for (a, b) in d.edges().iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        let chi = [-2.0 * third, 0.0, 2.0 * third];
        for (a, b) in d.chi().iter().zip(chi) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        assert_eq!(d.k(), &[60.0; 3]);
    }

    #[test]
    fn strips_defaults() {
        let d = build_strips(1001, 60.0).unwrap();
        assert_relative_eq!(d.width(), 2.0 / 1001.0);
        assert_eq!(d.chi()[500], 0.0);
        assert_eq!(d.edges()[0], -1.0);
        assert_eq!(d.edges()[1001], 1.0);
        assert!(d.validate().is_ok());
        assert_eq!(d.strip_of(0.0), Some(500));
    }

    #[test]
    fn strips_reject_bad_parameters() {
        assert!(build_strips(4, 60.0).is_err());
        assert!(build_strips(1, 60.0).is_err());
        assert!(build_strips(5, 1.0).is_err());
        assert!(build_strips(5, f64::NAN).is_err());
    }

    #[test]
    fn strip_membership_is_half_open() {
        let d = build_strips(5, 60.0).unwrap();
        for j in 0..5 {
            assert_eq!(d.strip_of(d.edges()[j]), Some(j));
        }
        assert_eq!(d.strip_of(1.0), Some(4));
        assert_eq!(d.strip_of(1.0 + 1e-9), None);
    }

    #[test]
    fn crossing_line_samples() {
        let exp = AnalyticConductivity::new(ConductivityId::Exponential);
        let s = sample_crossing_line(&exp, 0.0, 3).unwrap();
        assert_eq!(s.knots, vec![-1.0, 0.0, 1.0]);
        assert_relative_eq!(s.values[0], 1.0 / E);
        assert_eq!(s.values[1], 1.0);
        assert_relative_eq!(s.values[2], E);

        let unit = AnalyticConductivity::unit();
        let s = sample_crossing_line(&unit, 0.3, 1000).unwrap();
        assert!(s.values.iter().all(|&v| v == 1.0));

        let exy = AnalyticConductivity::new(ConductivityId::ExponentialXy);
        let s = sample_crossing_line(&exy, 0.0, 101).unwrap();
        assert!(s.values.iter().all(|&v| v == 1.0));

        assert!(sample_crossing_line(&exp, 1.0, 10).is_err());
        assert!(sample_crossing_line(&exp, 0.0, 1).is_err());
    }

    #[test]
    fn crossing_line_degenerate_chord() {
        let exp = AnalyticConductivity::new(ConductivityId::Exponential);
        let chi = 1.0 - 1e-14;
        let s = sample_crossing_line(&exp, chi, 50).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.values.len(), 2);
        assert_eq!(s.values[0], s.values[1]);
    }

    #[test]
    fn piecewise_interpolates_at_knots() {
        let exp = AnalyticConductivity::new(ConductivityId::Exponential);
        let pw = build_piecewise(&exp, 1001, 60.0, 1000).unwrap();
        for j in [0, 17, 250, 500, 777, 1000] {
            let chi = pw.decomposition().chi()[j];
            let StripProfile::Spline(s) = &pw.profiles()[j] else {
                panic!("spline expected")
            };
            for &y in s.knots().iter().step_by(97) {
                assert_relative_eq!(
                    pw.evaluate(chi, y).unwrap(),
                    (chi + y).exp(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn piecewise_polynomial_source_reproduces_knots() {
        let poly = AnalyticConductivity::new(ConductivityId::Polynomial);
        let pw = build_piecewise(&poly, 101, 60.0, 200).unwrap();
        let j = 30;
        let chi = pw.decomposition().chi()[j];
        let StripProfile::Spline(s) = &pw.profiles()[j] else {
            panic!()
        };
        for &y in s.knots() {
            assert_relative_eq!(
                pw.evaluate(chi, y).unwrap(),
                chi + y + 10.0,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn piecewise_unit_source_bound() {
        let unit = AnalyticConductivity::unit();
        let (m, k) = (21, 60.0);
        let pw = build_piecewise(&unit, m, k, 50).unwrap();
        // |x − χ| ≤ w/2 and χ + K ≥ K − 1.
        let bound = pw.decomposition().width() / (2.0 * (k - 1.0));
        for i in 0..=200 {
            let x = -1.0 + i as f64 / 100.0;
            let v = pw.evaluate(x, 0.0).unwrap();
            assert!((v - 1.0).abs() <= bound + 1e-15, "{x} {v}");
        }
        for &chi in pw.decomposition().chi() {
            let y = 0.5 * (1.0 - chi * chi).sqrt();
            assert_relative_eq!(pw.evaluate(chi, y).unwrap(), 1.0, max_relative = 1e-14);
            let (s1, s2) = pw.separable_factors_at(chi, y).unwrap();
            assert_eq!(s1, 1.0);
            assert_relative_eq!(s2, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn piecewise_off_knot_accuracy() {
        let exp = AnalyticConductivity::new(ConductivityId::Exponential);
        let pw = build_piecewise(&exp, 1001, 60.0, 1000).unwrap();
        assert_relative_eq!(pw.evaluate(0.5, 0.5).unwrap(), E, max_relative = 1e-3);
        let j = pw.decomposition().strip_of(0.3).unwrap();
        let chi = pw.decomposition().chi()[j];
        let (s1, s2) = pw.separable_factors_at(chi, 0.0).unwrap();
        assert_eq!(s1, 1.0);
        assert_relative_eq!(s2, chi.exp(), max_relative = 1e-12);
    }

    #[test]
    fn factor_product_identity_on_random_points() {
        let sin = AnalyticConductivity::new(ConductivityId::Sinusoidal);
        let pw = build_piecewise(&sin, 251, 60.0, 300).unwrap();
        // Deterministic low-discrepancy points in the disk.
        let golden = 0.618_033_988_749_895;
        for i in 0..10_000 {
            let r = ((i as f64 + 0.5) / 10_000.0).sqrt();
            let t = std::f64::consts::TAU * (i as f64 * golden).fract();
            let (x, y) = (r * t.cos(), r * t.sin());
            let (s1, s2) = pw.separable_factors_at(x, y).unwrap();
            let v = pw.evaluate(x, y).unwrap();
            assert!(((s1 * s2 - v) / v).abs() <= 1e-14);
        }
    }

    #[test]
    fn evaluation_outside_disk_is_rejected() {
        let pw = build_piecewise(&AnalyticConductivity::unit(), 5, 60.0, 10).unwrap();
        assert!(matches!(
            pw.evaluate(0.9, 0.9),
            Err(Error::OutsideDisk { .. })
        ));
    }

    #[test]
    fn deviation_decreases_with_strip_count() {
        let sources = [
            AnalyticConductivity::new(ConductivityId::Exponential),
            AnalyticConductivity::new(ConductivityId::ExponentialXy),
        ];
        for src in sources {
            let devs: Vec<f64> = [251, 501, 1001]
                .iter()
                .map(|&m| {
                    build_piecewise(&src, m, 60.0, 400)
                        .unwrap()
                        .deviation_from(&src, 300)
                        .max_relative
                })
                .collect();
            assert!(
                devs[0] > devs[1] && devs[1] > devs[2],
                "{:?} {devs:?}",
                src.id()
            );
        }
    }

    #[test]
    fn piecewise_positive_for_all_sources() {
        for src in catalog() {
            let pw = build_piecewise(&src, 1001, 60.0, 1000).unwrap();
            let field = |x: f64, y: f64| pw.evaluate(x, y).unwrap();
            let report = crate::conductivity::validate_positivity(&field, 300).unwrap();
            assert!(report.positive, "{:?}", src.id());
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let src = AnalyticConductivity::new(ConductivityId::LorentzianXy);
        let pw = build_piecewise(&src, 7, 60.0, 12).unwrap();
        let back = PiecewiseSeparableConductivity::from_json(&pw.to_json()).unwrap();
        assert_eq!(back, pw);

        let mut broken = pw.clone();
        broken.decomposition.chi[2] = 5.0;
        assert!(PiecewiseSeparableConductivity::from_json(&broken.to_json()).is_err());
        assert!(PiecewiseSeparableConductivity::from_json("{").is_err());
    }
}
