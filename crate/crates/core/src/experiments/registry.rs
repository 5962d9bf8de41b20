use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::conductivity::{AnalyticConductivity, ConductivityId};
use crate::error::{Error, Result};
use crate::piecewise::{DEFAULT_K, DEFAULT_LINE_SAMPLES, DEFAULT_STRIPS};
use crate::pseudoanalytic::{DEFAULT_RAYS, DEFAULT_RAY_NODES};

/// Highest formal exponent used by default (21 basis functions).
pub const DEFAULT_POWERS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioTag {
    ExpSep,
    LorentzSep,
    ExpPw,
    LorentzPw,
    ExpXyPw,
    LorentzXyPw,
    PolyPw,
    SinPw,
    /// Unit conductivity with `u = eˣ cos y`; not listed in the registry.
    #[doc(hidden)]
    UnitSep,
}

impl ScenarioTag {
    pub const ALL: [ScenarioTag; 8] = [
        ScenarioTag::ExpSep,
        ScenarioTag::LorentzSep,
        ScenarioTag::ExpPw,
        ScenarioTag::LorentzPw,
        ScenarioTag::ExpXyPw,
        ScenarioTag::LorentzXyPw,
        ScenarioTag::PolyPw,
        ScenarioTag::SinPw,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioTag::ExpSep => "exp-sep",
            ScenarioTag::LorentzSep => "lorentz-sep",
            ScenarioTag::ExpPw => "exp-pw",
            ScenarioTag::LorentzPw => "lorentz-pw",
            ScenarioTag::ExpXyPw => "expxy-pw",
            ScenarioTag::LorentzXyPw => "lorentzxy-pw",
            ScenarioTag::PolyPw => "poly-pw",
            ScenarioTag::SinPw => "sin-pw",
            ScenarioTag::UnitSep => "unit-sep",
        }
    }
}

impl fmt::Display for ScenarioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioTag::ALL
            .into_iter()
            .chain([ScenarioTag::UnitSep])
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scenario tag {s:?}")))
    }
}

impl Serialize for ScenarioTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaMode {
    /// Use the catalog entry's own factorization.
    ExactSeparable,
    /// Use the strip-wise separable approximation of the catalog entry.
    Piecewise,
}

/// Numerical parameters of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioParams {
    #[serde(rename = "N")]
    pub powers: usize,
    #[serde(rename = "R")]
    pub rays: usize,
    #[serde(rename = "P")]
    pub ray_nodes: usize,
    #[serde(rename = "M")]
    pub strips: usize,
    #[serde(rename = "K")]
    pub k_const: f64,
    pub n_samples: usize,
    pub pair_parity: usize,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            powers: DEFAULT_POWERS,
            rays: DEFAULT_RAYS,
            ray_nodes: DEFAULT_RAY_NODES,
            strips: DEFAULT_STRIPS,
            k_const: DEFAULT_K,
            n_samples: DEFAULT_LINE_SAMPLES,
            pair_parity: 0,
        }
    }
}

/// Optional replacements for [`ScenarioParams`] fields.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub powers: Option<usize>,
    pub rays: Option<usize>,
    pub ray_nodes: Option<usize>,
    pub strips: Option<usize>,
    pub k_const: Option<f64>,
    pub n_samples: Option<usize>,
    pub pair_parity: Option<usize>,
}

impl ScenarioParams {
    /// Applies `overrides` and checks every module precondition before any
    /// computation starts.
    pub fn with_overrides(self, o: &Overrides) -> Result<Self> {
        let p = Self {
            powers: o.powers.unwrap_or(self.powers),
            rays: o.rays.unwrap_or(self.rays),
            ray_nodes: o.ray_nodes.unwrap_or(self.ray_nodes),
            strips: o.strips.unwrap_or(self.strips),
            k_const: o.k_const.unwrap_or(self.k_const),
            n_samples: o.n_samples.unwrap_or(self.n_samples),
            pair_parity: o.pair_parity.unwrap_or(self.pair_parity),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        if self.strips < 3 || self.strips.is_multiple_of(2) {
            return invalid(format!(
                "strip count M must be odd and >= 3, got {}",
                self.strips
            ));
        }
        if !(self.k_const > 1.0 && self.k_const.is_finite()) {
            return invalid(format!("K must be finite and > 1, got {}", self.k_const));
        }
        if self.n_samples < 2 {
            return invalid(format!("line samples must be >= 2, got {}", self.n_samples));
        }
        if self.ray_nodes < 2 {
            return invalid(format!("ray nodes P must be >= 2, got {}", self.ray_nodes));
        }
        let basis = 2 * self.powers + 1;
        if self.rays < 3 || self.rays < basis {
            return invalid(format!(
                "ray count R must be >= max(3, 2N+1) = {}, got {}",
                basis.max(3),
                self.rays
            ));
        }
        if self.pair_parity > 1 {
            return invalid(format!(
                "pair parity must be 0 or 1, got {}",
                self.pair_parity
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub tag: ScenarioTag,
    #[serde(skip)]
    pub source: AnalyticConductivity,
    pub sigma_mode: SigmaMode,
    pub params: ScenarioParams,
    /// Published boundary error for comparison; `None` for the hidden
    /// self-test.
    pub paper_error: Option<f64>,
}

impl Scenario {
    pub fn get(tag: ScenarioTag) -> Self {
        use ConductivityId::*;
        use ScenarioTag::*;
        let (id, mode, paper_error) = match tag {
            ExpSep => (Exponential, SigmaMode::ExactSeparable, Some(2.006e-8)),
            LorentzSep => (Lorentzian, SigmaMode::ExactSeparable, Some(2.15e-2)),
            ExpPw => (Exponential, SigmaMode::Piecewise, Some(3.4e-3)),
            LorentzPw => (Lorentzian, SigmaMode::Piecewise, Some(10.2e-3)),
            ExpXyPw => (ExponentialXy, SigmaMode::Piecewise, Some(8.948e-4)),
            LorentzXyPw => (LorentzianXy, SigmaMode::Piecewise, Some(1.4e-3)),
            PolyPw => (Polynomial, SigmaMode::Piecewise, Some(9.8e-3)),
            SinPw => (Sinusoidal, SigmaMode::Piecewise, Some(7.694e-4)),
            UnitSep => (Unit, SigmaMode::ExactSeparable, None),
        };
        Self {
            tag,
            source: AnalyticConductivity::new(id),
            sigma_mode: mode,
            params: ScenarioParams::default(),
            paper_error,
        }
    }
}

/// The eight published experiments with default parameters.
pub fn scenario_registry() -> Vec<Scenario> {
    ScenarioTag::ALL.into_iter().map(Scenario::get).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_contents() {
        let reg = scenario_registry();
        assert_eq!(reg.len(), 8);
        assert_eq!(reg[0].tag, ScenarioTag::ExpSep);
        assert_eq!(reg[0].paper_error, Some(2.006e-8));
        let sin = reg.iter().find(|s| s.tag == ScenarioTag::SinPw).unwrap();
        assert_eq!(sin.paper_error, Some(7.694e-4));
        for s in &reg {
            if s.sigma_mode == SigmaMode::ExactSeparable {
                assert!(s.source.separable_factors().is_some());
            }
            assert_eq!(s.params, ScenarioParams::default());
        }
        assert!(!reg.iter().any(|s| s.tag == ScenarioTag::UnitSep));
    }

    #[test]
    fn tags_round_trip() {
        for t in ScenarioTag::ALL {
            assert_eq!(t.as_str().parse::<ScenarioTag>().unwrap(), t);
        }
        assert_eq!(
            "unit-sep".parse::<ScenarioTag>().unwrap(),
            ScenarioTag::UnitSep
        );
        assert!("EXP-SEP".parse::<ScenarioTag>().is_err());
    }

    #[test]
    fn override_validation() {
        let base = ScenarioParams::default();
        let bad = [
            Overrides {
                strips: Some(4),
                ..Default::default()
            },
            Overrides {
                k_const: Some(0.5),
                ..Default::default()
            },
            Overrides {
                ray_nodes: Some(1),
                ..Default::default()
            },
            Overrides {
                rays: Some(10),
                ..Default::default()
            },
            Overrides {
                pair_parity: Some(2),
                ..Default::default()
            },
            Overrides {
                n_samples: Some(1),
                ..Default::default()
            },
        ];
        for o in bad {
            assert!(base.with_overrides(&o).is_err(), "{o:?}");
        }
        let ok = base
            .with_overrides(&Overrides {
                powers: Some(2),
                rays: Some(64),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(ok.powers, 2);
        assert_eq!(ok.rays, 64);
        assert_eq!(ok.strips, 1001);
    }
}
