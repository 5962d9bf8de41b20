use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::registry::{Overrides, ScenarioTag};
use super::{run_scenario, ScenarioError, Stage};
use crate::error::{Error, Result};

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Highest formal exponent `N`.
    Powers,
    /// Nodes per ray `P`.
    RayNodes,
    /// Strip count `M`.
    Strips,
    /// Ray count `R`.
    Rays,
}

impl SweepParam {
    pub fn symbol(self) -> &'static str {
        match self {
            SweepParam::Powers => "N",
            SweepParam::RayNodes => "P",
            SweepParam::Strips => "M",
            SweepParam::Rays => "R",
        }
    }

    fn apply(self, base: &Overrides, value: usize) -> Overrides {
        let mut o = *base;
        match self {
            SweepParam::Powers => o.powers = Some(value),
            SweepParam::RayNodes => o.ray_nodes = Some(value),
            SweepParam::Strips => o.strips = Some(value),
            SweepParam::Rays => o.rays = Some(value),
        }
        o
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" | "powers" => Ok(Self::Powers),
            "P" | "ray-nodes" => Ok(Self::RayNodes),
            "M" | "strips" => Ok(Self::Strips),
            "R" | "rays" => Ok(Self::Rays),
            _ => Err(Error::InvalidParameter(format!(
                "unknown sweep parameter {s:?}; expected N, P, M or R"
            ))),
        }
    }
}

/// Parses a comma-separated list of non-negative integers such as `2,5,10`.
/// Surrounding whitespace is ignored; an empty list is an error.
pub fn parse_value_list(text: &str) -> Result<Vec<usize>> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::InvalidParameter("value list is empty".into()));
    }
    trimmed
        .split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<usize>().map_err(|_| {
                Error::InvalidParameter(format!("invalid value {item:?} in list {text:?}"))
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub scenario: ScenarioTag,
    pub param: &'static str,
    pub value: usize,
    pub error: f64,
}

/// Reruns `tag` once per value of `param`, every other parameter taken from
/// `base`.
pub fn sweep(
    tag: ScenarioTag,
    param: SweepParam,
    values: &[usize],
    base: &Overrides,
) -> std::result::Result<Vec<SweepPoint>, ScenarioError> {
    if values.is_empty() {
        return Err(ScenarioError {
            scenario: tag,
            stage: Stage::Validation,
            source: Error::InvalidParameter("sweep needs at least one value".into()),
        });
    }
    values
        .iter()
        .map(|&value| {
            run_scenario(tag, &param.apply(base, value)).map(|r| SweepPoint {
                scenario: tag,
                param: param.symbol(),
                value,
                error: r.error,
            })
        })
        .collect()
}

/// Writes sweep points as CSV with columns `scenario,param,value,error`.
pub fn write_sweep_csv(points: &[SweepPoint], path: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::io(path, e);
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(e) => io(e),
        other => Error::Malformed(format!("{other:?}")),
    })?;
    for p in points {
        w.serialize(p)
            .map_err(|e| Error::Malformed(e.to_string()))?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn value_lists() {
        assert_eq!(parse_value_list("2,5,10").unwrap(), vec![2, 5, 10]);
        assert_eq!(parse_value_list(" 251 , 501 ").unwrap(), vec![251, 501]);
        assert!(parse_value_list("").is_err());
        assert!(parse_value_list("  ").is_err());
        assert!(parse_value_list("2,,5").is_err());
        assert!(parse_value_list("-1").is_err());
        assert!(parse_value_list("1.5").is_err());
    }

    #[test]
    fn params_parse() {
        for p in [
            SweepParam::Powers,
            SweepParam::RayNodes,
            SweepParam::Strips,
            SweepParam::Rays,
        ] {
            assert_eq!(p.symbol().parse::<SweepParam>().unwrap(), p);
        }
        assert!("K".parse::<SweepParam>().is_err());
    }

    #[test]
    fn empty_sweep_is_rejected() {
        let err = sweep(
            ScenarioTag::ExpSep,
            SweepParam::Powers,
            &[],
            &Overrides::default(),
        );
        assert_eq!(err.unwrap_err().stage, Stage::Validation);
    }

    #[test]
    fn sweep_over_powers_is_non_increasing() {
        let base = Overrides {
            rays: Some(200),
            ray_nodes: Some(201),
            ..Default::default()
        };
        let pts = sweep(ScenarioTag::ExpSep, SweepParam::Powers, &[2, 5, 10], &base).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(
            pts[0].error >= pts[1].error && pts[1].error >= pts[2].error,
            "{pts:?}"
        );
    }

    proptest! {
        #[test]
        fn lists_round_trip(values in proptest::collection::vec(0usize..100_000, 1..20)) {
            let text = values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
            prop_assert_eq!(parse_value_list(&text).unwrap(), values);
        }

        #[test]
        fn arbitrary_text_never_panics(text in ".*") {
            let _ = parse_value_list(&text);
        }
    }
}
