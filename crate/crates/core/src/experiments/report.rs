use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::registry::{Scenario, ScenarioParams, ScenarioTag};
use crate::boundary_fit::{FitMode, FitResult, OrthonormalSystem};
use crate::error::{Error, Result};
use crate::piecewise::DeviationStats;
use crate::pseudoanalytic::Coefficient;

/// Points of the boundary comparison table.
pub const BOUNDARY_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaEntry {
    pub k: usize,
    pub n: usize,
    pub coeff: Coefficient,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample {
    pub theta: f64,
    pub condition: f64,
    pub reconstruction: f64,
    pub error: f64,
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Timings {
    pub sigma: f64,
    pub pairs: f64,
    pub powers: f64,
    pub gs: f64,
    pub fit: f64,
}

impl Timings {
    pub fn all_nonnegative(&self) -> bool {
        [self.sigma, self.pairs, self.powers, self.gs, self.fit]
            .iter()
            .all(|t| *t >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: ScenarioTag,
    pub params: ScenarioParams,
    pub alpha: Vec<AlphaEntry>,
    pub error: f64,
    pub paper_error: Option<f64>,
    pub error_ratio: Option<f64>,
    pub residuals: Vec<f64>,
    pub condition_estimate: f64,
    pub ill_conditioned: bool,
    pub fit_mode: FitMode,
    pub dropped_traces: Vec<usize>,
    /// Largest deviation of the orthonormal Gram matrix from the identity.
    pub gram_defect: f64,
    pub boundary_max: f64,
    pub oracle_residual: f64,
    pub piecewise_deviation: Option<DeviationStats>,
    pub timings: Timings,
    #[serde(skip)]
    pub boundary: Vec<BoundarySample>,
}

impl ScenarioReport {
    #[allow(clippy::too_many_arguments)]
    pub(super) fn assemble(
        scenario: &Scenario,
        params: ScenarioParams,
        system: &OrthonormalSystem,
        fit: FitResult,
        oracle_residual: f64,
        piecewise_deviation: Option<DeviationStats>,
        condition: &dyn Fn(f64) -> f64,
        timings: Timings,
    ) -> Self {
        let alpha = system
            .labels()
            .iter()
            .zip(&fit.alpha)
            .enumerate()
            .map(|(k, (label, &value))| AlphaEntry {
                k,
                n: label.n,
                coeff: label.coeff,
                value,
            })
            .collect();
        let gram_defect = system
            .gram()
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(j, &g)| (g - if i == j { 1.0 } else { 0.0 }).abs())
            })
            .fold(0.0, f64::max);
        let boundary: Vec<BoundarySample> = (0..BOUNDARY_SAMPLES)
            .map(|i| {
                let theta = std::f64::consts::TAU * i as f64 / BOUNDARY_SAMPLES as f64;
                let c = condition(theta);
                let r = system.reconstruct(&fit.alpha, theta);
                BoundarySample {
                    theta,
                    condition: c,
                    reconstruction: r,
                    error: r - c,
                }
            })
            .collect();
        let boundary_max = boundary
            .iter()
            .map(|s| s.condition.abs())
            .fold(0.0, f64::max);
        Self {
            scenario: scenario.tag,
            params,
            alpha,
            error: fit.error,
            paper_error: scenario.paper_error,
            error_ratio: scenario.paper_error.map(|p| fit.error / p),
            residuals: fit.residuals,
            condition_estimate: fit.condition_estimate,
            ill_conditioned: fit.ill_conditioned,
            fit_mode: fit.mode,
            dropped_traces: system.dropped().to_vec(),
            gram_defect,
            boundary_max,
            oracle_residual,
            piecewise_deviation,
            timings,
            boundary,
        }
    }

    /// The full report as pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without wall-clock timings; identical across runs with the
    /// same parameters.
    pub fn data_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("timings");
        }
        serde_json::to_string_pretty(&value).expect("report serializes")
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Both,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "both" => Ok(Self::Both),
            _ => Err(Error::InvalidParameter(format!(
                "unknown format {s:?}; expected json, csv or both"
            ))),
        }
    }
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Malformed(format!("{}: {other:?}", path.display())),
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct CoefficientRow {
    k: usize,
    n: usize,
    coeff: &'static str,
    alpha: f64,
}

/// Writes `<tag>.json` and/or `<tag>_coefficients.csv` plus
/// `<tag>_boundary.csv` into `dir`, creating it if needed. Returns the paths
/// written.
pub fn emit_report(
    report: &ScenarioReport,
    format: OutputFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tag = report.scenario.as_str();
    let mut written = Vec::new();
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let path = dir.join(format!("{tag}.json"));
        let json = report.to_json();
        write_file(&path, |w| writeln!(w, "{json}"))?;
        written.push(path);
    }
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        let path = dir.join(format!("{tag}_coefficients.csv"));
        write_csv(
            &path,
            report.alpha.iter().map(|a| CoefficientRow {
                k: a.k,
                n: a.n,
                coeff: a.coeff.label(),
                alpha: a.value,
            }),
        )?;
        written.push(path);
        let path = dir.join(format!("{tag}_boundary.csv"));
        write_csv(&path, report.boundary.iter())?;
        written.push(path);
    }
    Ok(written)
}
