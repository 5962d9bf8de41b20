//! Scenario registry, the end-to-end pipeline, the finite-difference oracle
//! and report emission.

mod oracle;
mod registry;
mod report;
mod sweep;

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::boundary_fit::{
    boundary_traces, collocation_fit, orthonormalize, FitMode, OrthonormalSystem,
};
use crate::conductivity::SeparableField;
use crate::error::Error;
use crate::piecewise::{build_piecewise, DeviationStats, PiecewiseSeparableConductivity};
use crate::pseudoanalytic::{
    build_pair, formal_powers, FormalPowerSet, Parity, RayLattice, Retain,
};

pub use oracle::{fd_conductivity_residual, ORACLE_GRID};
pub use registry::{
    scenario_registry, Overrides, Scenario, ScenarioParams, ScenarioTag, SigmaMode, DEFAULT_POWERS,
};
pub use report::{
    emit_report, AlphaEntry, BoundarySample, OutputFormat, ScenarioReport, Timings,
    BOUNDARY_SAMPLES,
};
pub use sweep::{parse_value_list, sweep, write_sweep_csv, SweepParam, SweepPoint};

/// Step of the oracle check attached to every report.
pub const ORACLE_STEP: f64 = 1e-3;
/// Grid resolution for the piecewise deviation statistics.
pub const DEVIATION_RESOLUTION: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Validation,
    Conductivity,
    Pairs,
    Powers,
    Orthonormalization,
    Fit,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Validation => "validation",
            Stage::Conductivity => "conductivity",
            Stage::Pairs => "pairs",
            Stage::Powers => "powers",
            Stage::Orthonormalization => "orthonormalization",
            Stage::Fit => "fit",
            Stage::Output => "output",
        };
        f.write_str(s)
    }
}

/// A module error tagged with the scenario and pipeline stage it came from.
#[derive(Debug, thiserror::Error)]
#[error("scenario {scenario}, stage {stage}: {source}")]
pub struct ScenarioError {
    pub scenario: ScenarioTag,
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl ScenarioError {
    fn at(scenario: ScenarioTag, stage: Stage) -> impl FnOnce(Error) -> Self {
        move |source| Self {
            scenario,
            stage,
            source,
        }
    }
}

/// A report together with the intermediate artifacts it was computed from.
#[derive(Debug)]
pub struct ScenarioRun {
    pub report: ScenarioReport,
    pub powers: FormalPowerSet,
    pub system: OrthonormalSystem,
    pub piecewise: Option<PiecewiseSeparableConductivity>,
}

/// Runs one scenario with default parameters replaced by `overrides`.
pub fn run_scenario(
    tag: ScenarioTag,
    overrides: &Overrides,
) -> Result<ScenarioReport, ScenarioError> {
    run_scenario_with(tag, overrides, FitMode::Collocation).map(|run| run.report)
}

/// Like [`run_scenario`] but keeps the artifacts and lets the caller pick the
/// fitting mode.
pub fn run_scenario_with(
    tag: ScenarioTag,
    overrides: &Overrides,
    mode: FitMode,
) -> Result<ScenarioRun, ScenarioError> {
    let scenario = Scenario::get(tag);
    let params = scenario
        .params
        .with_overrides(overrides)
        .map_err(ScenarioError::at(tag, Stage::Validation))?;
    let source = scenario.source;
    let lattice = RayLattice::new(params.rays, params.ray_nodes)
        .map_err(ScenarioError::at(tag, Stage::Validation))?;

    let clock = Instant::now();
    let exact_factors;
    let mut piecewise = None;
    let mut deviation: Option<DeviationStats> = None;
    let factors: &dyn SeparableField = match scenario.sigma_mode {
        SigmaMode::ExactSeparable => {
            exact_factors = source.separable_factors().ok_or_else(|| ScenarioError {
                scenario: tag,
                stage: Stage::Conductivity,
                source: Error::InvalidParameter(format!(
                    "{:?} has no separable factorization",
                    source.id()
                )),
            })?;
            &exact_factors
        }
        SigmaMode::Piecewise => {
            let pw = build_piecewise(&source, params.strips, params.k_const, params.n_samples)
                .map_err(ScenarioError::at(tag, Stage::Conductivity))?;
            deviation = Some(pw.deviation_from(&source, DEVIATION_RESOLUTION));
            piecewise.insert(pw)
        }
    };
    let sigma_time = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let parity = Parity::from_index(params.pair_parity);
    let target =
        build_pair(factors, parity, &lattice).map_err(ScenarioError::at(tag, Stage::Pairs))?;
    let other = build_pair(factors, parity.other(), &lattice)
        .map_err(ScenarioError::at(tag, Stage::Pairs))?;
    let pairs_time = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let powers = formal_powers(&target, &other, &lattice, params.powers, Retain::Boundary)
        .map_err(ScenarioError::at(tag, Stage::Powers))?;
    drop((target, other));
    let powers_time = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let traces = boundary_traces(&powers);
    let system =
        orthonormalize(&traces).map_err(ScenarioError::at(tag, Stage::Orthonormalization))?;
    let gs_time = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let condition = |theta: f64| source.boundary_condition(theta);
    let fit =
        collocation_fit(&system, &condition, mode).map_err(ScenarioError::at(tag, Stage::Fit))?;
    let fit_time = clock.elapsed().as_secs_f64();

    let exact_u = |x: f64, y: f64| source.exact_u(x, y).unwrap_or(f64::NAN);
    let oracle_residual = fd_conductivity_residual(&source, &exact_u, ORACLE_STEP);

    let report = ScenarioReport::assemble(
        &scenario,
        params,
        &system,
        fit,
        oracle_residual,
        deviation,
        &condition,
        Timings {
            sigma: sigma_time,
            pairs: pairs_time,
            powers: powers_time,
            gs: gs_time,
            fit: fit_time,
        },
    );
    Ok(ScenarioRun {
        report,
        powers,
        system,
        piecewise,
    })
}
