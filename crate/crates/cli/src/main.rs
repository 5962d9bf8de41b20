use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eie_core::boundary_fit::FitMode;
use eie_core::experiments::{
    emit_report, parse_value_list, run_scenario_with, scenario_registry, sweep, write_sweep_csv,
    OutputFormat, Overrides, ScenarioError, ScenarioParams, ScenarioRun, ScenarioTag, SigmaMode,
    Stage, SweepParam,
};
use eie_core::Error;
use rayon::prelude::*;

/// Formal-power solver for the electrical impedance equation on the unit disk.
///
/// Thread count follows RAYON_NUM_THREADS when set, otherwise all cores.
#[derive(Parser)]
#[command(name = "eie", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the registered scenarios with their published errors.
    List,
    /// Run scenarios and write their reports.
    Run(RunArgs),
    /// Rerun scenarios over a list of values of one parameter.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Selection {
    /// Scenario tag (repeatable), e.g. exp-sep or lorentz-pw.
    #[arg(long = "scenario", value_name = "TAG")]
    scenarios: Vec<String>,
    /// Select every registered scenario.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct ParamArgs {
    /// Highest formal exponent N (2N+1 basis functions).
    #[arg(long, value_name = "N")]
    powers: Option<usize>,
    /// Number of rays R of the quadrature lattice.
    #[arg(long, value_name = "R")]
    rays: Option<usize>,
    /// Nodes per ray P, center and boundary included.
    #[arg(long, value_name = "P")]
    ray_nodes: Option<usize>,
    /// Odd number of strips M for piecewise conductivities.
    #[arg(long, value_name = "M")]
    strips: Option<usize>,
    /// Constant K > 1 of the strip-wise x factor.
    #[arg(long, value_name = "K")]
    k_const: Option<f64>,
    /// Samples per crossing line.
    #[arg(long, value_name = "S")]
    line_samples: Option<usize>,
    /// Generating-pair parity used for the basis (0 or 1).
    #[arg(long, value_name = "0|1")]
    pair_parity: Option<usize>,
}

impl ParamArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            powers: self.powers,
            rays: self.rays,
            ray_nodes: self.ray_nodes,
            strips: self.strips,
            k_const: self.k_const,
            n_samples: self.line_samples,
            pair_parity: self.pair_parity,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fit {
    Collocation,
    LeastSquares,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    selection: Selection,
    #[command(flatten)]
    params: ParamArgs,
    /// Output directory for reports.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Fitting mode.
    #[arg(long, value_enum, default_value_t = Fit::Collocation)]
    fit: Fit,
    /// Also write boundary values of every formal power to TAG_powers.csv.
    #[arg(long)]
    dump_powers: bool,
    /// Also write the piecewise conductivity to TAG_strips.json.
    #[arg(long)]
    dump_strips: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    selection: Selection,
    #[command(flatten)]
    params: ParamArgs,
    /// Parameter to vary: N, P, M or R.
    #[arg(long = "sweep", visible_alias = "param", value_name = "PARAM")]
    param: String,
    /// Comma-separated values, e.g. 2,5,10.
    #[arg(long, value_name = "LIST")]
    values: String,
    /// Output directory for the sweep tables.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
}

/// A failure with its process exit status.
struct Failure {
    code: u8,
    message: String,
}

const VALIDATION: u8 = 1;
const NUMERICAL: u8 = 2;
const IO: u8 = 3;

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = match (&e.stage, &e.source) {
            (_, Error::Io { .. }) => IO,
            (Stage::Validation, _) | (_, Error::InvalidParameter(_)) => VALIDATION,
            _ => NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } => IO,
            Error::InvalidParameter(_) => VALIDATION,
            _ => NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn validation(message: String) -> Failure {
    Failure {
        code: VALIDATION,
        message,
    }
}

fn selected(sel: &Selection) -> Result<Vec<ScenarioTag>, Failure> {
    if sel.all {
        if !sel.scenarios.is_empty() {
            return Err(validation(
                "--all cannot be combined with --scenario".into(),
            ));
        }
        return Ok(ScenarioTag::ALL.to_vec());
    }
    if sel.scenarios.is_empty() {
        return Err(validation(
            "select scenarios with --scenario TAG or --all".into(),
        ));
    }
    let mut tags = Vec::new();
    for s in &sel.scenarios {
        let tag: ScenarioTag = s.parse()?;
        if !tags.contains(&tag) {
            tags.push(tag);
        }
    }
    Ok(tags)
}

fn cmd_list() {
    println!(
        "{:<14} {:<16} {:<12} {:>12}",
        "scenario", "conductivity", "mode", "paper_error"
    );
    for s in scenario_registry() {
        let mode = match s.sigma_mode {
            SigmaMode::ExactSeparable => "separable",
            SigmaMode::Piecewise => "piecewise",
        };
        let published = s.paper_error.map(|e| format!("{e:e}")).unwrap_or_default();
        println!(
            "{:<14} {:<16} {:<12} {:>12}",
            s.tag.as_str(),
            format!("{:?}", s.source.id()).to_lowercase(),
            mode,
            published
        );
    }
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

fn write_artifacts(run: &ScenarioRun, args: &RunArgs) -> Result<Vec<PathBuf>, Failure> {
    let format = match args.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
        Format::Both => OutputFormat::Both,
    };
    let mut written = emit_report(&run.report, format, &args.out)?;
    let tag = run.report.scenario.as_str();
    let io = |path: &Path, e: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    if args.dump_powers {
        let path = args.out.join(format!("{tag}_powers.csv"));
        let file = fs::File::create(&path).map_err(|e| io(&path, e))?;
        run.powers
            .write_boundary_csv(std::io::BufWriter::new(file))?;
        written.push(path);
    }
    if args.dump_strips {
        if let Some(pw) = &run.piecewise {
            let path = args.out.join(format!("{tag}_strips.json"));
            fs::write(&path, pw.to_json()).map_err(|e| io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

struct Summary {
    tag: ScenarioTag,
    error: f64,
    ratio: Option<f64>,
    ill_conditioned: bool,
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let tags = selected(&args.selection)?;
    let overrides = args.params.overrides();
    ScenarioParams::default().with_overrides(&overrides)?;
    ensure_dir(&args.out)?;
    let mode = match args.fit {
        Fit::Collocation => FitMode::Collocation,
        Fit::LeastSquares => FitMode::LeastSquares,
    };

    // Scenarios are independent; each writes only its own files.
    let outcomes: Vec<Result<Summary, Failure>> = tags
        .par_iter()
        .map(|&tag| {
            let run = run_scenario_with(tag, &overrides, mode)?;
            write_artifacts(&run, args)?;
            let r = &run.report;
            Ok(Summary {
                tag,
                error: r.error,
                ratio: r.error_ratio,
                ill_conditioned: r.ill_conditioned,
            })
        })
        .collect();

    let mut first_failure = None;
    for outcome in outcomes {
        match outcome {
            Ok(s) => {
                let ratio = s
                    .ratio
                    .map(|r| format!("{r:.3e}"))
                    .unwrap_or_else(|| "-".into());
                let flag = if s.ill_conditioned {
                    "  (ill-conditioned, least squares)"
                } else {
                    ""
                };
                println!(
                    "{:<14} E = {:.4e}  E/E_paper = {ratio}{flag}",
                    s.tag.as_str(),
                    s.error
                );
            }
            Err(f) => {
                eprintln!("error: {}", f.message);
                first_failure.get_or_insert(f);
            }
        }
    }
    match first_failure {
        Some(f) => Err(Failure {
            code: f.code,
            message: "one or more scenarios failed".into(),
        }),
        None => {
            println!("reports written to {}", args.out.display());
            Ok(())
        }
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let tags = selected(&args.selection)?;
    let param: SweepParam = args.param.parse()?;
    let values = parse_value_list(&args.values)?;
    let overrides = args.params.overrides();
    ScenarioParams::default().with_overrides(&overrides)?;
    ensure_dir(&args.out)?;
    for tag in tags {
        let points = sweep(tag, param, &values, &overrides)?;
        let path = args
            .out
            .join(format!("sweep_{}_{}.csv", tag.as_str(), param.symbol()));
        write_sweep_csv(&points, &path)?;
        println!("{} over {}:", tag.as_str(), param.symbol());
        for p in &points {
            println!("  {:>8}  E = {:.4e}", p.value, p.error);
        }
        println!("  -> {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::List => {
            cmd_list();
            Ok(())
        }
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
