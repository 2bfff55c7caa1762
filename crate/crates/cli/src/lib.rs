//! Command-line front end: PRE tables, population parameters, Monte Carlo
//! runs and one-off estimates.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nonresp_core::{
    compute_params, load_population, ClassShape, Design, EstimatorKind, FinitePopulation,
    PopulationParams,
};
use serde::Serialize;

pub mod estimate;
pub mod scenario;
pub mod simulate;
pub mod table;

use scenario::{Preset, Scenario};

/// Invalid combination of arguments; exits with status 2 like clap's own
/// usage errors.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Exit status of `simulate` when a theory/simulation disagreement is flagged.
pub const EXIT_FLAGGED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "nonresp", version, about = "Mean estimation under non-response with sub-sampling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Population parameters of a scenario or of a population file.
    Params(ParamsArgs),
    /// PRE table of the ratio, regression and optimum class estimators.
    Table(TableArgs),
    /// Monte Carlo check of the MSE formulas.
    Simulate(SimulateArgs),
    /// Point estimates from one sample.
    Estimate(EstimateArgs),
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Built-in scenario.
    #[arg(long, value_parser = ["table1", "table2", "table3"], conflicts_with = "spec")]
    pub preset: Option<String>,
    /// Scenario JSON file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Non-response rates, overriding the scenario's list.
    #[arg(long = "W2", value_delimiter = ',')]
    pub w2: Vec<f64>,
    /// Sub-sampling factor, overriding the scenario's.
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Compute the parameters of a `y,x,group` CSV population instead.
    #[arg(long, conflicts_with_all = ["preset", "spec"])]
    pub population: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Replications.
    #[arg(long = "R", default_value_t = 10_000)]
    pub replications: usize,
    #[arg(long, env = "NONRESP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Simulate on this `y,x,group` CSV population instead of synthesizing.
    #[arg(long)]
    pub population: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// `y,x,group` CSV population to draw the sample from.
    #[arg(long, required_unless_present = "sample")]
    pub population: Option<PathBuf>,
    /// Pre-realized sample (`role,y,x` CSV) instead of a draw.
    #[arg(long, conflicts_with_all = ["population", "n", "n_prime", "k", "seed"])]
    pub sample: Option<PathBuf>,
    /// Phase-two sample size.
    #[arg(long, required_unless_present = "sample")]
    pub n: Option<usize>,
    /// Phase-one sample size; makes the design two-phase.
    #[arg(long = "n-prime")]
    pub n_prime: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, env = "NONRESP_SEED")]
    pub seed: Option<u64>,
    /// Estimators: hh_mean, ratio, regression, class, ratio_2p,
    /// regression_2p, class_2p.
    #[arg(long, value_delimiter = ',', default_value = "hh_mean")]
    pub estimator: Vec<EstimatorKind>,
    /// Population mean of the auxiliary variable.
    #[arg(long)]
    pub xbar: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Resolves `--preset`/`--spec` plus overrides.
pub fn load_scenario(source: &SourceArgs) -> Result<Scenario> {
    let scenario = match (&source.preset, &source.spec) {
        (Some(name), None) => name.parse::<Preset>()?.scenario(),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Scenario::from_json(&path.display().to_string(), &text)?
        }
        _ => return Err(UsageError("one of --preset or --spec is required".into()).into()),
    };
    let scenario = scenario.with_w2_values(source.w2.clone())?;
    match source.k {
        Some(k) => scenario.with_k(k),
        None => Ok(scenario),
    }
}

pub fn read_population(path: &Path) -> Result<FinitePopulation> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_population(file).with_context(|| format!("loading {}", path.display()))
}

fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn render_params(rows: &[PopulationParams], format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => to_json(&rows)?,
        Format::Text | Format::Csv => {
            let header = ["N", "Ybar", "Xbar", "S2_Y", "S2_X", "C_Y", "C_X", "rho", "W2", "S2_Y2"];
            let mut out = String::new();
            let sep = if format == Format::Csv { "," } else { "  " };
            let cell = |s: String| {
                if format == Format::Csv {
                    s
                } else {
                    format!("{s:>14}")
                }
            };
            out.push_str(
                &header
                    .iter()
                    .map(|h| cell(h.to_string()))
                    .collect::<Vec<_>>()
                    .join(sep),
            );
            out.push('\n');
            for p in rows {
                let values = [
                    p.size.to_string(),
                    format!("{:.5}", p.y_mean),
                    format!("{:.5}", p.x_mean),
                    format!("{:.5}", p.s2_y),
                    format!("{:.5}", p.s2_x),
                    format!("{:.5}", p.cv_y),
                    format!("{:.5}", p.cv_x),
                    format!("{:.5}", p.rho),
                    format!("{:.5}", p.w2),
                    format!("{:.5}", p.s2_y2),
                ];
                out.push_str(&values.map(cell).join(sep));
                out.push('\n');
            }
            out
        }
    })
}

pub fn cmd_params(args: &ParamsArgs) -> Result<()> {
    let rows = match &args.population {
        Some(path) => vec![compute_params(&read_population(path)?)?],
        None => {
            let s = load_scenario(&args.source)?;
            s.w2_values
                .iter()
                .map(|&w2| s.params.resolve(w2))
                .collect::<Result<_>>()?
        }
    };
    emit(&args.output, &render_params(&rows, args.output.format)?)
}

/// Builds the PRE table for a scenario, with footnotes for the built-in
/// presets.
pub fn build_table(s: &Scenario) -> Result<table::PreTable> {
    let mut t = table::pre_table(s)?;
    if s.design.is_two_phase() {
        t.notes.push(
            "class_opt = regression MSE / (1 + regression MSE / Ybar^2); \
             it exceeds regression in every row, W2 = 0.4 included"
                .into(),
        );
    }
    Ok(t)
}

pub fn cmd_table(args: &TableArgs) -> Result<()> {
    let s = load_scenario(&args.source)?;
    let t = build_table(&s)?;
    let text = match args.output.format {
        Format::Text => table::render_text(&t),
        Format::Csv => table::render_csv(&t),
        Format::Json => to_json(&t)?,
    };
    emit(&args.output, &text)
}

/// Returns whether any comparison was flagged.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<bool> {
    let s = load_scenario(&args.source)?;
    let loaded = args.population.as_deref().map(read_population).transpose()?;
    let opts = simulate::SimulateOptions {
        replications: args.replications,
        seed: args.seed,
        threads: args.threads,
    };
    let out = simulate::simulate(&s, loaded.as_ref(), &opts)?;
    let text = match args.output.format {
        Format::Text => simulate::render_text(&out),
        Format::Csv => simulate::render_csv(&out),
        Format::Json => to_json(&out)?,
    };
    emit(&args.output, &text)?;
    Ok(out.any_flagged())
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    if args.eta == 0.0 {
        bail!("--eta must be non-zero");
    }
    let opts = estimate::EstimateOptions {
        estimators: args.estimator.clone(),
        xbar: args.xbar,
        alpha1: args.alpha1,
        alpha2: args.alpha2,
        shape: ClassShape {
            eta: args.eta,
            lambda: args.lambda,
        },
    };
    let out = match (&args.sample, &args.population, args.n) {
        (Some(path), _, _) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let sample = estimate::load_sample(file)?;
            estimate::estimate(&sample, None, &opts)?
        }
        (None, Some(path), Some(n)) => {
            let pop = read_population(path)?;
            let k = args.k.unwrap_or(1.0);
            let design = match args.n_prime {
                Some(np) => Design::two_phase(np, n, k),
                None => Design::single(n, k),
            };
            if let Some(kind) = args.estimator.iter().find(|e| e.is_two_phase()) {
                if !design.is_two_phase() {
                    return Err(UsageError(format!(
                        "{kind} needs a two-phase design (--n-prime)"
                    ))
                    .into());
                }
            }
            let sample = estimate::draw(&pop, &design, args.seed.unwrap_or(0))?;
            estimate::estimate(&sample, Some((&pop, &design)), &opts)?
        }
        _ => return Err(UsageError("--population and --n, or --sample, required".into()).into()),
    };
    let text = match args.output.format {
        Format::Text => estimate::render_text(&out),
        Format::Csv => estimate::render_csv(&out),
        Format::Json => to_json(&out)?,
    };
    emit(&args.output, &text)
}

/// Runs a parsed command line; returns the process exit status.
pub fn run(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Params(a) => cmd_params(a).map(|_| 0),
        Command::Table(a) => cmd_table(a).map(|_| 0),
        Command::Simulate(a) => cmd_simulate(a).map(|flagged| if flagged { EXIT_FLAGGED } else { 0 }),
        Command::Estimate(a) => cmd_estimate(a).map(|_| 0),
    }
}
