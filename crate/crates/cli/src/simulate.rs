//! `simulate`: Monte Carlo runs on synthesized or loaded populations.

use anyhow::{bail, Context, Result};
use nonresp_core::montecarlo::{Comparison, MIN_REPLICATIONS};
use nonresp_core::{
    compare_theory, compute_params, run_simulation, synthesize_population, ClassChoice,
    EstimatorKind, FinitePopulation, PopulationParams, SimulationReport, SimulationSpec,
};
use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;

/// Mixed into the master seed for population synthesis so that the
/// synthesis stream never coincides with a replication stream.
pub const SYNTHESIS_SALT: u64 = 0x5eed_f00d_b1a5_e5a1;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    pub replications: usize,
    pub seed: u64,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRun {
    /// Target non-response rate; `None` for a loaded population.
    #[serde(rename = "W2")]
    pub w2: Option<f64>,
    pub population: PopulationParams,
    pub report: SimulationReport,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateOutput {
    pub scenario: String,
    pub runs: Vec<SimulationRun>,
}

impl SimulateOutput {
    pub fn any_flagged(&self) -> bool {
        self.runs.iter().any(|r| r.comparison.any_flagged())
    }
}

pub fn estimators_for(two_phase: bool) -> Vec<EstimatorKind> {
    if two_phase {
        vec![
            EstimatorKind::HhMean,
            EstimatorKind::Ratio2p,
            EstimatorKind::Regression2p,
            EstimatorKind::Class2p,
        ]
    } else {
        vec![
            EstimatorKind::HhMean,
            EstimatorKind::Ratio,
            EstimatorKind::Regression,
            EstimatorKind::Class,
        ]
    }
}

fn run_one(
    s: &Scenario,
    pop: &FinitePopulation,
    w2: Option<f64>,
    opts: &SimulateOptions,
) -> Result<SimulationRun> {
    let spec = SimulationSpec {
        design: s.design,
        estimators: estimators_for(s.design.is_two_phase()),
        class: Some(ClassChoice::Optimum(s.class_shape)),
        replications: opts.replications,
        seed: opts.seed,
        threads: opts.threads,
    };
    let population = compute_params(pop)?;
    let mut report = run_simulation(pop, &spec)?;
    let comparison = compare_theory(&mut report, &population)?;
    Ok(SimulationRun {
        w2,
        population,
        report,
        comparison,
    })
}

/// One run per rate in the scenario, each on a population synthesized to
/// the scenario's parameters at that rate; or a single run on `loaded`.
pub fn simulate(
    s: &Scenario,
    loaded: Option<&FinitePopulation>,
    opts: &SimulateOptions,
) -> Result<SimulateOutput> {
    if opts.replications < MIN_REPLICATIONS {
        bail!(
            "--R: at least {MIN_REPLICATIONS} replications required, got {}",
            opts.replications
        );
    }
    if opts.threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    let runs = match loaded {
        Some(pop) => vec![run_one(s, pop, None, opts)?],
        None => s
            .w2_values
            .iter()
            .map(|&w2| {
                let target = s.params.resolve(w2)?;
                let pop = synthesize_population(&target, opts.seed ^ SYNTHESIS_SALT)
                    .with_context(|| format!("synthesizing population at W2 = {w2}"))?;
                run_one(s, &pop, Some(w2), opts)
            })
            .collect::<Result<_>>()?,
    };
    Ok(SimulateOutput {
        scenario: s.name.clone(),
        runs,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.5}")).unwrap_or_else(|| "-".into())
}

pub fn render_text(o: &SimulateOutput) -> String {
    let mut out = String::new();
    for run in &o.runs {
        let meta = &run.report.meta;
        out.push_str(&format!(
            "{} W2 = {}  R = {}  seed = {}  Ybar = {:.5}  degenerate = {}\n",
            o.scenario,
            run.w2.map(|w| w.to_string()).unwrap_or_else(|| "(loaded)".into()),
            meta.replications,
            meta.seed,
            meta.true_mean,
            meta.degenerate_count
        ));
        out.push_str(&format!(
            "{:<14} {:>16} {:>14} {:>16} {:>9}  flag\n",
            "estimator", "empirical_mse", "se", "theoretical", "z"
        ));
        for row in &run.comparison.rows {
            out.push_str(&format!(
                "{:<14} {:>16} {:>14} {:>16} {:>9}  {}\n",
                row.estimator.label(),
                fmt_opt(row.empirical_mse),
                fmt_opt(row.mse_standard_error),
                fmt_opt(row.theoretical),
                row.z_score.map(|z| format!("{z:.3}")).unwrap_or_else(|| "-".into()),
                if row.flagged { "*" } else { "" }
            ));
        }
        out.push('\n');
    }
    out
}

pub fn render_csv(o: &SimulateOutput) -> String {
    let mut out = String::from(
        "W2,estimator,valid,empirical_bias,empirical_mse,mse_standard_error,theoretical,z_score,flagged\n",
    );
    for run in &o.runs {
        for (row, summary) in run.comparison.rows.iter().zip(&run.report.estimators) {
            let bias = summary.stats.map(|s| s.empirical_bias);
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                run.w2.map(|w| w.to_string()).unwrap_or_default(),
                row.estimator.label(),
                summary.valid,
                bias.map(|v| format!("{v:.5}")).unwrap_or_default(),
                row.empirical_mse.map(|v| format!("{v:.5}")).unwrap_or_default(),
                row.mse_standard_error.map(|v| format!("{v:.5}")).unwrap_or_default(),
                row.theoretical.map(|v| format!("{v:.5}")).unwrap_or_default(),
                row.z_score.map(|v| format!("{v:.5}")).unwrap_or_default(),
                row.flagged
            ));
        }
    }
    out
}
