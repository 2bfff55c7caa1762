//! Replicated-design simulation: empirical bias and MSE of each estimator,
//! compared with the first-order formulas.
//!
//! Replication `r` draws from [`replication_rng`]`(seed, r)` and the
//! per-replication results are reduced in index order, so a report is
//! bit-identical for any thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{realize, replication_rng, Design};
use crate::error::{Error, Result};
use crate::estimators::{ClassParams, ClassShape, EstimatorKind};
use crate::population::{compute_params, FinitePopulation, PopulationParams};
use crate::theory;

pub const MIN_REPLICATIONS: usize = 100;
/// z-score beyond which a theory/simulation disagreement is flagged.
pub const Z_LIMIT: f64 = 3.0;
/// Relative slack added to the band of estimators whose MSE formula is a
/// first-order approximation.
pub const FIRST_ORDER_SLACK: f64 = 0.02;

/// How the class estimators get their constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassChoice {
    Fixed(ClassParams),
    /// Optimum constants for this shape, from the true population parameters.
    Optimum(ClassShape),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub design: Design,
    pub estimators: Vec<EstimatorKind>,
    pub class: Option<ClassChoice>,
    pub replications: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalStats {
    pub empirical_mean: f64,
    pub empirical_bias: f64,
    pub empirical_mse: f64,
    pub mse_standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub estimator: EstimatorKind,
    pub class_params: Option<ClassParams>,
    /// Replications where the estimator was defined.
    pub valid: usize,
    pub degenerate: usize,
    /// `None` when fewer than two replications were usable.
    pub stats: Option<EmpiricalStats>,
    pub theoretical_value: Option<f64>,
    pub z_score: Option<f64>,
}

impl EstimatorSummary {
    pub fn failed(&self) -> bool {
        self.stats.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationMeta {
    pub replications: usize,
    pub seed: u64,
    pub design: Design,
    pub true_mean: f64,
    /// Replications where at least one estimator was undefined.
    pub degenerate_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub meta: SimulationMeta,
    pub estimators: Vec<EstimatorSummary>,
}

impl SimulationReport {
    pub fn summary(&self, kind: EstimatorKind) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|e| e.estimator == kind)
    }
}

fn resolve_class(
    choice: Option<ClassChoice>,
    params: &PopulationParams,
    design: &Design,
) -> Result<Option<ClassParams>> {
    match choice {
        None => Ok(None),
        Some(ClassChoice::Fixed(cp)) => Ok(Some(cp)),
        Some(ClassChoice::Optimum(shape)) => {
            theory::optimum_for_design(params, design, shape).map(Some)
        }
    }
}

/// Runs `spec.replications` independent realizations of `spec.design` on
/// `pop` and summarises every requested estimator.
pub fn run_simulation(pop: &FinitePopulation, spec: &SimulationSpec) -> Result<SimulationReport> {
    if spec.replications < MIN_REPLICATIONS {
        return Err(Error::InvalidParams(format!(
            "at least {MIN_REPLICATIONS} replications required, got {}",
            spec.replications
        )));
    }
    let design = spec.design;
    design.validate(pop.len())?;
    let params = compute_params(pop)?;
    for kind in &spec.estimators {
        if kind.is_two_phase() && !design.is_two_phase() {
            return Err(Error::InvalidDesign(format!(
                "{kind} needs a two-phase design"
            )));
        }
    }
    let class = resolve_class(spec.class, &params, &design)?;
    if spec.estimators.iter().any(|k| k.is_class()) && class.is_none() {
        return Err(Error::InvalidParams(
            "class estimators need fixed or optimum constants".into(),
        ));
    }

    let replicate = |r: usize| -> Result<Vec<Option<f64>>> {
        let mut rng = replication_rng(spec.seed, r as u64);
        let sample = realize(&design, pop, &mut rng)?;
        Ok(spec
            .estimators
            .iter()
            .map(|kind| {
                kind.evaluate(&sample, Some(params.x_mean), class.as_ref())
                    .ok()
                    .filter(|v| v.is_finite())
            })
            .collect())
    };

    let results: Vec<Vec<Option<f64>>> = match spec.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| Error::InvalidParams(e.to_string()))?;
            pool.install(|| {
                (0..spec.replications)
                    .into_par_iter()
                    .map(replicate)
                    .collect::<Result<_>>()
            })?
        }
        None => (0..spec.replications)
            .into_par_iter()
            .map(replicate)
            .collect::<Result<_>>()?,
    };

    let degenerate_count = results
        .iter()
        .filter(|row| row.iter().any(Option::is_none))
        .count();
    let truth = params.y_mean;
    let estimators = spec
        .estimators
        .iter()
        .enumerate()
        .map(|(j, &kind)| {
            let values: Vec<f64> = results.iter().filter_map(|row| row[j]).collect();
            EstimatorSummary {
                estimator: kind,
                class_params: if kind.is_class() { class } else { None },
                valid: values.len(),
                degenerate: spec.replications - values.len(),
                stats: summarise(&values, truth),
                theoretical_value: None,
                z_score: None,
            }
        })
        .collect();

    Ok(SimulationReport {
        meta: SimulationMeta {
            replications: spec.replications,
            seed: spec.seed,
            design,
            true_mean: truth,
            degenerate_count,
        },
        estimators,
    })
}

/// Sequential summary in replication order.
fn summarise(values: &[f64], truth: f64) -> Option<EmpiricalStats> {
    if values.len() < 2 {
        return None;
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let sq: Vec<f64> = values.iter().map(|v| (v - truth).powi(2)).collect();
    let mse = sq.iter().sum::<f64>() / m;
    let var = sq.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / (m - 1.0);
    let se = var.sqrt() / m.sqrt();
    Some(EmpiricalStats {
        empirical_mean: mean,
        empirical_bias: mean - truth,
        empirical_mse: mse,
        mse_standard_error: se,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub estimator: EstimatorKind,
    pub empirical_mse: Option<f64>,
    pub mse_standard_error: Option<f64>,
    /// `None` renders as "n/a": no formula for this estimator and design.
    pub theoretical: Option<f64>,
    pub z_score: Option<f64>,
    /// Allowed `|empirical - theoretical|`.
    pub band: Option<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flagged)
    }

    pub fn row(&self, kind: EstimatorKind) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.estimator == kind)
    }
}

/// Acceptance band: `Z_LIMIT` standard errors, plus [`FIRST_ORDER_SLACK`]
/// of the theoretical value for everything except the Hansen-Hurwitz mean,
/// whose variance formula is exact.
pub fn acceptance_band(kind: EstimatorKind, theoretical: f64, standard_error: f64) -> f64 {
    let slack = if kind == EstimatorKind::HhMean {
        0.0
    } else {
        FIRST_ORDER_SLACK * theoretical.abs()
    };
    Z_LIMIT * standard_error + slack
}

/// Compares one summary with a theoretical MSE.
pub fn assess(summary: &EstimatorSummary, theoretical: Option<f64>) -> ComparisonRow {
    let stats = summary.stats;
    let mut row = ComparisonRow {
        estimator: summary.estimator,
        empirical_mse: stats.map(|s| s.empirical_mse),
        mse_standard_error: stats.map(|s| s.mse_standard_error),
        theoretical,
        z_score: None,
        band: None,
        flagged: false,
    };
    match (stats, theoretical) {
        (Some(s), Some(t)) => {
            let band = acceptance_band(summary.estimator, t, s.mse_standard_error);
            row.z_score = Some((s.empirical_mse - t) / s.mse_standard_error);
            row.band = Some(band);
            row.flagged = (s.empirical_mse - t).abs() > band;
        }
        (None, Some(_)) => row.flagged = true,
        _ => {}
    }
    row
}

/// Attaches theoretical MSEs to `report` and flags disagreements.
pub fn compare_theory(report: &mut SimulationReport, params: &PopulationParams) -> Result<Comparison> {
    let design = report.meta.design;
    let mut rows = Vec::with_capacity(report.estimators.len());
    for summary in &mut report.estimators {
        let theoretical =
            theory::theoretical_mse(summary.estimator, params, &design, summary.class_params.as_ref())
                .transpose()?;
        let row = assess(summary, theoretical);
        summary.theoretical_value = theoretical;
        summary.z_score = row.z_score;
        rows.push(row);
    }
    Ok(Comparison { rows })
}
