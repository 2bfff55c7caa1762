//! `estimate`: point estimates from one realized sample.
//!
//! The sample is either drawn (seeded) from a population file or read from
//! a sample file with columns `role,y,x`, where `role` is one of
//!
//! * `respondent`    – responded at the first attempt (y and x)
//! * `subsample`     – non-respondent followed up by interview (y and x)
//! * `nonrespondent` – non-respondent not followed up (x only)
//! * `phase1`        – phase-one unit not selected at phase two (x only)

use std::io::Read;

use anyhow::{anyhow, bail, Result};
use nonresp_core::design::{replication_rng, Observed};
use nonresp_core::{
    compute_params, realize, ClassParams, ClassShape, Design, DrawnSample, Error,
    EstimatorKind, FinitePopulation,
};
use serde::{Deserialize, Serialize};

use crate::UsageError;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub estimators: Vec<EstimatorKind>,
    pub xbar: Option<f64>,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub shape: ClassShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimator: EstimatorKind,
    pub value: Option<f64>,
    /// Why the estimate is undefined for this sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub undefined: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutput {
    pub n1: usize,
    pub n2: usize,
    pub h2: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_prime: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_params: Option<ClassParams>,
    pub estimates: Vec<Estimate>,
}

/// Draws one realization of `design` from `pop` with replication stream 0
/// of `seed`.
pub fn draw(pop: &FinitePopulation, design: &Design, seed: u64) -> Result<DrawnSample> {
    design.validate(pop.len())?;
    let mut rng = replication_rng(seed, 0);
    Ok(realize(design, pop, &mut rng)?)
}

pub fn load_sample<R: Read>(source: R) -> Result<DrawnSample> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| anyhow!("sample file: missing column `{name}`"))
    };
    let (role_col, y_col, x_col) = (column("role")?, column("y")?, column("x")?);

    let mut respondents = Vec::new();
    let mut sub = Vec::new();
    let mut x_only = Vec::new();
    let mut phase1_only = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let number = |col: usize, name: &str| -> Result<f64> {
            let raw = record.get(col).unwrap_or("");
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => bail!("sample file line {line}: bad {name} value `{raw}`"),
            }
        };
        let role = record.get(role_col).unwrap_or("").to_ascii_lowercase();
        match role.as_str() {
            "respondent" => respondents.push(Observed {
                y: number(y_col, "y")?,
                x: number(x_col, "x")?,
            }),
            "subsample" => sub.push(Observed {
                y: number(y_col, "y")?,
                x: number(x_col, "x")?,
            }),
            "nonrespondent" => x_only.push(number(x_col, "x")?),
            "phase1" => phase1_only.push(number(x_col, "x")?),
            other => bail!(
                "sample file line {line}: unknown role `{other}` \
                 (expected respondent, subsample, nonrespondent or phase1)"
            ),
        }
    }
    let phase1_x = if phase1_only.is_empty() {
        None
    } else {
        let mut all: Vec<f64> = respondents.iter().chain(&sub).map(|o| o.x).collect();
        all.extend(&x_only);
        all.extend(phase1_only);
        Some(all)
    };
    Ok(DrawnSample::new(respondents, sub, x_only, phase1_x)?)
}

/// Evaluates every requested estimator on `sample`. `pop`, when known,
/// supplies optimum class constants if none are given.
pub fn estimate(
    sample: &DrawnSample,
    pop: Option<(&FinitePopulation, &Design)>,
    opts: &EstimateOptions,
) -> Result<EstimateOutput> {
    let two_phase = sample.phase1_x.is_some();
    for kind in &opts.estimators {
        if kind.is_two_phase() && !two_phase {
            return Err(UsageError(format!("{kind} needs a two-phase design (--n-prime)")).into());
        }
        if kind.needs_xbar() && opts.xbar.is_none() {
            return Err(Error::XbarRequired.into());
        }
    }
    let class_params = if opts.estimators.iter().any(|k| k.is_class()) {
        Some(match (opts.alpha1, opts.alpha2, pop) {
            (Some(a1), Some(a2), _) => opts.shape.with_alphas(a1, a2)?,
            (None, None, Some((pop, design))) => {
                let params = compute_params(pop)?;
                nonresp_core::theory::optimum_for_design(&params, design, opts.shape)?
            }
            (None, None, None) => {
                return Err(UsageError(
                    "class estimators on a sample file need --alpha1 and --alpha2".into(),
                )
                .into())
            }
            _ => return Err(UsageError("give both --alpha1 and --alpha2".into()).into()),
        })
    } else {
        None
    };
    let estimates = opts
        .estimators
        .iter()
        .map(|&kind| match kind.evaluate(sample, opts.xbar, class_params.as_ref()) {
            Ok(v) => Estimate {
                estimator: kind,
                value: Some(v),
                undefined: None,
            },
            Err(e) => Estimate {
                estimator: kind,
                value: None,
                undefined: Some(e.to_string()),
            },
        })
        .collect();
    Ok(EstimateOutput {
        n1: sample.n1,
        n2: sample.n2,
        h2: sample.h2,
        n_prime: sample.phase1_x.as_ref().map(Vec::len),
        class_params,
        estimates,
    })
}

fn value_text(e: &Estimate) -> String {
    match (e.value, &e.undefined) {
        (Some(v), _) => format!("{v:.5}"),
        (None, Some(why)) => format!("undefined ({why})"),
        (None, None) => "undefined".into(),
    }
}

pub fn render_text(o: &EstimateOutput) -> String {
    let mut out = format!("n1 = {}  n2 = {}  h2 = {}", o.n1, o.n2, o.h2);
    if let Some(np) = o.n_prime {
        out.push_str(&format!("  n' = {np}"));
    }
    out.push('\n');
    if let Some(cp) = o.class_params {
        out.push_str(&format!(
            "class constants: alpha1 = {:.5}  alpha2 = {:.5}  eta = {}  lambda = {}\n",
            cp.alpha1, cp.alpha2, cp.eta, cp.lambda
        ));
    }
    for e in &o.estimates {
        out.push_str(&format!("{:<14} {}\n", e.estimator.label(), value_text(e)));
    }
    out
}

pub fn render_csv(o: &EstimateOutput) -> String {
    let mut out = String::from("estimator,estimate,n1,n2,h2\n");
    for e in &o.estimates {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.estimator.label(),
            e.value.map(|v| format!("{v:.5}")).unwrap_or_default(),
            o.n1,
            o.n2,
            o.h2
        ));
    }
    out
}
