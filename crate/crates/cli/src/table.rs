//! Percentage relative efficiency tables.

use anyhow::Result;
use nonresp_core::theory;
use nonresp_core::{ClassShape, Design, EstimatorKind};
use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreRow {
    #[serde(rename = "W2")]
    pub w2: f64,
    pub ratio: f64,
    pub regression: f64,
    pub class_optimum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreTable {
    pub scenario: String,
    pub design: Design,
    pub class_shape: ClassShape,
    /// Baseline of every cell: variance of the Hansen-Hurwitz mean.
    pub baseline: String,
    pub rows: Vec<PreRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// PRE of the ratio, regression and optimum class estimators over the
/// Hansen-Hurwitz mean, one row per non-response rate. Single-phase designs
/// use the single-phase formulas, two-phase designs the double-sampling ones.
pub fn pre_table(s: &Scenario) -> Result<PreTable> {
    let design = s.design;
    let (ratio, regression, class) = if design.is_two_phase() {
        (
            EstimatorKind::Ratio2p,
            EstimatorKind::Regression2p,
            EstimatorKind::Class2p,
        )
    } else {
        (
            EstimatorKind::Ratio,
            EstimatorKind::Regression,
            EstimatorKind::Class,
        )
    };
    let mut rows = Vec::with_capacity(s.w2_values.len());
    for &w2 in &s.w2_values {
        let p = s.params.resolve(w2)?;
        let base = theory::var_hh(&p, design.n(), design.k).value;
        let cp = theory::optimum_for_design(&p, &design, s.class_shape)?;
        let mse = |kind| {
            theory::theoretical_mse(kind, &p, &design, Some(&cp))
                .expect("estimator matches the design")
        };
        rows.push(PreRow {
            w2,
            ratio: theory::pre(mse(ratio)?, base)?,
            regression: theory::pre(mse(regression)?, base)?,
            class_optimum: theory::pre(mse(class)?, base)?,
        });
    }
    Ok(PreTable {
        scenario: s.name.clone(),
        design,
        class_shape: s.class_shape,
        baseline: EstimatorKind::HhMean.label().to_string(),
        rows,
        notes: Vec::new(),
    })
}

pub fn render_text(t: &PreTable) -> String {
    let mut out = format!(
        "PRE over {} ({}, n = {}{}, k = {})\n",
        t.baseline,
        t.scenario,
        t.design.n(),
        t.design
            .n_prime()
            .map(|np| format!(", n' = {np}"))
            .unwrap_or_default(),
        t.design.k
    );
    out.push_str(&format!(
        "{:>6}  {:>12}  {:>12}  {:>12}\n",
        "W2", "ratio", "regression", "class_opt"
    ));
    for r in &t.rows {
        out.push_str(&format!(
            "{:>6.2}  {:>12.5}  {:>12.5}  {:>12.5}\n",
            r.w2, r.ratio, r.regression, r.class_optimum
        ));
    }
    for note in &t.notes {
        out.push_str(&format!("* {note}\n"));
    }
    out
}

pub fn render_csv(t: &PreTable) -> String {
    let mut out = String::from("W2,ratio,regression,class_optimum\n");
    for r in &t.rows {
        out.push_str(&format!(
            "{},{:.5},{:.5},{:.5}\n",
            r.w2, r.ratio, r.regression, r.class_optimum
        ));
    }
    out
}
