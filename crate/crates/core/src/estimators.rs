//! Point estimators of the population mean from a single realized sample.
//!
//! Single-phase estimators take the known auxiliary mean `xbar`; two-phase
//! estimators use the phase-one auxiliary mean in its place.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::design::DrawnSample;
use crate::error::{Error, Result};

/// Constants of the class estimator
/// `[a1 * ybar + a2 * (Xref - xbar)] * (eta * Xref + lambda) / (eta * xbar + lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub eta: f64,
    pub lambda: f64,
}

impl ClassParams {
    pub fn new(alpha1: f64, alpha2: f64, eta: f64, lambda: f64) -> Result<Self> {
        if eta == 0.0 || !eta.is_finite() {
            return Err(Error::InvalidParams("eta must be finite and non-zero".into()));
        }
        Ok(Self {
            alpha1,
            alpha2,
            eta,
            lambda,
        })
    }

    pub fn shape(&self) -> ClassShape {
        ClassShape {
            eta: self.eta,
            lambda: self.lambda,
        }
    }
}

/// The `(eta, lambda)` pair that fixes a member of the class up to its
/// two linear constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassShape {
    pub eta: f64,
    pub lambda: f64,
}

impl Default for ClassShape {
    fn default() -> Self {
        Self {
            eta: 1.0,
            lambda: 0.0,
        }
    }
}

impl ClassShape {
    pub fn with_alphas(self, alpha1: f64, alpha2: f64) -> Result<ClassParams> {
        ClassParams::new(alpha1, alpha2, self.eta, self.lambda)
    }
}

fn mean<'a>(values: impl Iterator<Item = &'a f64>) -> Option<f64> {
    let (s, c) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (c > 0).then(|| s / c as f64)
}

/// Hansen-Hurwitz mean: respondent and sub-sample means weighted by
/// `n1 / n` and `n2 / n`.
pub fn hh_mean(s: &DrawnSample) -> Result<f64> {
    let resp = mean(s.respondents.iter().map(|o| &o.y));
    let sub = mean(s.nonresp_sub.iter().map(|o| &o.y));
    match (resp, sub) {
        (None, None) => Err(Error::Undefined(
            "no respondents and no sub-sampled non-respondents".into(),
        )),
        (Some(r), _) if s.n2 == 0 => Ok(r),
        (r, Some(h)) => {
            Ok((s.n1 as f64 * r.unwrap_or(0.0) + s.n2 as f64 * h) / s.n() as f64)
        }
        (Some(_), None) => Err(Error::Undefined(
            "non-respondents present but none sub-sampled".into(),
        )),
    }
}

/// Least-squares slope of y on x over the units where y is observed
/// (respondents plus the interviewed non-respondents).
pub fn regression_slope(s: &DrawnSample) -> Result<f64> {
    let pts: Vec<_> = s.y_observed().collect();
    if pts.len() < 2 {
        return Err(Error::SlopeUndefined);
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|o| o.x).sum::<f64>() / m;
    let my = pts.iter().map(|o| o.y).sum::<f64>() / m;
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(sxx, sxy), o| {
        let dx = o.x - mx;
        (sxx + dx * dx, sxy + dx * (o.y - my))
    });
    if !(sxx > 0.0) {
        return Err(Error::SlopeUndefined);
    }
    Ok(sxy / sxx)
}

fn nonzero_x_mean(s: &DrawnSample) -> Result<f64> {
    let xbar = s.x_mean();
    if xbar == 0.0 {
        return Err(Error::Undefined("sample mean of auxiliary variable is zero".into()));
    }
    Ok(xbar)
}

fn phase_one_mean(s: &DrawnSample) -> Result<f64> {
    s.phase1_x_mean().ok_or(Error::MissingPhaseOne)
}

pub fn ratio_estimate(s: &DrawnSample, xbar_pop: f64) -> Result<f64> {
    let xbar = nonzero_x_mean(s)?;
    Ok(hh_mean(s)? * xbar_pop / xbar)
}

pub fn regression_estimate(s: &DrawnSample, xbar_pop: f64) -> Result<f64> {
    let b = regression_slope(s)?;
    Ok(hh_mean(s)? + b * (xbar_pop - s.x_mean()))
}

fn class_core(s: &DrawnSample, x_ref: f64, p: &ClassParams) -> Result<f64> {
    let xbar = s.x_mean();
    let denom = p.eta * xbar + p.lambda;
    if denom == 0.0 {
        return Err(Error::ClassPole);
    }
    let linear = p.alpha1 * hh_mean(s)? + p.alpha2 * (x_ref - xbar);
    Ok(linear * (p.eta * x_ref + p.lambda) / denom)
}

/// Class estimator with known auxiliary mean.
pub fn class_estimate(s: &DrawnSample, xbar_pop: f64, p: &ClassParams) -> Result<f64> {
    class_core(s, xbar_pop, p)
}

pub fn ratio_estimate_2p(s: &DrawnSample) -> Result<f64> {
    let x1 = phase_one_mean(s)?;
    let xbar = nonzero_x_mean(s)?;
    Ok(hh_mean(s)? * x1 / xbar)
}

/// Two-phase regression estimator `ybar* + b (x1bar - xbar)`.
pub fn regression_estimate_2p(s: &DrawnSample) -> Result<f64> {
    let x1 = phase_one_mean(s)?;
    regression_estimate(s, x1)
}

/// Class estimator with the phase-one mean standing in for the unknown
/// auxiliary mean.
pub fn class_estimate_2p(s: &DrawnSample, p: &ClassParams) -> Result<f64> {
    let x1 = phase_one_mean(s)?;
    class_core(s, x1, p)
}

/// Named estimator, used to dispatch from simulations and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    HhMean,
    Ratio,
    Regression,
    Class,
    Ratio2p,
    Regression2p,
    Class2p,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 7] = [
        EstimatorKind::HhMean,
        EstimatorKind::Ratio,
        EstimatorKind::Regression,
        EstimatorKind::Class,
        EstimatorKind::Ratio2p,
        EstimatorKind::Regression2p,
        EstimatorKind::Class2p,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::HhMean => "hh_mean",
            EstimatorKind::Ratio => "ratio",
            EstimatorKind::Regression => "regression",
            EstimatorKind::Class => "class",
            EstimatorKind::Ratio2p => "ratio_2p",
            EstimatorKind::Regression2p => "regression_2p",
            EstimatorKind::Class2p => "class_2p",
        }
    }

    pub fn is_two_phase(self) -> bool {
        matches!(
            self,
            EstimatorKind::Ratio2p | EstimatorKind::Regression2p | EstimatorKind::Class2p
        )
    }

    pub fn needs_xbar(self) -> bool {
        matches!(
            self,
            EstimatorKind::Ratio | EstimatorKind::Regression | EstimatorKind::Class
        )
    }

    pub fn is_class(self) -> bool {
        matches!(self, EstimatorKind::Class | EstimatorKind::Class2p)
    }

    /// Evaluates the estimator on `s`. `xbar_pop` is required by the
    /// single-phase auxiliary estimators, `class` by the class estimators.
    pub fn evaluate(
        self,
        s: &DrawnSample,
        xbar_pop: Option<f64>,
        class: Option<&ClassParams>,
    ) -> Result<f64> {
        let need_xbar = || xbar_pop.ok_or(Error::XbarRequired);
        let need_class =
            || class.ok_or_else(|| Error::InvalidParams("class constants required".into()));
        match self {
            EstimatorKind::HhMean => hh_mean(s),
            EstimatorKind::Ratio => ratio_estimate(s, need_xbar()?),
            EstimatorKind::Regression => regression_estimate(s, need_xbar()?),
            EstimatorKind::Class => class_estimate(s, need_xbar()?, need_class()?),
            EstimatorKind::Ratio2p => ratio_estimate_2p(s),
            EstimatorKind::Regression2p => regression_estimate_2p(s),
            EstimatorKind::Class2p => class_estimate_2p(s, need_class()?),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<_> = EstimatorKind::ALL.iter().map(|k| k.label()).collect();
                Error::InvalidParams(format!(
                    "unknown estimator `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}
