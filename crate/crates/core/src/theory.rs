//! First-order bias and MSE expressions, optimum class constants and
//! percentage relative efficiency.
//!
//! Every function reads `N` from [`PopulationParams::size`]. Sample sizes
//! are taken as given; callers validate them against a [`Design`].
//!
//! Two-phase expressions use `1/n' - 1/N` for the phase-one term and
//! `1/n - 1/n'` for every term driven by the phase gap `xbar' - xbar`.
//! With `n' = N` they collapse to their single-phase counterparts.

use serde::{Deserialize, Serialize};

use crate::design::Design;
use crate::error::{Error, Result};
use crate::estimators::{ClassParams, ClassShape, EstimatorKind};
use crate::population::PopulationParams;

/// An MSE (or variance) with its additive parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsePiece {
    pub value: f64,
    pub components: Vec<(String, f64)>,
}

impl MsePiece {
    fn from_parts(parts: &[(&str, f64)]) -> Self {
        Self {
            value: parts.iter().map(|(_, v)| v).sum(),
            components: parts.iter().map(|(l, v)| (l.to_string(), *v)).collect(),
        }
    }

    pub fn component(&self, label: &str) -> Option<f64> {
        self.components
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| *v)
    }
}

pub const SAMPLING: &str = "sampling";
pub const PHASE_ONE: &str = "phase_one";
pub const PHASE_TWO: &str = "phase_two";
pub const NON_RESPONSE: &str = "non_response";

fn fpc(n: usize, big_n: usize) -> f64 {
    1.0 / n as f64 - 1.0 / big_n as f64
}

/// Phase-gap factor `1/n - 1/n'`.
fn gap(n_prime: usize, n: usize) -> f64 {
    1.0 / n as f64 - 1.0 / n_prime as f64
}

/// `(k - 1)/n * W2 * S2_Y2`, the variance added by sub-sampling the
/// non-respondents.
pub fn nonresponse_term(p: &PopulationParams, n: usize, k: f64) -> f64 {
    (k - 1.0) / n as f64 * p.w2 * p.s2_y2
}

/// Expansion coefficient `eta * Xbar / (eta * Xbar + lambda)`.
pub fn tau(eta: f64, lambda: f64, xbar: f64) -> Result<f64> {
    if eta == 0.0 {
        return Err(Error::InvalidParams("eta must be non-zero".into()));
    }
    let denom = eta * xbar + lambda;
    if denom == 0.0 {
        return Err(Error::ClassPole);
    }
    Ok(eta * xbar / denom)
}

fn ratio_shape(p: &PopulationParams) -> f64 {
    p.cv_y.powi(2) + p.cv_x.powi(2) - 2.0 * p.rho * p.cv_x * p.cv_y
}

fn regression_shape(p: &PopulationParams) -> f64 {
    p.cv_y.powi(2) * (1.0 - p.rho * p.rho)
}

/// Variance of the Hansen-Hurwitz mean.
pub fn var_hh(p: &PopulationParams, n: usize, k: f64) -> MsePiece {
    MsePiece::from_parts(&[
        (SAMPLING, fpc(n, p.size) * p.s2_y),
        (NON_RESPONSE, nonresponse_term(p, n, k)),
    ])
}

pub fn mse_ratio(p: &PopulationParams, n: usize, k: f64) -> MsePiece {
    MsePiece::from_parts(&[
        (SAMPLING, fpc(n, p.size) * p.y_mean.powi(2) * ratio_shape(p)),
        (NON_RESPONSE, nonresponse_term(p, n, k)),
    ])
}

pub fn mse_regression(p: &PopulationParams, n: usize, k: f64) -> MsePiece {
    MsePiece::from_parts(&[
        (SAMPLING, fpc(n, p.size) * p.y_mean.powi(2) * regression_shape(p)),
        (NON_RESPONSE, nonresponse_term(p, n, k)),
    ])
}

pub fn mse_ratio_2p(p: &PopulationParams, n_prime: usize, n: usize, k: f64) -> MsePiece {
    let y2 = p.y_mean.powi(2);
    MsePiece::from_parts(&[
        (PHASE_ONE, y2 * fpc(n_prime, p.size) * p.cv_y.powi(2)),
        (PHASE_TWO, y2 * gap(n_prime, n) * ratio_shape(p)),
        (NON_RESPONSE, nonresponse_term(p, n, k)),
    ])
}

pub fn mse_regression_2p(p: &PopulationParams, n_prime: usize, n: usize, k: f64) -> MsePiece {
    let y2 = p.y_mean.powi(2);
    MsePiece::from_parts(&[
        (PHASE_ONE, y2 * fpc(n_prime, p.size) * p.cv_y.powi(2)),
        (PHASE_TWO, y2 * gap(n_prime, n) * regression_shape(p)),
        (NON_RESPONSE, nonresponse_term(p, n, k)),
    ])
}

pub fn bias_class(p: &PopulationParams, n: usize, cp: &ClassParams) -> Result<f64> {
    let t = tau(cp.eta, cp.lambda, p.x_mean)?;
    let (cx, cy) = (p.cv_x, p.cv_y);
    Ok(p.y_mean * (cp.alpha1 - 1.0)
        + fpc(n, p.size)
            * (cp.alpha1 * p.y_mean * (t * t * cx * cx - t * p.rho * cx * cy)
                + cp.alpha2 * p.x_mean * t * cx * cx))
}

pub fn mse_class(p: &PopulationParams, n: usize, k: f64, cp: &ClassParams) -> Result<f64> {
    let t = tau(cp.eta, cp.lambda, p.x_mean)?;
    let (a1, a2) = (cp.alpha1, cp.alpha2);
    let (yb, xb, cx, cy, rho) = (p.y_mean, p.x_mean, p.cv_x, p.cv_y, p.rho);
    let f = fpc(n, p.size);
    Ok(yb * yb * (a1 - 1.0).powi(2)
        + f * (a1 * a1 * yb * yb * (cy * cy + t * t * cx * cx - 2.0 * t * rho * cx * cy)
            + a2 * a2 * xb * xb * cx * cx
            - 2.0 * a1 * a2 * yb * xb * cx * (rho * cy - t * cx))
        + a1 * a1 * nonresponse_term(p, n, k))
}

/// Half-gradient of [`mse_class`] in `(alpha1, alpha2)`; both entries vanish
/// at the optimum.
pub fn mse_class_gradient(
    p: &PopulationParams,
    n: usize,
    k: f64,
    cp: &ClassParams,
) -> Result<[f64; 2]> {
    let t = tau(cp.eta, cp.lambda, p.x_mean)?;
    let (a1, a2) = (cp.alpha1, cp.alpha2);
    let (yb, xb, cx, cy, rho) = (p.y_mean, p.x_mean, p.cv_x, p.cv_y, p.rho);
    let f = fpc(n, p.size);
    let d1 = yb * yb * (a1 - 1.0)
        + f * (yb * yb * a1 * (cy * cy + t * t * cx * cx - 2.0 * t * rho * cx * cy)
            - a2 * xb * yb * cx * (rho * cy - t * cx))
        + a1 * nonresponse_term(p, n, k);
    let d2 = f * (a2 * xb * xb * cx * cx - a1 * xb * yb * cx * (rho * cy - t * cx));
    Ok([d1, d2])
}

fn require_cv_x(p: &PopulationParams) -> Result<()> {
    if !(p.cv_x > 0.0) {
        return Err(Error::InvalidParams(
            "optimum constants need C_X > 0".into(),
        ));
    }
    Ok(())
}

fn optimum_alpha2(p: &PopulationParams, alpha1: f64, t: f64) -> f64 {
    alpha1 * p.y_mean * (p.rho * p.cv_y - t * p.cv_x) / (p.x_mean * p.cv_x)
}

/// Denominator `1 + (1/n - 1/N) C_Y^2 (1 - rho^2) + (k-1)/n W2 S2_Y2 / Ybar^2`.
fn optimum_denominator(p: &PopulationParams, n: usize, k: f64) -> f64 {
    1.0 + fpc(n, p.size) * regression_shape(p) + nonresponse_term(p, n, k) / p.y_mean.powi(2)
}

/// Constants minimising [`mse_class`] for the given `(eta, lambda)`.
pub fn optimum_alphas(
    p: &PopulationParams,
    n: usize,
    k: f64,
    shape: ClassShape,
) -> Result<(f64, f64)> {
    require_cv_x(p)?;
    let t = tau(shape.eta, shape.lambda, p.x_mean)?;
    let alpha1 = 1.0 / optimum_denominator(p, n, k);
    Ok((alpha1, optimum_alpha2(p, alpha1, t)))
}

/// Minimum of [`mse_class`] over the constants; the same for every shape.
pub fn min_mse_class(p: &PopulationParams, n: usize, k: f64) -> Result<f64> {
    require_cv_x(p)?;
    Ok(mse_regression(p, n, k).value / optimum_denominator(p, n, k))
}

pub fn bias_class_2p(
    p: &PopulationParams,
    n_prime: usize,
    n: usize,
    cp: &ClassParams,
) -> Result<f64> {
    let t = tau(cp.eta, cp.lambda, p.x_mean)?;
    let (cx, cy) = (p.cv_x, p.cv_y);
    Ok(p.y_mean * (cp.alpha1 - 1.0)
        + gap(n_prime, n)
            * t
            * (cp.alpha1 * p.y_mean * (t * cx * cx - p.rho * cx * cy)
                + cp.alpha2 * p.x_mean * cx * cx))
}

pub fn mse_class_2p(
    p: &PopulationParams,
    n_prime: usize,
    n: usize,
    k: f64,
    cp: &ClassParams,
) -> Result<f64> {
    let t = tau(cp.eta, cp.lambda, p.x_mean)?;
    let (a1, a2) = (cp.alpha1, cp.alpha2);
    let (yb, xb, cx, cy, rho) = (p.y_mean, p.x_mean, p.cv_x, p.cv_y, p.rho);
    let g = gap(n_prime, n);
    Ok(yb * yb * (a1 - 1.0).powi(2)
        + a1 * a1
            * yb
            * yb
            * (fpc(n, p.size) * cy * cy
                + g * (t * t * cx * cx - 2.0 * t * rho * cx * cy)
                + nonresponse_term(p, n, k) / (yb * yb))
        + g * (a2 * a2 * xb * xb * cx * cx + 2.0 * a1 * a2 * xb * yb * (t * cx * cx - rho * cx * cy)))
}

/// Half-gradient of [`mse_class_2p`] in `(alpha1, alpha2)`.
pub fn mse_class_2p_gradient(
    p: &PopulationParams,
    n_prime: usize,
    n: usize,
    k: f64,
    cp: &ClassParams,
) -> Result<[f64; 2]> {
    let t = tau(cp.eta, cp.lambda, p.x_mean)?;
    let (a1, a2) = (cp.alpha1, cp.alpha2);
    let (yb, xb, cx, cy, rho) = (p.y_mean, p.x_mean, p.cv_x, p.cv_y, p.rho);
    let g = gap(n_prime, n);
    let d1 = yb * yb * (a1 - 1.0)
        + a1 * yb
            * yb
            * (fpc(n, p.size) * cy * cy
                + g * (t * t * cx * cx - 2.0 * t * rho * cx * cy)
                + nonresponse_term(p, n, k) / (yb * yb))
        + g * a2 * xb * yb * (t * cx * cx - rho * cx * cy);
    let d2 = g * (a2 * xb * xb * cx * cx + a1 * xb * yb * (t * cx * cx - rho * cx * cy));
    Ok([d1, d2])
}

/// `1 + (1/n - 1/N) C_Y^2 - (1/n - 1/n') rho^2 C_Y^2 + (k-1)/n W2 S2_Y2 / Ybar^2`.
fn optimum_denominator_2p(p: &PopulationParams, n_prime: usize, n: usize, k: f64) -> f64 {
    let cy2 = p.cv_y.powi(2);
    1.0 + fpc(n, p.size) * cy2 - gap(n_prime, n) * p.rho * p.rho * cy2
        + nonresponse_term(p, n, k) / p.y_mean.powi(2)
}

pub fn optimum_alphas_2p(
    p: &PopulationParams,
    n_prime: usize,
    n: usize,
    k: f64,
    shape: ClassShape,
) -> Result<(f64, f64)> {
    require_cv_x(p)?;
    let t = tau(shape.eta, shape.lambda, p.x_mean)?;
    let alpha1 = 1.0 / optimum_denominator_2p(p, n_prime, n, k);
    Ok((alpha1, optimum_alpha2(p, alpha1, t)))
}

pub fn min_mse_class_2p(p: &PopulationParams, n_prime: usize, n: usize, k: f64) -> Result<f64> {
    require_cv_x(p)?;
    Ok(mse_regression_2p(p, n_prime, n, k).value / optimum_denominator_2p(p, n_prime, n, k))
}

/// Percentage relative efficiency `100 * baseline / estimator`.
pub fn pre(mse_estimator: f64, mse_baseline: f64) -> Result<f64> {
    if !(mse_estimator > 0.0) {
        return Err(Error::InvalidParams(format!(
            "estimator MSE must be positive, got {mse_estimator}"
        )));
    }
    Ok(100.0 * mse_baseline / mse_estimator)
}

/// Optimum class constants for whichever phase structure `design` has.
pub fn optimum_for_design(
    p: &PopulationParams,
    design: &Design,
    shape: ClassShape,
) -> Result<ClassParams> {
    let (a1, a2) = match design.n_prime() {
        None => optimum_alphas(p, design.n(), design.k, shape)?,
        Some(np) => optimum_alphas_2p(p, np, design.n(), design.k, shape)?,
    };
    shape.with_alphas(a1, a2)
}

/// First-order MSE of `kind` under `design`. `None` when the estimator does
/// not belong to the design's phase structure (or no class constants are
/// supplied for a class estimator).
pub fn theoretical_mse(
    kind: EstimatorKind,
    p: &PopulationParams,
    design: &Design,
    class: Option<&ClassParams>,
) -> Option<Result<f64>> {
    let (n, k) = (design.n(), design.k);
    match (kind, design.n_prime()) {
        (EstimatorKind::HhMean, _) => Some(Ok(var_hh(p, n, k).value)),
        (EstimatorKind::Ratio, None) => Some(Ok(mse_ratio(p, n, k).value)),
        (EstimatorKind::Regression, None) => Some(Ok(mse_regression(p, n, k).value)),
        (EstimatorKind::Class, None) => class.map(|cp| mse_class(p, n, k, cp)),
        (EstimatorKind::Ratio2p, Some(np)) => Some(Ok(mse_ratio_2p(p, np, n, k).value)),
        (EstimatorKind::Regression2p, Some(np)) => Some(Ok(mse_regression_2p(p, np, n, k).value)),
        (EstimatorKind::Class2p, Some(np)) => class.map(|cp| mse_class_2p(p, np, n, k, cp)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Table 1 population: N = 200, n = 50, Ybar = 500, Xbar = 25,
    /// C_Y = 15, C_X = 2, rho = 0.9, S2_Y2 = 0.8 S2_Y.
    fn table1(w2: f64) -> PopulationParams {
        PopulationParams::from_cvs(200, 500.0, 25.0, 15.0, 2.0, 0.9, w2, 0.8 * 5.625e7).unwrap()
    }

    fn data_set_1(w2: f64) -> PopulationParams {
        PopulationParams::from_mean_squares(
            70,
            981.29,
            1755.53,
            613.66f64.powi(2),
            1406.13f64.powi(2),
            0.778,
            w2,
            244.11f64.powi(2),
        )
        .unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn ratio_class(alpha1: f64, alpha2: f64) -> ClassParams {
        ClassParams::new(alpha1, alpha2, 1.0, 0.0).unwrap()
    }

    #[test]
    fn tau_cases() {
        assert_eq!(tau(1.0, 0.0, 25.0).unwrap(), 1.0);
        assert_eq!(tau(1.0, 25.0, 25.0).unwrap(), 0.5);
        assert!(tau(1.0, 25.0e6, 25.0).unwrap() < 1e-5);
        assert_eq!(tau(1.0, -25.0, 25.0), Err(Error::ClassPole));
        assert!(tau(0.0, 1.0, 25.0).is_err());
    }

    #[test]
    fn var_hh_cases() {
        let p = table1(0.1);
        let v = var_hh(&p, 50, 1.5);
        assert!(rel(v.value, 888_750.0) < 1e-12);
        assert!(rel(v.component(SAMPLING).unwrap(), 843_750.0) < 1e-12);
        assert!(rel(v.component(NON_RESPONSE).unwrap(), 45_000.0) < 1e-12);
        assert_eq!(var_hh(&p, 50, 1.0).component(NON_RESPONSE), Some(0.0));
        assert_eq!(var_hh(&p, 200, 1.0).value, 0.0);
    }

    #[test]
    fn ratio_and_regression_table1() {
        let p = table1(0.1);
        assert!(rel(mse_ratio(&p, 50, 1.5).value, 701_250.0) < 1e-12);
        assert!(rel(mse_regression(&p, 50, 1.5).value, 205_312.5) < 1e-12);
    }

    #[test]
    fn regression_without_correlation_matches_hh_sampling_term() {
        let p = PopulationParams { rho: 0.0, ..table1(0.2) };
        assert!(
            rel(
                mse_regression(&p, 50, 1.5).component(SAMPLING).unwrap(),
                var_hh(&p, 50, 1.5).component(SAMPLING).unwrap()
            ) < 1e-12
        );
    }

    #[test]
    fn perfect_proportionality_kills_ratio_sampling_term() {
        let p = PopulationParams::from_cvs(100, 10.0, 5.0, 0.3, 0.3, 1.0, 0.2, 1.0).unwrap();
        assert!(mse_ratio(&p, 20, 2.0).component(SAMPLING).unwrap().abs() < 1e-15);
    }

    #[test]
    fn components_sum_to_value() {
        let p = data_set_1(0.3);
        for piece in [
            var_hh(&p, 25, 1.5),
            mse_ratio(&p, 25, 1.5),
            mse_ratio_2p(&p, 40, 25, 1.5),
            mse_regression_2p(&p, 40, 25, 1.5),
        ] {
            let sum: f64 = piece.components.iter().map(|(_, v)| v).sum();
            assert!(rel(sum, piece.value) < 1e-12);
        }
    }

    #[test]
    fn optimum_table1() {
        let p = table1(0.1);
        let (a1, a2) = optimum_alphas(&p, 50, 1.5, ClassShape::default()).unwrap();
        // denominator 1 + 0.015 * 225 * 0.19 + 45000 / 250000 = 1.82125
        assert!(rel(a1, 1.0 / 1.82125) < 1e-12);
        assert!((a1 - 0.549074).abs() < 1e-6);
        assert!(rel(a2, a1 * 500.0 * 11.5 / 50.0) < 1e-12);
        assert!((a2 - 63.144).abs() < 1e-3);
        let min = min_mse_class(&p, 50, 1.5).unwrap();
        assert!((min - 205_312.5 / 1.82125).abs() < 1e-6);
        assert!((min - 112_731.0).abs() < 1.0);
        let at_opt = mse_class(&p, 50, 1.5, &ratio_class(a1, a2)).unwrap();
        assert!(rel(at_opt, min) < 1e-9);
    }

    #[test]
    fn optimum_without_nonresponse() {
        let p = table1(0.0);
        let (a1, _) = optimum_alphas(&p, 50, 3.0, ClassShape::default()).unwrap();
        assert!(rel(a1, 1.0 / (1.0 + 0.015 * 225.0 * 0.19)) < 1e-12);
        assert!(a1 < 1.0);
    }

    #[test]
    fn optimum_alpha2_vanishes_when_shapes_balance() {
        // rho * C_Y = tau * C_X with tau = 1
        let p = PopulationParams::from_cvs(100, 10.0, 5.0, 0.5, 0.25, 0.5, 0.2, 1.0).unwrap();
        let (_, a2) = optimum_alphas(&p, 20, 2.0, ClassShape::default()).unwrap();
        assert!(a2.abs() < 1e-15);
        let (_, a2) = optimum_alphas_2p(&p, 50, 20, 2.0, ClassShape::default()).unwrap();
        assert!(a2.abs() < 1e-15);
    }

    #[test]
    fn optimum_needs_auxiliary_spread() {
        let p = PopulationParams::from_cvs(100, 10.0, 5.0, 0.5, 0.0, 0.0, 0.2, 1.0).unwrap();
        assert!(optimum_alphas(&p, 20, 2.0, ClassShape::default()).is_err());
        assert!(min_mse_class_2p(&p, 50, 20, 2.0).is_err());
    }

    #[test]
    fn class_reduces_to_ratio_and_regression() {
        let p = table1(0.3);
        let ratio = mse_class(&p, 50, 1.5, &ratio_class(1.0, 0.0)).unwrap();
        assert!(rel(ratio, mse_ratio(&p, 50, 1.5).value) < 1e-12);
        // alpha1 = 1 with the regression-matching alpha2 completes the square
        for lambda in [0.0, 25.0, -10.0, 300.0] {
            let t = tau(1.0, lambda, p.x_mean).unwrap();
            let a2 = p.y_mean * (p.rho * p.cv_y - t * p.cv_x) / (p.x_mean * p.cv_x);
            let cp = ClassParams::new(1.0, a2, 1.0, lambda).unwrap();
            let m = mse_class(&p, 50, 1.5, &cp).unwrap();
            assert!(rel(m, mse_regression(&p, 50, 1.5).value) < 1e-10);
        }
    }

    #[test]
    fn class_2p_reduces_to_ratio_2p() {
        let p = data_set_1(0.2);
        let m = mse_class_2p(&p, 40, 25, 1.5, &ratio_class(1.0, 0.0)).unwrap();
        assert!(rel(m, mse_ratio_2p(&p, 40, 25, 1.5).value) < 1e-12);
    }

    #[test]
    fn bias_class_cases() {
        let p = table1(0.1);
        // tau -> 0 limit
        let cp = ClassParams::new(1.0, 0.0, 1.0, 1e300).unwrap();
        assert!(bias_class(&p, 50, &cp).unwrap().abs() < 1e-200);
        let cp = ClassParams::new(1.0, 7.0, 1.0, 3.0).unwrap();
        assert_eq!(bias_class(&p, 200, &cp).unwrap(), 0.0);
    }

    #[test]
    fn bias_class_2p_cases() {
        let p = data_set_1(0.1);
        let cp = ClassParams::new(1.0, 3.0, 1.0, 0.0).unwrap();
        assert!(bias_class_2p(&p, 25, 25, &cp).unwrap().abs() < 1e-12);
        let (cx, cy) = (p.cv_x, p.cv_y);
        let a2 = -p.y_mean * (cx * cx - p.rho * cx * cy) / (p.x_mean * cx * cx);
        let cp = ClassParams::new(1.0, a2, 1.0, 0.0).unwrap();
        assert!(bias_class_2p(&p, 40, 25, &cp).unwrap().abs() < 1e-12);
    }

    #[test]
    fn data_set_1_two_phase() {
        let p = data_set_1(0.1);
        let v = var_hh(&p, 25, 1.5).value;
        let reg = mse_regression_2p(&p, 40, 25, 1.5).value;
        assert!((v - 9802.63).abs() < 0.01);
        assert!((reg - 6383.574).abs() < 1e-3);
        assert!((pre(reg, v).unwrap() - 153.56020).abs() < 0.01);
        let (a1, a2) = optimum_alphas_2p(&p, 40, 25, 1.5, ClassShape::default()).unwrap();
        assert!((1.0 / a1 - 1.006629).abs() < 1e-6);
        assert!((a1 - 0.993415).abs() < 1e-6);
        let min = min_mse_class_2p(&p, 40, 25, 1.5).unwrap();
        assert!((min - 6341.534).abs() < 1e-3);
        let at_opt = mse_class_2p(&p, 40, 25, 1.5, &ratio_class(a1, a2)).unwrap();
        assert!(rel(at_opt, min) < 1e-9);
        assert!((pre(min, v).unwrap() - 154.58).abs() < 0.01);
    }

    #[test]
    fn pre_cases() {
        assert_eq!(pre(3.0, 3.0).unwrap(), 100.0);
        assert!((pre(701_250.0, 888_750.0).unwrap() - 126.74).abs() < 0.01);
        assert!((pre(0.080364, 0.17507).unwrap() - 217.85).abs() < 0.01);
        assert!(pre(0.0, 1.0).is_err());
    }

    #[test]
    fn theoretical_mse_dispatch() {
        let p = data_set_1(0.1);
        let d2 = Design::two_phase(40, 25, 1.5);
        let got = theoretical_mse(EstimatorKind::Regression2p, &p, &d2, None)
            .unwrap()
            .unwrap();
        assert_eq!(got, mse_regression_2p(&p, 40, 25, 1.5).value);
        assert!(theoretical_mse(EstimatorKind::Ratio, &p, &d2, None).is_none());
        assert!(theoretical_mse(EstimatorKind::Class2p, &p, &d2, None).is_none());
        let cp = ratio_class(0.9, 0.1);
        let got = theoretical_mse(EstimatorKind::Class2p, &p, &d2, Some(&cp))
            .unwrap()
            .unwrap();
        assert_eq!(got, mse_class_2p(&p, 40, 25, 1.5, &cp).unwrap());
        let d1 = Design::single(25, 1.5);
        let got = theoretical_mse(EstimatorKind::Class, &p, &d1, Some(&cp))
            .unwrap()
            .unwrap();
        assert_eq!(got, mse_class(&p, 25, 1.5, &cp).unwrap());
    }
}
