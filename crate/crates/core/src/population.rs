//! Finite population model, exact parameter computation and synthetic
//! populations with prescribed moments.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Response-group membership of a population unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Group {
    Respondent,
    NonRespondent,
}

impl Group {
    pub fn label(self) -> &'static str {
        match self {
            Group::Respondent => "R",
            Group::NonRespondent => "NR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub y: f64,
    pub x: f64,
    pub group: Group,
}

/// Ordered collection of population units. Always holds at least one unit,
/// at least one respondent, and finite values only.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePopulation {
    units: Vec<Unit>,
}

impl FinitePopulation {
    pub fn new(units: Vec<Unit>) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::NoUnits);
        }
        if let Some(index) = units.iter().position(|u| !u.y.is_finite() || !u.x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if units.iter().all(|u| u.group == Group::NonRespondent) {
            return Err(Error::NoRespondents);
        }
        Ok(Self { units })
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn nonrespondent_count(&self) -> usize {
        self.units
            .iter()
            .filter(|u| u.group == Group::NonRespondent)
            .count()
    }

    pub fn y_mean(&self) -> f64 {
        mean(self.units.iter().map(|u| u.y))
    }

    /// Writes the population as `y,x,group` CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        wtr.write_record(["y", "x", "group"]).map_err(io)?;
        for u in &self.units {
            wtr.write_record([
                format!("{:?}", u.y),
                format!("{:?}", u.x),
                u.group.label().to_string(),
            ])
            .map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Population parameters entering every closed-form MSE expression.
///
/// Mean squares use the `N - 1` divisor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationParams {
    pub size: usize,
    pub y_mean: f64,
    pub x_mean: f64,
    pub s2_y: f64,
    pub s2_x: f64,
    pub cv_y: f64,
    pub cv_x: f64,
    pub rho: f64,
    pub w2: f64,
    pub s2_y2: f64,
}

impl PopulationParams {
    /// Builds a parameter set from mean squares; coefficients of variation
    /// are derived.
    #[allow(clippy::too_many_arguments)]
    pub fn from_mean_squares(
        size: usize,
        y_mean: f64,
        x_mean: f64,
        s2_y: f64,
        s2_x: f64,
        rho: f64,
        w2: f64,
        s2_y2: f64,
    ) -> Result<Self> {
        let p = Self {
            size,
            y_mean,
            x_mean,
            s2_y,
            s2_x,
            cv_y: s2_y.sqrt() / y_mean.abs(),
            cv_x: s2_x.sqrt() / x_mean.abs(),
            rho,
            w2,
            s2_y2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds a parameter set from coefficients of variation; mean squares
    /// are derived.
    #[allow(clippy::too_many_arguments)]
    pub fn from_cvs(
        size: usize,
        y_mean: f64,
        x_mean: f64,
        cv_y: f64,
        cv_x: f64,
        rho: f64,
        w2: f64,
        s2_y2: f64,
    ) -> Result<Self> {
        let p = Self {
            size,
            y_mean,
            x_mean,
            s2_y: (cv_y * y_mean).powi(2),
            s2_x: (cv_x * x_mean).powi(2),
            cv_y,
            cv_x,
            rho,
            w2,
            s2_y2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_w2(mut self, w2: f64) -> Result<Self> {
        self.w2 = w2;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        let all = [
            self.y_mean, self.x_mean, self.s2_y, self.s2_x, self.cv_y, self.cv_x, self.rho,
            self.w2, self.s2_y2,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all parameters must be finite");
        }
        if self.size == 0 {
            return bad("N must be positive");
        }
        if self.x_mean == 0.0 {
            return Err(Error::ZeroAuxiliaryMean);
        }
        if self.s2_y < 0.0 || self.s2_x < 0.0 || self.s2_y2 < 0.0 {
            return bad("mean squares must be non-negative");
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return bad("rho must lie in [-1, 1]");
        }
        if !(0.0..=1.0).contains(&self.w2) {
            return bad("W2 must lie in [0, 1]");
        }
        Ok(())
    }

    pub fn s_y(&self) -> f64 {
        self.s2_y.sqrt()
    }

    pub fn s_x(&self) -> f64 {
        self.s2_x.sqrt()
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    sum / count as f64
}

/// Round-half-up to an integer count.
pub fn round_half_up(value: f64) -> usize {
    (value + 0.5).floor().max(0.0) as usize
}

/// Exact population parameters.
pub fn compute_params(pop: &FinitePopulation) -> Result<PopulationParams> {
    let units = pop.units();
    let size = units.len();
    let nr: Vec<f64> = units
        .iter()
        .filter(|u| u.group == Group::NonRespondent)
        .map(|u| u.y)
        .collect();
    if nr.len() == size {
        return Err(Error::NoRespondents);
    }
    let y_mean = mean(units.iter().map(|u| u.y));
    let x_mean = mean(units.iter().map(|u| u.x));
    if x_mean == 0.0 {
        return Err(Error::ZeroAuxiliaryMean);
    }
    let divisor = size.saturating_sub(1).max(1) as f64;
    let (mut syy, mut sxx, mut sxy) = (0.0, 0.0, 0.0);
    for u in units {
        let dy = u.y - y_mean;
        let dx = u.x - x_mean;
        syy += dy * dy;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    let rho = if syy > 0.0 && sxx > 0.0 {
        (sxy / (syy.sqrt() * sxx.sqrt())).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let s2_y2 = if nr.len() > 1 {
        let m = mean(nr.iter().copied());
        nr.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (nr.len() - 1) as f64
    } else {
        0.0
    };
    let s2_y = syy / divisor;
    let s2_x = sxx / divisor;
    Ok(PopulationParams {
        size,
        y_mean,
        x_mean,
        s2_y,
        s2_x,
        cv_y: s2_y.sqrt() / y_mean.abs(),
        cv_x: s2_x.sqrt() / x_mean.abs(),
        rho,
        w2: nr.len() as f64 / size as f64,
        s2_y2,
    })
}

/// Relative error tolerated on the non-response-group mean square of a
/// synthesized population.
pub const S2_Y2_TOLERANCE: f64 = 0.05;

const GROUP_FIT_ROUNDS: usize = 200;
const SWAP_PASSES: usize = 64;

/// Generates a population whose parameters match `target`.
///
/// `N` and `W2` are hit exactly, the overall means, mean squares and
/// correlation to round-off, and `S2_Y2` to within [`S2_Y2_TOLERANCE`].
pub fn synthesize_population(target: &PopulationParams, seed: u64) -> Result<FinitePopulation> {
    let infeasible = |m: String| Err(Error::InfeasibleTarget(m));
    target
        .validate()
        .map_err(|e| Error::InfeasibleTarget(e.to_string()))?;
    let size = target.size;
    if size < 4 {
        return infeasible(format!("N = {size} is below the minimum of 4"));
    }
    if target.w2 >= 1.0 {
        return infeasible("W2 must be below 1".into());
    }
    let n_nr = round_half_up(target.w2 * size as f64);
    if n_nr >= size {
        return infeasible(format!(
            "W2 = {} rounds to {n_nr} non-respondents out of {size}, leaving no respondents",
            target.w2
        ));
    }
    if n_nr < 2 && target.s2_y2 > 0.0 {
        return infeasible(format!(
            "W2*N = {} gives {n_nr} non-respondent unit(s); a positive S2_Y2 needs at least 2",
            target.w2 * size as f64
        ));
    }
    if n_nr >= 2 && (n_nr - 1) as f64 * target.s2_y2 >= (size - 1) as f64 * target.s2_y {
        return infeasible(format!(
            "S2_Y2 = {} is too large: the non-response group sum of squares would reach the total",
            target.s2_y2
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y: Vec<f64> = (0..size).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut x: Vec<f64> = (0..size).map(|_| StandardNormal.sample(&mut rng)).collect();
    impose_moments(&mut y, &mut x, target)?;

    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(&mut rng);
    let mut in_group = vec![false; size];
    for &i in &order[..n_nr] {
        in_group[i] = true;
    }

    if n_nr >= 2 {
        let target_ss = target.s2_y2 * (n_nr - 1) as f64;
        greedy_swap(&y, &mut in_group, target_ss);
        for _ in 0..GROUP_FIT_ROUNDS {
            let ss = group_sum_squares(&y, &in_group);
            if (ss - target_ss).abs() <= 1e-12 * target_ss.max(f64::MIN_POSITIVE) {
                break;
            }
            rescale_group(&mut y, &in_group, target_ss);
            impose_moments(&mut y, &mut x, target)?;
        }
        let achieved = group_sum_squares(&y, &in_group) / (n_nr - 1) as f64;
        let rel = if target.s2_y2 > 0.0 {
            (achieved - target.s2_y2).abs() / target.s2_y2
        } else {
            achieved / target.s2_y.max(f64::MIN_POSITIVE)
        };
        if rel > S2_Y2_TOLERANCE {
            return infeasible(format!(
                "could not match S2_Y2 = {} (achieved {achieved})",
                target.s2_y2
            ));
        }
    }

    let units = y
        .into_iter()
        .zip(x)
        .zip(in_group)
        .map(|((y, x), nr)| Unit {
            y,
            x,
            group: if nr { Group::NonRespondent } else { Group::Respondent },
        })
        .collect();
    FinitePopulation::new(units)
}

/// Maps `(y, x)` affinely onto the target means, mean squares and
/// correlation. The y map is affine, so group structure in y is preserved
/// up to scale.
fn impose_moments(y: &mut [f64], x: &mut [f64], target: &PopulationParams) -> Result<()> {
    let n = y.len();
    let df = (n - 1) as f64;
    let u = standardize(y).ok_or_else(|| {
        Error::InfeasibleTarget("generated study variable has zero spread".into())
    })?;
    let x_mean = x.iter().sum::<f64>() / n as f64;
    let mut resid: Vec<f64> = x.iter().map(|v| v - x_mean).collect();
    let proj = resid.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() / df;
    for (r, ui) in resid.iter_mut().zip(&u) {
        *r -= proj * ui;
    }
    let v = match standardize(&resid) {
        Some(v) => v,
        None if target.rho.abs() == 1.0 => vec![0.0; n],
        None => {
            return Err(Error::InfeasibleTarget(
                "auxiliary variable collinear with study variable".into(),
            ))
        }
    };
    let (sy, sx) = (target.s_y(), target.s_x());
    let orth = (1.0 - target.rho * target.rho).max(0.0).sqrt();
    for i in 0..n {
        y[i] = target.y_mean + sy * u[i];
        x[i] = target.x_mean + sx * (target.rho * u[i] + orth * v[i]);
    }
    Ok(())
}

/// Centres and scales to unit mean square; `None` for a constant vector.
fn standardize(values: &[f64]) -> Option<Vec<f64>> {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let centred: Vec<f64> = values.iter().map(|v| v - m).collect();
    let ss = centred.iter().map(|c| c * c).sum::<f64>();
    let sd = (ss / (n - 1.0)).sqrt();
    if !(sd > 1e-300) {
        return None;
    }
    // second pass removes the residual mean left by round-off
    let m2 = centred.iter().sum::<f64>() / n;
    Some(centred.iter().map(|c| (c - m2) / sd).collect())
}

fn group_sum_squares(y: &[f64], in_group: &[bool]) -> f64 {
    let vals: Vec<f64> = y
        .iter()
        .zip(in_group)
        .filter(|(_, &g)| g)
        .map(|(v, _)| *v)
        .collect();
    let m = vals.iter().sum::<f64>() / vals.len() as f64;
    vals.iter().map(|v| (v - m).powi(2)).sum()
}

fn rescale_group(y: &mut [f64], in_group: &[bool], target_ss: f64) {
    let ss = group_sum_squares(y, in_group);
    let count = in_group.iter().filter(|&&g| g).count() as f64;
    let m = y
        .iter()
        .zip(in_group)
        .filter(|(_, &g)| g)
        .map(|(v, _)| *v)
        .sum::<f64>()
        / count;
    let factor = if ss > 0.0 { (target_ss / ss).sqrt() } else { 1.0 };
    for (v, &g) in y.iter_mut().zip(in_group) {
        if g {
            *v = m + (*v - m) * factor;
        }
    }
}

/// Swaps group members with outsiders while that brings the group sum of
/// squares closer to `target_ss`.
fn greedy_swap(y: &[f64], in_group: &mut [bool], target_ss: f64) {
    let count = in_group.iter().filter(|&&g| g).count() as f64;
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for (v, &g) in y.iter().zip(in_group.iter()) {
        if g {
            sum += v;
            sumsq += v * v;
        }
    }
    let ss_of = |s: f64, q: f64| q - s * s / count;
    for _ in 0..SWAP_PASSES {
        let current = (ss_of(sum, sumsq) - target_ss).abs();
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, &gi) in in_group.iter().enumerate() {
            if !gi {
                continue;
            }
            for (j, &gj) in in_group.iter().enumerate() {
                if gj {
                    continue;
                }
                let s = sum - y[i] + y[j];
                let q = sumsq - y[i] * y[i] + y[j] * y[j];
                let gap = (ss_of(s, q) - target_ss).abs();
                if gap < best.map_or(current, |b| b.2) {
                    best = Some((i, j, gap));
                }
            }
        }
        match best {
            Some((i, j, gap)) => {
                in_group[i] = false;
                in_group[j] = true;
                sum += y[j] - y[i];
                sumsq += y[j] * y[j] - y[i] * y[i];
                if gap <= 1e-3 * target_ss {
                    break;
                }
            }
            None => break,
        }
    }
}

/// Parses a `y,x[,group]` CSV stream. Without a group column every unit is
/// a respondent.
pub fn load_population<R: Read>(source: R) -> Result<FinitePopulation> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::NoUnits);
    }
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let missing = |name: &str| Error::Parse {
        line: 1,
        message: format!("missing column `{name}`"),
    };
    let y_col = column("y").ok_or_else(|| missing("y"))?;
    let x_col = column("x").ok_or_else(|| missing("x"))?;
    let group_col = column("group");

    let mut units = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |col: usize, name: &str| -> Result<f64> {
            let raw = record.get(col).unwrap_or("");
            raw.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("non-numeric {name} value `{raw}`"),
            })
        };
        let y = field(y_col, "y")?;
        let x = field(x_col, "x")?;
        let group = match group_col.map(|c| record.get(c).unwrap_or("")) {
            None => Group::Respondent,
            Some(label) if label.eq_ignore_ascii_case("R") => Group::Respondent,
            Some(label) if label.eq_ignore_ascii_case("NR") => Group::NonRespondent,
            Some(label) => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown group label `{label}` (expected R or NR)"),
                })
            }
        };
        units.push(Unit { y, x, group });
    }
    FinitePopulation::new(units)
}
