//! Sampling plans and their random realization: SRSWOR, two-phase draws,
//! the non-response mechanism and sub-sampling of non-respondents.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::{round_half_up, FinitePopulation, Group};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    SinglePhase { n: usize },
    TwoPhase { n_prime: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NonResponseMode {
    /// A sampled unit responds iff its population group is `Respondent`.
    #[default]
    GroupDeterministic,
    /// Each sampled unit fails to respond independently with probability `p`.
    BernoulliPerUnit { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub phase: Phase,
    /// Sub-sampling factor: `h2 = n2 / k`.
    pub k: f64,
    #[serde(default)]
    pub nr_mode: NonResponseMode,
}

impl Design {
    pub fn single(n: usize, k: f64) -> Self {
        Self {
            phase: Phase::SinglePhase { n },
            k,
            nr_mode: NonResponseMode::GroupDeterministic,
        }
    }

    pub fn two_phase(n_prime: usize, n: usize, k: f64) -> Self {
        Self {
            phase: Phase::TwoPhase { n_prime, n },
            k,
            nr_mode: NonResponseMode::GroupDeterministic,
        }
    }

    /// Second-phase (study variable) sample size.
    pub fn n(&self) -> usize {
        match self.phase {
            Phase::SinglePhase { n } | Phase::TwoPhase { n, .. } => n,
        }
    }

    pub fn n_prime(&self) -> Option<usize> {
        match self.phase {
            Phase::SinglePhase { .. } => None,
            Phase::TwoPhase { n_prime, .. } => Some(n_prime),
        }
    }

    pub fn is_two_phase(&self) -> bool {
        matches!(self.phase, Phase::TwoPhase { .. })
    }

    pub fn validate(&self, population_size: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDesign(m));
        let big_n = population_size;
        match self.phase {
            Phase::SinglePhase { n } => {
                if n < 2 || n > big_n {
                    return bad(format!("need 2 <= n <= N, got n = {n}, N = {big_n}"));
                }
            }
            Phase::TwoPhase { n_prime, n } => {
                if n < 2 || n >= n_prime || n_prime > big_n {
                    return bad(format!(
                        "need 2 <= n < n' <= N, got n = {n}, n' = {n_prime}, N = {big_n}"
                    ));
                }
            }
        }
        if !(self.k >= 1.0) || !self.k.is_finite() {
            return bad(format!("sub-sampling factor k must be >= 1, got {}", self.k));
        }
        if let NonResponseMode::BernoulliPerUnit { p } = self.nr_mode {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("non-response probability must lie in [0, 1], got {p}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observed {
    pub y: f64,
    pub x: f64,
}

/// One realized sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawnSample {
    pub respondents: Vec<Observed>,
    /// The `h2` interviewed non-respondents.
    pub nonresp_sub: Vec<Observed>,
    /// Auxiliary values of the `n2 - h2` non-respondents left out of the
    /// sub-sample.
    pub nonresp_x_only: Vec<f64>,
    /// Phase-one auxiliary values (two-phase designs only).
    pub phase1_x: Option<Vec<f64>>,
    pub n1: usize,
    pub n2: usize,
    pub h2: usize,
}

impl DrawnSample {
    /// Builds a sample from its parts, checking the count invariants.
    pub fn new(
        respondents: Vec<Observed>,
        nonresp_sub: Vec<Observed>,
        nonresp_x_only: Vec<f64>,
        phase1_x: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n1 = respondents.len();
        let h2 = nonresp_sub.len();
        let n2 = h2 + nonresp_x_only.len();
        if n1 + n2 == 0 {
            return Err(Error::InvalidDesign("empty sample".into()));
        }
        if n2 > 0 && h2 == 0 {
            return Err(Error::InvalidDesign(
                "non-respondents present but none sub-sampled".into(),
            ));
        }
        if let Some(p1) = &phase1_x {
            if p1.len() <= n1 + n2 {
                return Err(Error::InvalidDesign(
                    "phase-one sample must be larger than the phase-two sample".into(),
                ));
            }
        }
        Ok(Self {
            respondents,
            nonresp_sub,
            nonresp_x_only,
            phase1_x,
            n1,
            n2,
            h2,
        })
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// True when no sampled unit responded.
    pub fn no_respondents(&self) -> bool {
        self.n1 == 0
    }

    /// Mean of the auxiliary variable over all `n` sampled units.
    pub fn x_mean(&self) -> f64 {
        let total: f64 = self.respondents.iter().map(|o| o.x).sum::<f64>()
            + self.nonresp_sub.iter().map(|o| o.x).sum::<f64>()
            + self.nonresp_x_only.iter().sum::<f64>();
        total / self.n() as f64
    }

    pub fn phase1_x_mean(&self) -> Option<f64> {
        self.phase1_x
            .as_ref()
            .map(|p| p.iter().sum::<f64>() / p.len() as f64)
    }

    /// Units with an observed study variable.
    pub fn y_observed(&self) -> impl Iterator<Item = &Observed> {
        self.respondents.iter().chain(self.nonresp_sub.iter())
    }
}

/// Sub-sample size for `n2` non-respondents under factor `k`.
pub fn subsample_size(n2: usize, k: f64) -> usize {
    if n2 == 0 {
        0
    } else {
        round_half_up(n2 as f64 / k).clamp(1, n2)
    }
}

/// Random stream for replication `index` under `master_seed`. Streams for
/// distinct indices are independent ChaCha streams over the same key.
pub fn replication_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Draws `n` distinct indices from `0..population_size`, every subset of
/// size `n` being equally likely.
pub fn draw_srswor<R: Rng + ?Sized>(
    population_size: usize,
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if n == 0 || n > population_size {
        return Err(Error::InvalidDesign(format!(
            "cannot draw {n} units from a population of {population_size}"
        )));
    }
    Ok(rand::seq::index::sample(rng, population_size, n).into_vec())
}

/// Draws one sample from `pop` under `design`.
pub fn realize<R: Rng + ?Sized>(
    design: &Design,
    pop: &FinitePopulation,
    rng: &mut R,
) -> Result<DrawnSample> {
    design.validate(pop.len())?;
    let units = pop.units();
    let (sample, phase1_x): (Vec<usize>, Option<Vec<f64>>) = match design.phase {
        Phase::SinglePhase { n } => (draw_srswor(units.len(), n, rng)?, None),
        Phase::TwoPhase { n_prime, n } => {
            let first = draw_srswor(units.len(), n_prime, rng)?;
            let second = draw_srswor(n_prime, n, rng)?
                .into_iter()
                .map(|i| first[i])
                .collect();
            let x1 = first.iter().map(|&i| units[i].x).collect();
            (second, Some(x1))
        }
    };

    let mut respondents = Vec::new();
    let mut nonresp = Vec::new();
    for &i in &sample {
        let u = units[i];
        let responds = match design.nr_mode {
            NonResponseMode::GroupDeterministic => u.group == Group::Respondent,
            NonResponseMode::BernoulliPerUnit { p } => !rng.gen_bool(p),
        };
        let obs = Observed { y: u.y, x: u.x };
        if responds {
            respondents.push(obs);
        } else {
            nonresp.push(obs);
        }
    }

    let n2 = nonresp.len();
    let h2 = subsample_size(n2, design.k);
    let mut nonresp_sub = Vec::with_capacity(h2);
    let mut nonresp_x_only = Vec::with_capacity(n2 - h2);
    if n2 > 0 {
        let mut picked = vec![false; n2];
        for j in draw_srswor(n2, h2, rng)? {
            picked[j] = true;
        }
        for (obs, chosen) in nonresp.into_iter().zip(picked) {
            if chosen {
                nonresp_sub.push(obs);
            } else {
                nonresp_x_only.push(obs.x);
            }
        }
    }

    Ok(DrawnSample {
        n1: respondents.len(),
        n2,
        h2,
        respondents,
        nonresp_sub,
        nonresp_x_only,
        phase1_x,
    })
}
