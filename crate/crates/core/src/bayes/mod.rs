//! Bayesian checks over joint distributions of claims sets.
//!
//! A [`ClaimJoint`] is a distribution over the claims sets an NDR machine
//! ends up with (optionally conditioned on passage through a claims list).
//! "`v = t` for `q`" is the event that an outcome contains `(q, t)`; "`v ≠ t`"
//! is the event that it answers `q` with any other valence.
//!
//! Checks on exact joints are assertable at [`EXACT_TOL`]. Joints tabulated
//! from an ensemble are report-only: their margins are compared against three
//! binomial standard errors and [`AbductionReport::assertable`] is false.

mod paths;
mod random;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::estimation::{Ensemble, EstimationError, ExactChain};
use crate::formal_system::{Claim, ClaimsList, ClaimsSet, Question, Valence};

pub use paths::{monotonicity_check, posterior_product, proof_path_coefficients, Monotonicity, ProofPathReport};
pub use random::{product_joint, random_answer_joint, random_path_joint};

pub const EXACT_TOL: f64 = 1e-12;
/// Slack allowed on total mass and on probability-1 occurrence.
pub const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BayesError {
    #[error("{question} occurs with probability {probability}, not 1")]
    PrecedenceViolated { question: Question, probability: f64 },
    #[error("conditioning event {0} has probability 0")]
    ConditioningUndefined(ClaimsSet),
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("path claim {0} lies in the conditioning list")]
    PathInConditioning(Claim),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Written down directly (tests, fixtures, random generators).
    Given,
    ExactChain { horizon: u64 },
    Empirical { horizon: u64, replicas: u64 },
}

impl Provenance {
    pub fn is_exact(&self) -> bool {
        !matches!(self, Provenance::Empirical { .. })
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Given => write!(f, "given"),
            Provenance::ExactChain { horizon } => write!(f, "exact-chain(k={horizon})"),
            Provenance::Empirical { horizon, replicas } => write!(f, "empirical(k={horizon}, N={replicas})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimJoint {
    outcomes: BTreeMap<ClaimsSet, f64>,
    provenance: Provenance,
    conditioning: Option<ClaimsList>,
}

impl ClaimJoint {
    /// Duplicate outcomes are merged. Weights must be finite, non-negative
    /// and sum to at most `1 + MASS_TOL`.
    pub fn new(outcomes: impl IntoIterator<Item = (ClaimsSet, f64)>, provenance: Provenance) -> Result<Self, BayesError> {
        let mut merged: BTreeMap<ClaimsSet, f64> = BTreeMap::new();
        for (set, p) in outcomes {
            if !p.is_finite() || p < 0.0 {
                return Err(BayesError::InvalidWeights(format!("{set} has weight {p}")));
            }
            *merged.entry(set).or_default() += p;
        }
        let total: f64 = merged.values().sum();
        if total > 1.0 + MASS_TOL {
            return Err(BayesError::InvalidWeights(format!("total mass {total} exceeds 1")));
        }
        Ok(ClaimJoint {
            outcomes: merged,
            provenance,
            conditioning: None,
        })
    }

    /// The horizon distribution of `chain`, conditioned on passage through
    /// `list` if given (which `chain` must watch).
    pub fn from_exact_chain(chain: &ExactChain<'_>, list: Option<&ClaimsList>) -> Result<Self, BayesError> {
        let lists = chain.conditioned_lists(list)?;
        let mut joint = Self::new(
            lists.into_iter().map(|(l, p)| (l.to_set(), p)),
            Provenance::ExactChain {
                horizon: chain.horizon(),
            },
        )?;
        joint.conditioning = list.cloned();
        Ok(joint)
    }

    /// Empirical frequencies of the replicas' horizon claims sets, restricted
    /// to replicas that passed through `list` if given.
    pub fn from_ensemble(ensemble: &Ensemble, list: Option<&ClaimsList>) -> Result<Self, BayesError> {
        let watch = list
            .map(|l| {
                ensemble
                    .watched
                    .iter()
                    .position(|w| w == l)
                    .ok_or_else(|| EstimationError::InvalidArgument(format!("claims list {l} was not watched")))
            })
            .transpose()?;
        let mut counts: BTreeMap<ClaimsSet, u64> = BTreeMap::new();
        for r in &ensemble.replicas {
            if watch.map_or(true, |i| r.passed[i]) {
                *counts.entry(r.claims.to_set()).or_default() += 1;
            }
        }
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(EstimationError::ConditioningListNeverReached(list.cloned().unwrap_or_default()).into());
        }
        let mut joint = Self::new(
            counts.into_iter().map(|(s, c)| (s, c as f64 / total as f64)),
            Provenance::Empirical {
                horizon: ensemble.horizon,
                replicas: total,
            },
        )?;
        joint.conditioning = list.cloned();
        Ok(joint)
    }

    pub fn outcomes(&self) -> &BTreeMap<ClaimsSet, f64> {
        &self.outcomes
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn conditioning(&self) -> Option<&ClaimsList> {
        self.conditioning.as_ref()
    }

    pub fn total_mass(&self) -> f64 {
        self.outcomes.values().sum()
    }

    /// Mass of outcomes containing every claim of `c`.
    pub fn probability(&self, c: &ClaimsSet) -> f64 {
        self.outcomes.iter().filter(|(s, _)| c.is_subset(s)).map(|(_, p)| p).sum()
    }

    /// Mass of outcomes answering `q`.
    pub fn occurrence(&self, q: &Question) -> f64 {
        self.outcomes.iter().filter(|(s, _)| s.answers(q)).map(|(_, p)| p).sum()
    }

    pub fn conditional(&self, event: &ClaimsSet, given: &ClaimsSet) -> Result<f64, BayesError> {
        let denom = self.probability(given);
        if denom == 0.0 {
            return Err(BayesError::ConditioningUndefined(given.clone()));
        }
        Ok(self.probability(&event.union(given)) / denom)
    }

    /// Masses of outcomes containing `given` that contain `(q, t)`, and that
    /// answer `q` with some other valence.
    pub fn split(&self, q: &Question, given: &ClaimsSet) -> (f64, f64) {
        let truth = q.claim(Valence::Theorem);
        let mut t = 0.0;
        let mut not_t = 0.0;
        for (s, p) in &self.outcomes {
            if !given.is_subset(s) {
                continue;
            }
            if s.contains(&truth) {
                t += p;
            }
            if s.answers_to(q).any(|c| c.valence != Valence::Theorem) {
                not_t += p;
            }
        }
        (t, not_t)
    }

    /// `P(v = t | q, given)`.
    pub fn posterior_true(&self, q: &Question, given: &ClaimsSet) -> Result<f64, BayesError> {
        let (t, not_t) = self.split(q, given);
        if t + not_t == 0.0 {
            return Err(BayesError::ConditioningUndefined(given.clone()));
        }
        Ok(t / (t + not_t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbductionReport {
    pub q: Question,
    pub q_prime: Question,
    /// `P(v=t | q, (q',t)) - P(v=t | q)`.
    pub premise_margin: f64,
    /// `P(v=t | q', (q,t)) - P(v=t | q')`.
    pub conclusion_margin: f64,
    pub premise_tolerance: f64,
    pub conclusion_tolerance: f64,
    pub premise_holds: bool,
    pub conclusion_holds: bool,
    /// False for empirical joints, whose strict inequalities are not asserted.
    pub assertable: bool,
}

impl AbductionReport {
    pub fn consistent(&self) -> bool {
        self.premise_holds == self.conclusion_holds
    }
}

impl fmt::Display for AbductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "question: {}", self.q)?;
        writeln!(f, "evidence question: {}", self.q_prime)?;
        writeln!(
            f,
            "premise: margin {:+.12e} (tol {:.3e}) holds={}",
            self.premise_margin, self.premise_tolerance, self.premise_holds
        )?;
        writeln!(
            f,
            "conclusion: margin {:+.12e} (tol {:.3e}) holds={}",
            self.conclusion_margin, self.conclusion_tolerance, self.conclusion_holds
        )?;
        writeln!(f, "mode: {}", if self.assertable { "assert" } else { "report-only" })?;
        write!(f, "consistent: {}", self.consistent())
    }
}

/// Standard error of a difference of two proportions estimated from
/// `replicas * mass` samples each.
fn difference_sigma(p1: f64, mass1: f64, p0: f64, replicas: u64) -> f64 {
    let n1 = replicas as f64 * mass1;
    let n0 = replicas as f64;
    (p1 * (1.0 - p1) / n1 + p0 * (1.0 - p0) / n0).sqrt()
}

/// Compares how evidence that `q'` is a theorem moves the posterior of `q`,
/// and vice versa. Both questions must be answered with probability 1.
pub fn check_abduction(joint: &ClaimJoint, q: &Question, q_prime: &Question) -> Result<AbductionReport, BayesError> {
    for question in [q, q_prime] {
        let probability = joint.occurrence(question);
        if probability < 1.0 - MASS_TOL {
            return Err(BayesError::PrecedenceViolated {
                question: question.clone(),
                probability,
            });
        }
    }
    let empty = ClaimsSet::new();
    let side = |subject: &Question, evidence: &Question| -> Result<(f64, f64), BayesError> {
        let given = ClaimsSet::new().with(evidence.claim(Valence::Theorem));
        let prior = joint.posterior_true(subject, &empty)?;
        let post = joint.posterior_true(subject, &given)?;
        let tol = match joint.provenance {
            Provenance::Empirical { replicas, .. } => {
                3.0 * difference_sigma(post, joint.probability(&given), prior, replicas)
            }
            _ => EXACT_TOL,
        };
        Ok((post - prior, tol))
    };
    let (premise_margin, premise_tolerance) = side(q, q_prime)?;
    let (conclusion_margin, conclusion_tolerance) = side(q_prime, q)?;
    Ok(AbductionReport {
        q: q.clone(),
        q_prime: q_prime.clone(),
        premise_margin,
        conclusion_margin,
        premise_tolerance,
        conclusion_tolerance,
        premise_holds: premise_margin > premise_tolerance,
        conclusion_holds: conclusion_margin > conclusion_tolerance,
        assertable: joint.provenance.is_exact(),
    })
}

#[cfg(test)]
mod tests;
