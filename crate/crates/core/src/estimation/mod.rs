//! Horizon-truncated estimates of claims and answer distributions.
//!
//! Limits over iterations are approximated at an explicit horizon `k`, and
//! every result carries that horizon. Two estimators share one tabulation
//! layer: [`Ensemble`] runs independent replicas (Monte Carlo), and
//! [`ExactChain`] propagates probability mass through the machine's Markov
//! chain (the brute-force oracle for small configurations).
//!
//! Answer distributions are ratios of containment weights: the weight of
//! outcomes containing `(q, v)` (together with any conditioning claims) over
//! the sum of those weights across all four `v`. A list-conditioned
//! estimate only counts outcomes whose claims tape equalled the conditioning
//! list exactly at some iteration before the horizon.

mod diagnostics;
mod ensemble;
mod exact;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formal_system::{ClaimsList, ClaimsSet, Question, Valence};
use crate::ndr_machine::NdrError;

pub use diagnostics::{
    check_marginal_consistency, check_marginal_consistency_sigma, convergence_diagnostic, limit_orderings,
    total_variation, ConvergenceReport, LimitGrid, MarginalReport,
};
pub use ensemble::{
    answer_distribution, detect_maximal, estimate_claims_distribution, generalized_answer_distribution,
    list_conditioned_answer_distribution, list_conditioned_claims_probability, simulate_pk, Ensemble, MaximalLists,
    ReplicaOutcome,
};
pub use exact::{exact_chain, ExactChain};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("no outcome answers {0}")]
    QuestionNeverAnswered(Question),
    #[error("no outcome answers {question} while containing {conditioning}")]
    ConditioningEventNeverObserved { question: Question, conditioning: ClaimsSet },
    #[error("no outcome passes through the claims list {0}")]
    ConditioningListNeverReached(ClaimsList),
    #[error("reachable state space exceeds the bound of {bound} states")]
    StateSpaceTooLarge { bound: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Machine(#[from] NdrError),
}

/// A proportion with its Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub count: u64,
    pub total: u64,
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Estimate {
    /// `count / total` with a Wilson interval at quantile `z`; `total > 0`.
    pub fn wilson(count: u64, total: u64, z: f64) -> Self {
        assert!(total > 0 && count <= total, "invalid proportion {count}/{total}");
        let n = total as f64;
        let p = count as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        let (mut lo, mut hi) = ((center - half).max(0.0), (center + half).min(1.0));
        // the interval always contains the point estimate; at p = 0 or 1
        // rounding can otherwise leave it a few ulps short
        if count == 0 {
            lo = 0.0;
        }
        if count == total {
            hi = 1.0;
        }
        Estimate { count, total, p, lo, hi }
    }

    pub fn wilson95(count: u64, total: u64) -> Self {
        Self::wilson(count, total, Z95)
    }

    pub fn covers(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// The first `n` claims of a horizon-`k` claims list, or the whole list if
/// it has fewer than `n` claims.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrefixOutcome {
    Prefix(ClaimsList),
    Short(ClaimsList),
}

impl PrefixOutcome {
    pub fn of(list: &ClaimsList, n: usize) -> Self {
        if list.len() >= n {
            PrefixOutcome::Prefix(ClaimsList(list.0[..n].to_vec()))
        } else {
            PrefixOutcome::Short(list.clone())
        }
    }

    /// The outcome for prefix length `n` implied by this outcome for a
    /// longer prefix length.
    pub fn truncate(&self, n: usize) -> Self {
        match self {
            PrefixOutcome::Prefix(l) | PrefixOutcome::Short(l) => PrefixOutcome::of(l, n),
        }
    }

    pub fn list(&self) -> &ClaimsList {
        match self {
            PrefixOutcome::Prefix(l) | PrefixOutcome::Short(l) => l,
        }
    }
}

impl fmt::Display for PrefixOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrefixOutcome::Prefix(l) => write!(f, "{l}"),
            PrefixOutcome::Short(l) => write!(f, "short:{l}"),
        }
    }
}

/// Empirical frequencies of the outcomes of `replicas` runs at `horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution<K: Ord> {
    pub support: BTreeMap<K, Estimate>,
    pub replicas: u64,
    pub horizon: u64,
}

impl<K: Ord + Clone> EmpiricalDistribution<K> {
    pub fn from_counts(counts: BTreeMap<K, u64>, replicas: u64, horizon: u64) -> Self {
        let support = counts
            .into_iter()
            .map(|(k, c)| (k, Estimate::wilson95(c, replicas)))
            .collect();
        EmpiricalDistribution {
            support,
            replicas,
            horizon,
        }
    }

    pub fn probability(&self, key: &K) -> f64 {
        self.support.get(key).map_or(0.0, |e| e.p)
    }

    pub fn probabilities(&self) -> BTreeMap<K, f64> {
        self.support.iter().map(|(k, e)| (k.clone(), e.p)).collect()
    }
}

/// What an answer distribution is conditioned on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conditioning {
    None,
    /// Outcomes must also contain these claims.
    Set(ClaimsSet),
    /// Outcomes must have passed through this claims list, and contain the
    /// claims set.
    List(ClaimsList, ClaimsSet),
}

impl fmt::Display for Conditioning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conditioning::None => write!(f, "none"),
            Conditioning::Set(c) => write!(f, "set:{c}"),
            Conditioning::List(l, c) if c.is_empty() => write!(f, "list:{l}"),
            Conditioning::List(l, c) => write!(f, "list:{l}+set:{c}"),
        }
    }
}

/// `P(v | q)` (optionally conditioned) at a horizon. Monte Carlo results
/// carry per-valence Wilson estimates; exact ones do not.
#[derive(Debug, Clone, PartialEq)]
pub struct AnswerDistribution {
    pub question: Question,
    pub conditioning: Conditioning,
    pub horizon: u64,
    pub probs: [f64; 4],
    pub estimates: Option<[Estimate; 4]>,
}

impl AnswerDistribution {
    pub fn prob(&self, v: Valence) -> f64 {
        self.probs[v.index()]
    }

    pub fn is_point_mass_on(&self, v: Valence) -> bool {
        self.probs[v.index()] == 1.0
    }
}

/// One tabulated outcome: a final claims list, whether it passed through
/// each watched list, and its weight (1 per replica, or a probability).
pub(crate) struct Weighted<'a> {
    pub list: &'a ClaimsList,
    pub passed: &'a [bool],
    pub weight: f64,
}

/// Containment weights of `(q, v)` for each `v`, restricted to outcomes
/// containing `given` and, if `watch` is set, passing through that list.
pub(crate) fn answer_weights<'a>(
    items: impl Iterator<Item = Weighted<'a>>,
    q: &Question,
    given: &ClaimsSet,
    watch: Option<usize>,
) -> [f64; 4] {
    let claims = Valence::ALL.map(|v| q.claim(v));
    let mut w = [0.0; 4];
    for item in items {
        if watch.is_some_and(|i| !item.passed[i]) || !item.list.contains_all(given) {
            continue;
        }
        for (slot, claim) in w.iter_mut().zip(&claims) {
            if item.list.contains(claim) {
                *slot += item.weight;
            }
        }
    }
    w
}

pub(crate) fn conditioning_for(given: &ClaimsSet, watch: Option<&ClaimsList>) -> Conditioning {
    match watch {
        Some(l) => Conditioning::List(l.clone(), given.clone()),
        None if given.is_empty() => Conditioning::None,
        None => Conditioning::Set(given.clone()),
    }
}

pub(crate) fn never_answered(q: &Question, given: &ClaimsSet, watch: Option<&ClaimsList>) -> EstimationError {
    match watch {
        Some(l) => EstimationError::ConditioningListNeverReached(l.clone()),
        None if given.is_empty() => EstimationError::QuestionNeverAnswered(q.clone()),
        None => EstimationError::ConditioningEventNeverObserved {
            question: q.clone(),
            conditioning: given.clone(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // reference values from statsmodels' proportion_confint(method="wilson")
        for (count, total, lo, hi) in [
            (8, 10, 0.49016247153664183, 0.9433178485456247),
            (3, 7, 0.15821985525146964, 0.7495416354723428),
            (0, 50, 0.0, 0.07134759913335874),
        ] {
            let e = Estimate::wilson95(count, total);
            assert!((e.lo - lo).abs() < 1e-12 && (e.hi - hi).abs() < 1e-12, "{e:?}");
        }
        let zero = Estimate::wilson95(0, 50);
        assert_eq!(zero.lo, 0.0);
        assert!(zero.hi > 0.0 && zero.hi < 0.1);
        let all = Estimate::wilson95(50, 50);
        assert_eq!(all.hi, 1.0);
        assert!(all.covers(1.0) && zero.covers(0.0));
    }

    #[test]
    fn prefix_outcomes_truncate() {
        let l: ClaimsList = "[S:a/t;S:b/a;S:c/u]".parse().unwrap();
        assert_eq!(PrefixOutcome::of(&l, 2), PrefixOutcome::Prefix("[S:a/t;S:b/a]".parse().unwrap()));
        assert_eq!(PrefixOutcome::of(&l, 4), PrefixOutcome::Short(l.clone()));
        assert_eq!(PrefixOutcome::of(&l, 4).truncate(3), PrefixOutcome::Prefix(l.clone()));
        assert_eq!(PrefixOutcome::of(&l, 3).truncate(0), PrefixOutcome::Prefix(ClaimsList::new()));
        assert_eq!(PrefixOutcome::of(&l, 4).to_string(), "short:[S:a/t;S:b/a;S:c/u]");
    }
}
