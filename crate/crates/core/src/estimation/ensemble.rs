//! Monte Carlo estimates from independent replicas.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::{
    answer_weights, conditioning_for, never_answered, AnswerDistribution, EmpiricalDistribution, Estimate,
    EstimationError, PrefixOutcome, Weighted,
};
use crate::formal_system::{ClaimsList, ClaimsSet, Question};
use crate::ndr_machine::NdrMachine;
use crate::rng::replica_rng;

/// The horizon claims list of one replica, and for each watched list
/// whether the claims tape equalled it at some iteration before the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicaOutcome {
    pub claims: ClaimsList,
    pub passed: Vec<bool>,
}

/// `N` replicas of one machine run to a common horizon.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub horizon: u64,
    pub seed: u64,
    pub watched: Vec<ClaimsList>,
    pub replicas: Vec<ReplicaOutcome>,
}

/// Observed horizon lists that are not a proper prefix of another observed
/// list. Maximality is only relative to `horizon`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalLists {
    pub lists: BTreeSet<ClaimsList>,
    pub horizon: u64,
}

fn check_sizes(k: u64, n: u64) -> Result<(), EstimationError> {
    if k == 0 || n == 0 {
        return Err(EstimationError::InvalidArgument(format!(
            "horizon ({k}) and replica count ({n}) must both be at least 1"
        )));
    }
    Ok(())
}

impl Ensemble {
    /// Runs replicas `0..n` on streams of `seed`, in parallel.
    pub fn simulate(
        machine: &NdrMachine,
        k: u64,
        n: u64,
        seed: u64,
        watch: &[ClaimsList],
    ) -> Result<Self, EstimationError> {
        check_sizes(k, n)?;
        let replicas = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = replica_rng(seed, i);
                let mut passed = vec![false; watch.len()];
                let state = machine.run_observed(k, &mut rng, |s| {
                    if s.iteration() < k {
                        for (flag, list) in passed.iter_mut().zip(watch) {
                            *flag |= s.claims() == list;
                        }
                    }
                });
                ReplicaOutcome {
                    claims: state.into_claims(),
                    passed,
                }
            })
            .collect();
        Ok(Ensemble {
            horizon: k,
            seed,
            watched: watch.to_vec(),
            replicas,
        })
    }

    pub fn len(&self) -> u64 {
        self.replicas.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.replicas.is_empty()
    }

    fn weighted(&self) -> impl Iterator<Item = Weighted<'_>> {
        self.replicas.iter().map(|r| Weighted {
            list: &r.claims,
            passed: &r.passed,
            weight: 1.0,
        })
    }

    /// Distribution of the first `n` claims of the horizon lists.
    pub fn prefix_distribution(&self, n: usize) -> EmpiricalDistribution<PrefixOutcome> {
        let mut counts: BTreeMap<PrefixOutcome, u64> = BTreeMap::new();
        for r in &self.replicas {
            *counts.entry(PrefixOutcome::of(&r.claims, n)).or_default() += 1;
        }
        EmpiricalDistribution::from_counts(counts, self.len(), self.horizon)
    }

    /// Fraction of horizon lists containing every claim of `c`.
    pub fn claims_probability(&self, c: &ClaimsSet) -> Estimate {
        let hits = self.replicas.iter().filter(|r| r.claims.contains_all(c)).count() as u64;
        Estimate::wilson95(hits, self.len())
    }

    fn answer(&self, q: &Question, given: &ClaimsSet, watch: Option<usize>) -> Result<AnswerDistribution, EstimationError> {
        let w = answer_weights(self.weighted(), q, given, watch);
        let watched = watch.map(|i| &self.watched[i]);
        let total: f64 = w.iter().sum();
        if total == 0.0 {
            return Err(never_answered(q, given, watched));
        }
        let total_count = total as u64;
        Ok(AnswerDistribution {
            question: q.clone(),
            conditioning: conditioning_for(given, watched),
            horizon: self.horizon,
            probs: w.map(|x| x / total),
            estimates: Some(w.map(|x| Estimate::wilson95(x as u64, total_count))),
        })
    }

    pub fn answer_distribution(&self, q: &Question) -> Result<AnswerDistribution, EstimationError> {
        self.answer(q, &ClaimsSet::new(), None)
    }

    /// Answers to `q` among outcomes also containing `c`. With `c` empty this
    /// is [`Ensemble::answer_distribution`].
    pub fn generalized_answer_distribution(&self, q: &Question, c: &ClaimsSet) -> Result<AnswerDistribution, EstimationError> {
        self.answer(q, c, None)
    }

    fn watch_index(&self, list: &ClaimsList) -> Result<usize, EstimationError> {
        self.watched
            .iter()
            .position(|l| l == list)
            .ok_or_else(|| EstimationError::InvalidArgument(format!("claims list {list} was not watched")))
    }

    /// Answers to `q` among outcomes that passed through `list` and contain `c`.
    pub fn list_conditioned_answer_distribution(
        &self,
        list: &ClaimsList,
        q: &Question,
        c: &ClaimsSet,
    ) -> Result<AnswerDistribution, EstimationError> {
        let i = self.watch_index(list)?;
        if self.passage_count(i) == 0 {
            return Err(EstimationError::ConditioningListNeverReached(list.clone()));
        }
        self.answer(q, c, Some(i))
    }

    pub fn passage_count(&self, watch: usize) -> u64 {
        self.replicas.iter().filter(|r| r.passed[watch]).count() as u64
    }

    /// Among outcomes that passed through `list`, the fraction containing `c`.
    pub fn list_conditioned_claims_probability(&self, list: &ClaimsList, c: &ClaimsSet) -> Result<Estimate, EstimationError> {
        let i = self.watch_index(list)?;
        let passed = self.passage_count(i);
        if passed == 0 {
            return Err(EstimationError::ConditioningListNeverReached(list.clone()));
        }
        let hits = self
            .replicas
            .iter()
            .filter(|r| r.passed[i] && r.claims.contains_all(c))
            .count() as u64;
        Ok(Estimate::wilson95(hits, passed))
    }

    pub fn maximal_lists(&self) -> MaximalLists {
        let observed: BTreeSet<&ClaimsList> = self.replicas.iter().map(|r| &r.claims).collect();
        MaximalLists {
            lists: maximal_among(observed),
            horizon: self.horizon,
        }
    }
}

/// Members of `lists` that are not a proper prefix of another member.
pub(crate) fn maximal_among<'a>(lists: BTreeSet<&'a ClaimsList>) -> BTreeSet<ClaimsList> {
    // sorted lexicographically, any proper extension of a list follows it
    // directly or after other extensions of it
    let sorted: Vec<&ClaimsList> = lists.into_iter().collect();
    sorted
        .iter()
        .enumerate()
        .filter(|(i, l)| sorted.get(i + 1).map_or(true, |next| !l.is_prefix_of(next)))
        .map(|(_, l)| (*l).clone())
        .collect()
}

pub fn simulate_pk(
    machine: &NdrMachine,
    k: u64,
    n: usize,
    replicas: u64,
    seed: u64,
) -> Result<EmpiricalDistribution<PrefixOutcome>, EstimationError> {
    Ok(Ensemble::simulate(machine, k, replicas, seed, &[])?.prefix_distribution(n))
}

pub fn estimate_claims_distribution(
    machine: &NdrMachine,
    c: &ClaimsSet,
    k_max: u64,
    replicas: u64,
    seed: u64,
) -> Result<Estimate, EstimationError> {
    Ok(Ensemble::simulate(machine, k_max, replicas, seed, &[])?.claims_probability(c))
}

pub fn answer_distribution(
    machine: &NdrMachine,
    q: &Question,
    k_max: u64,
    replicas: u64,
    seed: u64,
) -> Result<AnswerDistribution, EstimationError> {
    Ensemble::simulate(machine, k_max, replicas, seed, &[])?.answer_distribution(q)
}

pub fn generalized_answer_distribution(
    machine: &NdrMachine,
    q: &Question,
    c: &ClaimsSet,
    k_max: u64,
    replicas: u64,
    seed: u64,
) -> Result<AnswerDistribution, EstimationError> {
    Ensemble::simulate(machine, k_max, replicas, seed, &[])?.generalized_answer_distribution(q, c)
}

pub fn list_conditioned_answer_distribution(
    machine: &NdrMachine,
    list: &ClaimsList,
    q: &Question,
    k_max: u64,
    replicas: u64,
    seed: u64,
) -> Result<AnswerDistribution, EstimationError> {
    Ensemble::simulate(machine, k_max, replicas, seed, std::slice::from_ref(list))?
        .list_conditioned_answer_distribution(list, q, &ClaimsSet::new())
}

pub fn list_conditioned_claims_probability(
    machine: &NdrMachine,
    list: &ClaimsList,
    c: &ClaimsSet,
    k_max: u64,
    replicas: u64,
    seed: u64,
) -> Result<Estimate, EstimationError> {
    Ensemble::simulate(machine, k_max, replicas, seed, std::slice::from_ref(list))?.list_conditioned_claims_probability(list, c)
}

pub fn detect_maximal(machine: &NdrMachine, k_max: u64, replicas: u64, seed: u64) -> Result<MaximalLists, EstimationError> {
    Ok(Ensemble::simulate(machine, k_max, replicas, seed, &[])?.maximal_lists())
}
