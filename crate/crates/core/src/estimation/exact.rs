//! Exact propagation of probability mass through the machine's chain.

use std::collections::{BTreeMap, BTreeSet};

use super::ensemble::maximal_among;
use super::{
    answer_weights, conditioning_for, never_answered, AnswerDistribution, EstimationError, PrefixOutcome, Weighted,
};
use crate::formal_system::{ClaimsList, ClaimsSet, Question};
use crate::ndr_machine::{NdrError, NdrMachine, NdrState};

/// The exact distribution over machine states at `horizon`, together with
/// passage flags for each watched claims list.
#[derive(Debug, Clone)]
pub struct ExactChain<'m> {
    machine: &'m NdrMachine,
    bound: usize,
    watched: Vec<ClaimsList>,
    horizon: u64,
    states: BTreeMap<(NdrState, Vec<bool>), f64>,
}

impl<'m> ExactChain<'m> {
    /// The chain at horizon 0 (blank tapes). `bound` caps both the number of
    /// distinct states at any horizon and the successors of any one state.
    pub fn new(machine: &'m NdrMachine, bound: usize, watch: &[ClaimsList]) -> Self {
        ExactChain {
            machine,
            bound,
            watched: watch.to_vec(),
            horizon: 0,
            states: BTreeMap::from([((NdrState::new(), vec![false; watch.len()]), 1.0)]),
        }
    }

    pub fn advance(&mut self) -> Result<(), EstimationError> {
        let too_large = EstimationError::StateSpaceTooLarge { bound: self.bound };
        let mut next: BTreeMap<(NdrState, Vec<bool>), f64> = BTreeMap::new();
        for ((state, flags), p) in &self.states {
            let mut flags = flags.clone();
            for (flag, list) in flags.iter_mut().zip(&self.watched) {
                *flag |= state.claims() == list;
            }
            let successors = self.machine.transitions(state, self.bound).map_err(|e| match e {
                NdrError::TooManyTransitions { .. } => too_large.clone(),
                other => other.into(),
            })?;
            for (s, q) in successors {
                *next.entry((s, flags.clone())).or_default() += p * q;
            }
            if next.len() > self.bound {
                return Err(too_large);
            }
        }
        self.states = next;
        self.horizon += 1;
        Ok(())
    }

    pub fn advance_to(&mut self, k: u64) -> Result<(), EstimationError> {
        while self.horizon < k {
            self.advance()?;
        }
        Ok(())
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.states.values().sum()
    }

    pub fn states(&self) -> impl Iterator<Item = (&NdrState, f64)> {
        self.states.iter().map(|((s, _), p)| (s, *p))
    }

    /// Mass per (claims list, passage flags).
    fn outcomes(&self) -> Vec<(ClaimsList, Vec<bool>, f64)> {
        let mut merged: BTreeMap<(&ClaimsList, &Vec<bool>), f64> = BTreeMap::new();
        for ((state, flags), p) in &self.states {
            *merged.entry((state.claims(), flags)).or_default() += p;
        }
        merged.into_iter().map(|((l, f), p)| (l.clone(), f.clone(), p)).collect()
    }

    fn weighted<'a>(outcomes: &'a [(ClaimsList, Vec<bool>, f64)]) -> impl Iterator<Item = Weighted<'a>> {
        outcomes.iter().map(|(list, passed, weight)| Weighted {
            list,
            passed,
            weight: *weight,
        })
    }

    pub fn list_distribution(&self) -> BTreeMap<ClaimsList, f64> {
        let mut d = BTreeMap::new();
        for ((state, _), p) in &self.states {
            *d.entry(state.claims().clone()).or_default() += p;
        }
        d
    }

    pub fn prefix_distribution(&self, n: usize) -> BTreeMap<PrefixOutcome, f64> {
        let mut d = BTreeMap::new();
        for (list, p) in self.list_distribution() {
            *d.entry(PrefixOutcome::of(&list, n)).or_default() += p;
        }
        d
    }

    pub fn claims_probability(&self, c: &ClaimsSet) -> f64 {
        self.list_distribution()
            .iter()
            .filter(|(l, _)| l.contains_all(c))
            .map(|(_, p)| p)
            .sum()
    }

    fn answer(&self, q: &Question, given: &ClaimsSet, watch: Option<usize>) -> Result<AnswerDistribution, EstimationError> {
        let outcomes = self.outcomes();
        let w = answer_weights(Self::weighted(&outcomes), q, given, watch);
        let watched = watch.map(|i| &self.watched[i]);
        let total: f64 = w.iter().sum();
        if total == 0.0 {
            return Err(never_answered(q, given, watched));
        }
        Ok(AnswerDistribution {
            question: q.clone(),
            conditioning: conditioning_for(given, watched),
            horizon: self.horizon,
            probs: w.map(|x| x / total),
            estimates: None,
        })
    }

    pub fn answer_distribution(&self, q: &Question) -> Result<AnswerDistribution, EstimationError> {
        self.answer(q, &ClaimsSet::new(), None)
    }

    pub fn generalized_answer_distribution(&self, q: &Question, c: &ClaimsSet) -> Result<AnswerDistribution, EstimationError> {
        self.answer(q, c, None)
    }

    fn watch_index(&self, list: &ClaimsList) -> Result<usize, EstimationError> {
        self.watched
            .iter()
            .position(|l| l == list)
            .ok_or_else(|| EstimationError::InvalidArgument(format!("claims list {list} was not watched")))
    }

    /// Probability that the claims tape equalled `list` at some iteration
    /// before the horizon.
    pub fn passage_probability(&self, list: &ClaimsList) -> Result<f64, EstimationError> {
        let i = self.watch_index(list)?;
        Ok(self.states.iter().filter(|((_, f), _)| f[i]).map(|(_, p)| p).sum())
    }

    pub fn list_conditioned_answer_distribution(
        &self,
        list: &ClaimsList,
        q: &Question,
        c: &ClaimsSet,
    ) -> Result<AnswerDistribution, EstimationError> {
        if self.passage_probability(list)? == 0.0 {
            return Err(EstimationError::ConditioningListNeverReached(list.clone()));
        }
        self.answer(q, c, Some(self.watch_index(list)?))
    }

    pub fn list_conditioned_claims_probability(&self, list: &ClaimsList, c: &ClaimsSet) -> Result<f64, EstimationError> {
        let i = self.watch_index(list)?;
        let passed = self.passage_probability(list)?;
        if passed == 0.0 {
            return Err(EstimationError::ConditioningListNeverReached(list.clone()));
        }
        let hit: f64 = self
            .states
            .iter()
            .filter(|((s, f), _)| f[i] && s.claims().contains_all(c))
            .map(|(_, p)| p)
            .sum();
        Ok(hit / passed)
    }

    /// Horizon lists with positive mass that are not a proper prefix of
    /// another such list.
    pub fn maximal_lists(&self) -> BTreeSet<ClaimsList> {
        let d = self.list_distribution();
        maximal_among(d.iter().filter(|(_, p)| **p > 0.0).map(|(l, _)| l).collect())
    }

    /// Weighted horizon outcomes conditioned on passage through `list` (or
    /// unconditioned), renormalized. Used to build exact joints.
    pub fn conditioned_lists(&self, list: Option<&ClaimsList>) -> Result<Vec<(ClaimsList, f64)>, EstimationError> {
        let i = list.map(|l| self.watch_index(l)).transpose()?;
        let mut merged: BTreeMap<ClaimsList, f64> = BTreeMap::new();
        for ((s, f), p) in &self.states {
            if i.map_or(true, |i| f[i]) {
                *merged.entry(s.claims().clone()).or_default() += p;
            }
        }
        let total: f64 = merged.values().sum();
        if total == 0.0 {
            return Err(EstimationError::ConditioningListNeverReached(list.cloned().unwrap_or_default()));
        }
        Ok(merged.into_iter().map(|(l, p)| (l, p / total)).collect())
    }
}

/// The exact chain of `machine` advanced to horizon `k`.
pub fn exact_chain(machine: &NdrMachine, k: u64, bound: usize) -> Result<ExactChain<'_>, EstimationError> {
    let mut chain = ExactChain::new(machine, bound, &[]);
    chain.advance_to(k)?;
    Ok(chain)
}
