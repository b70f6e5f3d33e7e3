//! Budget-truncated halting sets and the coin-flipping distribution.

use std::collections::{BTreeMap, BTreeSet};

use crate::formal_system::StringEnumerator;

use super::{PtmError, RunOutcome, TapeMachine};

/// Limits under which a halting set was enumerated.
///
/// Halting is only semi-decidable, so any enumerated set is an
/// under-approximation: inputs longer than `max_len`, or that halt after more
/// than `budget` steps, are missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub max_len: usize,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltingSet {
    pub members: BTreeSet<String>,
    pub truncation: Truncation,
}

impl HaltingSet {
    pub fn is_prefix_free(&self) -> bool {
        check_prefix_free(&self.members)
    }
}

impl TapeMachine {
    /// Inputs of length `≤ max_len` on which the machine halts within `budget`.
    pub fn halting_set(&self, max_len: usize, budget: u64) -> Result<HaltingSet, PtmError> {
        if !self.is_deterministic() {
            return Err(PtmError::Stochastic);
        }
        if budget == 0 {
            return Err(PtmError::ZeroBudget);
        }
        let mut members = BTreeSet::new();
        for input in StringEnumerator::new(self.input_alphabet(), max_len) {
            if let RunOutcome::Halted { .. } = self.run_deterministic(&input, budget)? {
                members.insert(input);
            }
        }
        Ok(HaltingSet {
            members,
            truncation: Truncation { max_len, budget },
        })
    }
}

fn first_prefix_violation(set: &BTreeSet<String>) -> Option<(&String, &String)> {
    // In lexicographic order a proper prefix sorts immediately before some
    // extension of it, so adjacent pairs suffice.
    set.iter()
        .zip(set.iter().skip(1))
        .find(|(a, b)| b.starts_with(a.as_str()))
}

/// `true` iff no member is a proper prefix of another.
pub fn check_prefix_free(set: &BTreeSet<String>) -> bool {
    first_prefix_violation(set).is_none()
}

/// Probability `2^(-|σ|) / Ω` for every enumerated halting input `σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinFlipDistribution {
    pub probabilities: BTreeMap<String, f64>,
    pub omega: f64,
    pub truncation: Truncation,
}

pub fn coin_flip_distribution(halting: &HaltingSet) -> Result<CoinFlipDistribution, PtmError> {
    if let Some((shorter, longer)) = first_prefix_violation(&halting.members) {
        return Err(PtmError::NotPrefixFree {
            shorter: shorter.clone(),
            longer: longer.clone(),
        });
    }
    if halting.members.is_empty() {
        return Err(PtmError::EmptyHaltingSet);
    }
    let weight = |s: &String| 2f64.powi(-(s.chars().count() as i32));
    let omega: f64 = halting.members.iter().map(weight).sum();
    let probabilities = halting
        .members
        .iter()
        .map(|s| (s.clone(), weight(s) / omega))
        .collect();
    Ok(CoinFlipDistribution {
        probabilities,
        omega,
        truncation: halting.truncation,
    })
}

impl TapeMachine {
    pub fn coin_flip_distribution(&self, max_len: usize, budget: u64) -> Result<CoinFlipDistribution, PtmError> {
        coin_flip_distribution(&self.halting_set(max_len, budget)?)
    }
}
