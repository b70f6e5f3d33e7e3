//! Worlds, world instances and measures over them.
//!
//! An [`NdrWorld`] pairs one formal system with an answer distribution for
//! every WFF up to a length bound. An [`NdrWorldInstance`] pairs the system
//! with the claims set of one sampled run. An [`MmhMeasure`] is a finite
//! probability measure over either, generated from explicit weights, from
//! sampled machine runs, or from the coin-flipping distribution of a program
//! machine through a decoding table.

mod file;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimation::{Ensemble, EstimationError};
use crate::formal_system::{ClaimsSet, FormalSystemError, Question, SystemRegistry, Valence};
use crate::ndr_machine::{NdrError, NdrMachine, NdrState, QuestionPool};
use crate::ptm::{coin_flip_distribution, PtmError, TapeMachine};
use crate::rng::replica_rng;

pub use file::{GeneratorSpec, InstanceEntry, MeasureFile, MmhFileError, WorldFile};

/// Successor-count cap for the one-step absorption check.
const ABSORPTION_LIMIT: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MmhError {
    #[error("the machine can ask questions of several systems: {}", .0.join(", "))]
    DeltaConditionViolated(Vec<String>),
    #[error("the WFF {0} is never answered")]
    WffNeverAnswered(Question),
    #[error("program set is not prefix-free: {shorter:?} is a proper prefix of {longer:?}")]
    NotPrefixFree { shorter: String, longer: String },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("no decoding for program {0:?}")]
    MissingDecoding(String),
    #[error("the measure puts no mass on mistake-free elements")]
    NoMistakeFreeMass,
    #[error(transparent)]
    System(#[from] FormalSystemError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Machine(#[from] NdrError),
    #[error(transparent)]
    Ptm(PtmError),
}

impl From<PtmError> for MmhError {
    fn from(e: PtmError) -> Self {
        match e {
            PtmError::NotPrefixFree { shorter, longer } => MmhError::NotPrefixFree { shorter, longer },
            other => MmhError::Ptm(other),
        }
    }
}

/// Anything that can be judged against the oracles of its system.
pub trait MistakeFree {
    fn system(&self) -> &str;
    fn is_mistake_free(&self, registry: &SystemRegistry) -> Result<bool, MmhError>;
}

/// Answer probabilities per WFF, in `[t, a, n, u]` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdrWorld {
    pub system: String,
    pub wff_bound: usize,
    pub horizon: u64,
    pub answers: BTreeMap<String, [f64; 4]>,
}

impl MistakeFree for NdrWorld {
    fn system(&self) -> &str {
        &self.system
    }

    fn is_mistake_free(&self, registry: &SystemRegistry) -> Result<bool, MmhError> {
        let system = registry.get(&self.system)?;
        for (formula, probs) in &self.answers {
            if probs[system.classify(formula)?.index()] != 1.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NdrWorldInstance {
    pub system: String,
    pub claims: ClaimsSet,
    pub horizon: u64,
    /// Whether no run continuing from the sampled state can change its
    /// claims; `None` when that could not be decided.
    pub maximal: Option<bool>,
}

impl MistakeFree for NdrWorldInstance {
    fn system(&self) -> &str {
        &self.system
    }

    fn is_mistake_free(&self, registry: &SystemRegistry) -> Result<bool, MmhError> {
        for c in self.claims.iter() {
            if registry.oracle(&c.question)? != c.valence {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn classify_mistake_free<T: MistakeFree>(x: &T, registry: &SystemRegistry) -> Result<bool, MmhError> {
    x.is_mistake_free(registry)
}

/// The one system the machine can ask about.
pub fn delta_system(machine: &NdrMachine) -> Result<String, MmhError> {
    let systems: BTreeSet<String> = match machine.pool() {
        QuestionPool::Strings { systems, .. } => systems.iter().map(|(s, _)| s.id().to_string()).collect(),
        QuestionPool::Explicit(qs) => qs.iter().map(|q| q.system().to_string()).collect(),
    };
    if systems.len() != 1 {
        return Err(MmhError::DeltaConditionViolated(systems.into_iter().collect()));
    }
    Ok(systems.into_iter().next().expect("one system"))
}

/// WFFs of `system` with at most `bound` symbols.
pub fn wffs(registry: &SystemRegistry, system: &str, bound: usize) -> Result<Vec<String>, MmhError> {
    let s = registry.get(system)?;
    let mut out = Vec::new();
    for string in s.enumerate_strings(bound) {
        if s.is_wff(&string)? {
            out.push(string);
        }
    }
    Ok(out)
}

/// Monte Carlo answer distributions for every WFF up to `wff_bound`.
pub fn make_world(machine: &NdrMachine, wff_bound: usize, k_max: u64, replicas: u64, seed: u64) -> Result<NdrWorld, MmhError> {
    let system = delta_system(machine)?;
    let ensemble = Ensemble::simulate(machine, k_max, replicas, seed, &[])?;
    let mut answers = BTreeMap::new();
    for formula in wffs(machine.registry(), &system, wff_bound)? {
        let q = Question::new(&system, &formula);
        let d = ensemble.answer_distribution(&q).map_err(|e| match e {
            EstimationError::QuestionNeverAnswered(q) => MmhError::WffNeverAnswered(q),
            other => other.into(),
        })?;
        answers.insert(formula, d.probs);
    }
    Ok(NdrWorld {
        system,
        wff_bound,
        horizon: k_max,
        answers,
    })
}

fn absorbed(machine: &NdrMachine, state: &NdrState) -> Option<bool> {
    let successors = machine.transitions(state, ABSORPTION_LIMIT).ok()?;
    Some(
        successors
            .iter()
            .all(|(s, p)| *p == 0.0 || s.claims() == state.claims()),
    )
}

fn instance_of(machine: &NdrMachine, system: &str, state: &NdrState) -> NdrWorldInstance {
    NdrWorldInstance {
        system: system.to_string(),
        claims: state.claims().to_set(),
        horizon: state.iteration(),
        maximal: absorbed(machine, state),
    }
}

/// Replica `replica` of `seed`, run to `k_max`.
pub fn sample_world_instance(machine: &NdrMachine, k_max: u64, seed: u64, replica: u64) -> Result<NdrWorldInstance, MmhError> {
    let system = delta_system(machine)?;
    let state = machine.run(k_max, &mut replica_rng(seed, replica));
    Ok(instance_of(machine, &system, &state))
}

/// Scans replicas `0..max_attempts` for a non-empty mistake-free instance;
/// returns it with the replica index.
pub fn sample_mistake_free_instance(
    machine: &NdrMachine,
    k_max: u64,
    seed: u64,
    max_attempts: u64,
) -> Result<Option<(NdrWorldInstance, u64)>, MmhError> {
    for replica in 0..max_attempts {
        let instance = sample_world_instance(machine, k_max, seed, replica)?;
        if !instance.claims.is_empty() && instance.is_mistake_free(machine.registry())? {
            return Ok(Some((instance, replica)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    ExplicitWeights,
    NdrMachineSampled { horizon: u64, replicas: u64, seed: u64 },
    CoinflipProgramInduced { omega: f64 },
    /// Restriction of another measure to its mistake-free support.
    MistakeFreeRestriction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmhMeasure<T> {
    pub support: Vec<(T, f64)>,
    pub generator: Generator,
}

fn check_weights<T>(support: &[(T, f64)]) -> Result<(), MmhError> {
    if let Some((_, w)) = support.iter().find(|(_, w)| !w.is_finite() || *w < 0.0) {
        return Err(MmhError::InvalidWeights(format!("weight {w}")));
    }
    let total: f64 = support.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(MmhError::InvalidWeights(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

fn merge<T: Ord>(items: impl IntoIterator<Item = (T, f64)>) -> Vec<(T, f64)> {
    let mut merged: BTreeMap<T, f64> = BTreeMap::new();
    for (x, w) in items {
        *merged.entry(x).or_default() += w;
    }
    merged.into_iter().collect()
}

impl<T: MistakeFree + Clone> MmhMeasure<T> {
    /// Weights are used as given; they must sum to 1 within 1e-9.
    pub fn explicit(support: Vec<(T, f64)>) -> Result<Self, MmhError> {
        check_weights(&support)?;
        Ok(MmhMeasure {
            support,
            generator: Generator::ExplicitWeights,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.support.iter().map(|(_, w)| w).sum()
    }

    /// The measure conditioned on mistake-freeness.
    pub fn restrict_to_mistake_free(&self, registry: &SystemRegistry) -> Result<Self, MmhError> {
        let mut kept = Vec::new();
        for (x, w) in &self.support {
            if x.is_mistake_free(registry)? {
                kept.push((x.clone(), *w));
            }
        }
        let mass: f64 = kept.iter().map(|(_, w)| w).sum();
        if mass == 0.0 {
            return Err(MmhError::NoMistakeFreeMass);
        }
        Ok(MmhMeasure {
            support: kept.into_iter().map(|(x, w)| (x, w / mass)).collect(),
            generator: Generator::MistakeFreeRestriction,
        })
    }
}

impl MmhMeasure<NdrWorldInstance> {
    /// Frequencies of the instances of `replicas` runs to `k_max`.
    pub fn sampled(machine: &NdrMachine, k_max: u64, replicas: u64, seed: u64) -> Result<Self, MmhError> {
        if replicas == 0 {
            return Err(MmhError::InvalidWeights("no replicas".into()));
        }
        let system = delta_system(machine)?;
        let states: Vec<NdrState> = (0..replicas)
            .into_par_iter()
            .map(|i| machine.run(k_max, &mut replica_rng(seed, i)))
            .collect();
        // instances are keyed by claims set; a set is maximal only if every
        // state producing it is absorbed
        let mut by_set: BTreeMap<ClaimsSet, (u64, Option<bool>)> = BTreeMap::new();
        for state in &states {
            let inst = instance_of(machine, &system, state);
            let entry = by_set.entry(inst.claims).or_insert((0, Some(true)));
            entry.0 += 1;
            entry.1 = match (entry.1, inst.maximal) {
                (Some(a), Some(b)) => Some(a && b),
                _ => None,
            };
        }
        let support = by_set
            .into_iter()
            .map(|(claims, (count, maximal))| {
                (
                    NdrWorldInstance {
                        system: system.clone(),
                        claims,
                        horizon: k_max,
                        maximal,
                    },
                    count as f64 / replicas as f64,
                )
            })
            .collect();
        Ok(MmhMeasure {
            support,
            generator: Generator::NdrMachineSampled {
                horizon: k_max,
                replicas,
                seed,
            },
        })
    }

    /// Weights `2^-|σ| / Ω` over the programs on which `program` halts, each
    /// mapped to an instance by `decoding`.
    pub fn coinflip(
        program: &TapeMachine,
        max_len: usize,
        budget: u64,
        decoding: &BTreeMap<String, NdrWorldInstance>,
    ) -> Result<Self, MmhError> {
        let dist = coin_flip_distribution(&program.halting_set(max_len, budget)?)?;
        let mut items = Vec::new();
        for (sigma, p) in &dist.probabilities {
            let inst = decoding.get(sigma).ok_or_else(|| MmhError::MissingDecoding(sigma.clone()))?;
            items.push((inst.clone(), *p));
        }
        Ok(MmhMeasure {
            support: merge(items),
            generator: Generator::CoinflipProgramInduced { omega: dist.omega },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureStatistics {
    pub mistake_free_mass: f64,
    pub mass_per_system: BTreeMap<String, f64>,
    /// Shannon entropy in bits.
    pub entropy: f64,
    pub support_size: usize,
}

pub fn measure_statistics<T: MistakeFree>(m: &MmhMeasure<T>, registry: &SystemRegistry) -> Result<MeasureStatistics, MmhError> {
    let mut mistake_free_mass = 0.0;
    let mut mass_per_system: BTreeMap<String, f64> = BTreeMap::new();
    let mut entropy = 0.0;
    for (x, w) in &m.support {
        if x.is_mistake_free(registry)? {
            mistake_free_mass += w;
        }
        *mass_per_system.entry(x.system().to_string()).or_default() += w;
        if *w > 0.0 {
            entropy -= w * w.log2();
        }
    }
    Ok(MeasureStatistics {
        mistake_free_mass: mistake_free_mass.clamp(0.0, 1.0),
        mass_per_system,
        entropy,
        support_size: m.support.len(),
    })
}

/// A world whose answers are the oracle valences with certainty.
pub fn oracle_world(registry: &SystemRegistry, system: &str, wff_bound: usize) -> Result<NdrWorld, MmhError> {
    let s = registry.get(system)?;
    let mut answers = BTreeMap::new();
    for formula in wffs(registry, system, wff_bound)? {
        let mut probs = [0.0; 4];
        probs[s.classify(&formula)?.index()] = 1.0;
        answers.insert(formula, probs);
    }
    Ok(NdrWorld {
        system: system.to_string(),
        wff_bound,
        horizon: 0,
        answers,
    })
}

impl NdrWorld {
    pub fn answer(&self, formula: &str) -> Option<[f64; 4]> {
        self.answers.get(formula).copied()
    }

    pub fn prob(&self, formula: &str, v: Valence) -> Option<f64> {
        self.answer(formula).map(|p| p[v.index()])
    }
}
