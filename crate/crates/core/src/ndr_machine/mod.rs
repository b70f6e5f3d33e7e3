//! The NDR reasoning loop.
//!
//! One iteration:
//!
//! 1. the question policy appends new questions to the questions tape `Q`;
//! 2. the answer kernel attempts every open question, seeing the claims tape
//!    `C` as it stood at the start of this step;
//! 3. each found `(q, v)` is appended to `C` in `Q` order and `q` leaves `Q`;
//!    then the removal policy may delete claims from `C`.
//!
//! Candidates for step 1 are pool questions not already on `Q`; with
//! `enforce_non_repeating` they must also be unanswered in `C`. Without it
//! a question may be re-asked while an earlier claim about it is still on
//! `C`, which is how repeating lists arise.
//!
//! Every random choice has both a sampler and an exact distribution
//! ([`NdrMachine::transitions`]); they are built from the same phase
//! functions so the exact chain is an oracle for the sampler.

mod config;
mod pool;

use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formal_system::{
    Claim, ClaimsList, FormalSystemError, Question, SystemRegistry, Valence,
};

pub use config::{KernelSpec, NdrConfig, PolicySpec, PoolSpec, RemovalSpec};
pub use pool::{QuestionPool, MATERIALIZE_LIMIT};

/// Rejection attempts before a sampler falls back to enumerating candidates.
const REJECTION_ATTEMPTS: usize = 64;
/// Rejection attempts for pools too large to enumerate; on failure nothing is
/// emitted.
const LARGE_POOL_ATTEMPTS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NdrError {
    #[error("config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error(transparent)]
    System(#[from] FormalSystemError),
    #[error("prefix length {n} exceeds claims list length {len}")]
    IndexOutOfRange { n: usize, len: usize },
    #[error("question pool of {size} strings is too large to enumerate (limit {limit})")]
    PoolTooLarge { size: u64, limit: u64 },
    #[error("more than {limit} transitions from a single state")]
    TooManyTransitions { limit: usize },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> NdrError {
    NdrError::InvalidConfig {
        field,
        reason: reason.into(),
    }
}

/// Questions tape, claims tape and iteration counter.
#[derive(Debug, Clone, Default)]
pub struct NdrState {
    questions: Vec<Question>,
    claims: ClaimsList,
    iteration: u64,
    open: HashSet<Question>,
    answered: HashMap<Question, u32>,
}

impl PartialEq for NdrState {
    fn eq(&self, other: &Self) -> bool {
        self.iteration == other.iteration && self.questions == other.questions && self.claims == other.claims
    }
}

impl Eq for NdrState {}

impl PartialOrd for NdrState {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NdrState {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.iteration, &self.questions, &self.claims).cmp(&(other.iteration, &other.questions, &other.claims))
    }
}

impl Hash for NdrState {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.questions.hash(h);
        self.claims.hash(h);
        self.iteration.hash(h);
    }
}

impl NdrState {
    /// Both tapes blank.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(questions: Vec<Question>, claims: ClaimsList, iteration: u64) -> Self {
        let mut state = NdrState {
            iteration,
            ..Self::default()
        };
        for q in questions {
            state.push_question(q);
        }
        for c in claims.0 {
            state.push_claim(c);
        }
        state
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn claims(&self) -> &ClaimsList {
        &self.claims
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn into_claims(self) -> ClaimsList {
        self.claims
    }

    pub fn is_open(&self, q: &Question) -> bool {
        self.open.contains(q)
    }

    pub fn is_answered(&self, q: &Question) -> bool {
        self.answered.contains_key(q)
    }

    /// No question is both open and answered.
    pub fn tapes_disjoint(&self) -> bool {
        self.questions.iter().all(|q| !self.is_answered(q))
    }

    fn push_question(&mut self, q: Question) {
        self.open.insert(q.clone());
        self.questions.push(q);
    }

    fn push_claim(&mut self, c: Claim) {
        *self.answered.entry(c.question.clone()).or_default() += 1;
        self.claims.0.push(c);
    }

    fn remove_claim(&mut self, position: usize) -> Claim {
        let c = self.claims.0.remove(position);
        match self.answered.get_mut(&c.question) {
            Some(n) if *n > 1 => *n -= 1,
            _ => {
                self.answered.remove(&c.question);
            }
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    QuestionAdded,
    ClaimAdded,
    ClaimRemoved,
}

/// One tape change. `position` is the index on the affected tape at the
/// moment of the change, so replaying events in order reproduces the tapes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub iteration: u64,
    pub seq: u32,
    pub kind: EventKind,
    pub payload: String,
    pub position: usize,
}

impl TraceEvent {
    pub fn claim(&self) -> Option<Claim> {
        match self.kind {
            EventKind::QuestionAdded => None,
            _ => self.payload.parse().ok(),
        }
    }

    pub fn question(&self) -> Option<Question> {
        match self.kind {
            EventKind::QuestionAdded => self.payload.parse().ok(),
            _ => None,
        }
    }
}

/// One event per line.
pub fn write_ndjson<W: Write>(events: &[TraceEvent], mut out: W) -> std::io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

struct Recorder<'a> {
    events: Option<&'a mut Vec<TraceEvent>>,
    iteration: u64,
    seq: u32,
}

impl Recorder<'_> {
    fn record(&mut self, kind: EventKind, payload: impl FnOnce() -> String, position: usize) {
        if let Some(events) = self.events.as_deref_mut() {
            events.push(TraceEvent {
                iteration: self.iteration,
                seq: self.seq,
                kind,
                payload: payload(),
                position,
            });
            self.seq += 1;
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Kernel {
    solve_rate: f64,
    noise_rate: f64,
    boosted_solve_rate: Option<f64>,
    propagated_noise_rate: Option<f64>,
}

/// A validated config bound to its formal systems.
#[derive(Debug, Clone)]
pub struct NdrMachine {
    config: NdrConfig,
    registry: SystemRegistry,
    pool: QuestionPool,
    kernel: Kernel,
    removal_rate: f64,
    prerequisites: HashMap<Question, Vec<Question>>,
    sorted_pool: Vec<Question>,
}

fn check_rate(field: &'static str, x: f64) -> Result<f64, NdrError> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(invalid(field, format!("{x} is not in [0, 1]")))
    }
}

impl NdrMachine {
    /// Resolves `config.systems` against `registry` and validates the config.
    pub fn new(config: NdrConfig, registry: &SystemRegistry) -> Result<Self, NdrError> {
        if config.systems.is_empty() {
            return Err(invalid("systems", "at least one system is required"));
        }
        if config.max_string_len < 1 {
            return Err(invalid("max_string_len", "must be at least 1"));
        }
        let mut own = SystemRegistry::empty();
        let mut systems = Vec::new();
        for id in &config.systems {
            let system = registry.get(id)?.clone();
            own.replace((*system).clone());
            systems.push(system);
        }
        let check_question = |field: &'static str, q: &Question| -> Result<(), NdrError> {
            if !config.systems.iter().any(|s| s == q.system()) {
                return Err(invalid(field, format!("{q} names a system not listed in `systems`")));
            }
            own.oracle(q)?;
            Ok(())
        };

        let pool = match &config.pool {
            PoolSpec::Strings => QuestionPool::strings(systems, config.max_string_len),
            PoolSpec::Explicit { questions } => {
                let mut seen = HashSet::new();
                for q in questions {
                    check_question("pool.questions", q)?;
                    if !seen.insert(q) {
                        return Err(invalid("pool.questions", format!("{q} is listed twice")));
                    }
                }
                QuestionPool::Explicit(questions.clone())
            }
        };

        match config.question_policy {
            PolicySpec::Uniform { emit_prob } => {
                check_rate("question_policy.emit_prob", emit_prob)?;
            }
            PolicySpec::WffBiased { emit_prob, wff_weight } => {
                check_rate("question_policy.emit_prob", emit_prob)?;
                check_rate("question_policy.wff_weight", wff_weight)?;
            }
            PolicySpec::BreakthroughGreedy { emit_prob, explore_prob } => {
                check_rate("question_policy.emit_prob", emit_prob)?;
                check_rate("question_policy.explore_prob", explore_prob)?;
            }
            PolicySpec::Exhaustive => {}
        }
        let needs_enumeration = matches!(
            config.question_policy,
            PolicySpec::Exhaustive | PolicySpec::BreakthroughGreedy { .. }
        );
        if needs_enumeration && !pool.is_materializable() {
            return Err(NdrError::PoolTooLarge {
                size: pool.len(),
                limit: MATERIALIZE_LIMIT,
            });
        }

        let KernelSpec::NoisyOracle {
            solve_rate,
            noise_rate,
            boosted_solve_rate,
            propagated_noise_rate,
        } = config.answer_kernel;
        let kernel = Kernel {
            solve_rate: check_rate("answer_kernel.solve_rate", solve_rate)?,
            noise_rate: check_rate("answer_kernel.noise_rate", noise_rate)?,
            boosted_solve_rate: boosted_solve_rate
                .map(|x| check_rate("answer_kernel.boosted_solve_rate", x))
                .transpose()?,
            propagated_noise_rate: propagated_noise_rate
                .map(|x| check_rate("answer_kernel.propagated_noise_rate", x))
                .transpose()?,
        };
        let RemovalSpec::Independent { removal_rate } = config.removal_policy;
        let removal_rate = check_rate("removal_policy.removal_rate", removal_rate)?;

        let mut prerequisites = HashMap::new();
        for (q, prereqs) in &config.dependencies {
            check_question("dependencies", q)?;
            for p in prereqs {
                check_question("dependencies", p)?;
                if p == q {
                    return Err(invalid("dependencies", format!("{q} depends on itself")));
                }
            }
            prerequisites.insert(q.clone(), prereqs.clone());
        }

        let sorted_pool = if needs_enumeration {
            let mut v: Vec<Question> = pool.iter().collect();
            v.sort();
            v
        } else {
            Vec::new()
        };

        Ok(NdrMachine {
            config,
            registry: own,
            pool,
            kernel,
            removal_rate,
            prerequisites,
            sorted_pool,
        })
    }

    pub fn config(&self) -> &NdrConfig {
        &self.config
    }

    /// The configured systems, which double as the oracle set.
    pub fn registry(&self) -> &SystemRegistry {
        &self.registry
    }

    pub fn pool(&self) -> &QuestionPool {
        &self.pool
    }

    pub fn oracle(&self, q: &Question) -> Valence {
        self.registry.oracle(q).expect("questions are validated against their systems")
    }

    fn is_candidate(&self, state: &NdrState, q: &Question) -> bool {
        !state.is_open(q) && !(self.config.enforce_non_repeating && state.is_answered(q))
    }

    fn wff_weight(&self, q: &Question, w: f64) -> f64 {
        let wff = self.oracle(q) != Valence::NotWff;
        if wff {
            w
        } else {
            1.0 - w
        }
    }

    fn candidates(&self, state: &NdrState) -> Result<Vec<Question>, NdrError> {
        if !self.pool.is_materializable() {
            return Err(NdrError::PoolTooLarge {
                size: self.pool.len(),
                limit: MATERIALIZE_LIMIT,
            });
        }
        Ok(self.pool.iter().filter(|q| self.is_candidate(state, q)).collect())
    }

    /// A candidate drawn with probability proportional to `weight` (values in
    /// `[0, 1]`), or `None` if all weights vanish.
    fn sample_candidate<R: Rng + ?Sized>(
        &self,
        state: &NdrState,
        rng: &mut R,
        weight: impl Fn(&Question) -> f64,
    ) -> Option<Question> {
        let n = self.pool.len();
        if n == 0 {
            return None;
        }
        let attempts = if self.pool.is_materializable() {
            REJECTION_ATTEMPTS
        } else {
            LARGE_POOL_ATTEMPTS
        };
        for _ in 0..attempts {
            let q = self.pool.get(rng.gen_range(0..n));
            if self.is_candidate(state, &q) {
                let w = weight(&q);
                if w >= 1.0 || rng.gen::<f64>() < w {
                    return Some(q);
                }
            }
        }
        let weighted: Vec<(Question, f64)> = self
            .candidates(state)
            .ok()?
            .into_iter()
            .map(|q| {
                let w = weight(&q);
                (q, w)
            })
            .filter(|(_, w)| *w > 0.0)
            .collect();
        let total: f64 = weighted.iter().map(|(_, w)| w).sum();
        if total <= 0.0 {
            return None;
        }
        let mut u = rng.gen::<f64>() * total;
        for (q, w) in &weighted {
            if u < *w {
                return Some(q.clone());
            }
            u -= w;
        }
        weighted.last().map(|(q, _)| q.clone())
    }

    fn weighted_distribution(
        &self,
        state: &NdrState,
        mass: f64,
        weight: impl Fn(&Question) -> f64,
    ) -> Result<Vec<(Option<Question>, f64)>, NdrError> {
        let weighted: Vec<(Question, f64)> = self
            .candidates(state)?
            .into_iter()
            .map(|q| {
                let w = weight(&q);
                (q, w)
            })
            .filter(|(_, w)| *w > 0.0)
            .collect();
        let total: f64 = weighted.iter().map(|(_, w)| w).sum();
        if total <= 0.0 {
            return Ok(vec![(None, mass)]);
        }
        Ok(weighted
            .into_iter()
            .map(|(q, w)| (Some(q), mass * w / total))
            .collect())
    }

    /// The candidate with the most open dependents, ties to the smallest.
    fn greedy_choice(&self, state: &NdrState) -> Option<Question> {
        let mut scores: HashMap<&Question, u32> = HashMap::new();
        for open in state.questions() {
            for p in self.prerequisites.get(open).into_iter().flatten() {
                if self.pool.contains(p) && self.is_candidate(state, p) {
                    *scores.entry(p).or_default() += 1;
                }
            }
        }
        match scores.into_iter().max_by(|(qa, a), (qb, b)| a.cmp(b).then_with(|| qb.cmp(qa))) {
            Some((q, _)) => Some(q.clone()),
            None => self.sorted_pool.iter().find(|q| self.is_candidate(state, q)).cloned(),
        }
    }

    /// Step 1: the questions the policy adds.
    pub fn generate_questions<R: Rng + ?Sized>(&self, state: &NdrState, rng: &mut R) -> Vec<Question> {
        let emit = |rng: &mut R, p: f64| rng.gen::<f64>() < p;
        let one = match self.config.question_policy {
            PolicySpec::Uniform { emit_prob } => {
                if !emit(rng, emit_prob) {
                    return Vec::new();
                }
                self.sample_candidate(state, rng, |_| 1.0)
            }
            PolicySpec::WffBiased { emit_prob, wff_weight } => {
                if !emit(rng, emit_prob) {
                    return Vec::new();
                }
                self.sample_candidate(state, rng, |q| self.wff_weight(q, wff_weight))
            }
            PolicySpec::BreakthroughGreedy { emit_prob, explore_prob } => {
                if !emit(rng, emit_prob) {
                    return Vec::new();
                }
                if emit(rng, explore_prob) {
                    self.sample_candidate(state, rng, |_| 1.0)
                } else {
                    self.greedy_choice(state)
                }
            }
            PolicySpec::Exhaustive => {
                return self.pool.iter().filter(|q| self.is_candidate(state, q)).collect();
            }
        };
        one.into_iter().collect()
    }

    /// Exact distribution of [`NdrMachine::generate_questions`].
    pub fn question_distribution(&self, state: &NdrState) -> Result<Vec<(Vec<Question>, f64)>, NdrError> {
        let singles = |dist: Vec<(Option<Question>, f64)>| {
            dist.into_iter()
                .filter(|(_, p)| *p > 0.0)
                .map(|(q, p)| (q.into_iter().collect(), p))
                .collect()
        };
        Ok(match self.config.question_policy {
            PolicySpec::Uniform { emit_prob } => {
                let mut d = self.weighted_distribution(state, emit_prob, |_| 1.0)?;
                d.push((None, 1.0 - emit_prob));
                singles(d)
            }
            PolicySpec::WffBiased { emit_prob, wff_weight } => {
                let mut d = self.weighted_distribution(state, emit_prob, |q| self.wff_weight(q, wff_weight))?;
                d.push((None, 1.0 - emit_prob));
                singles(d)
            }
            PolicySpec::BreakthroughGreedy { emit_prob, explore_prob } => {
                let mut d = self.weighted_distribution(state, emit_prob * explore_prob, |_| 1.0)?;
                d.push((self.greedy_choice(state), emit_prob * (1.0 - explore_prob)));
                d.push((None, 1.0 - emit_prob));
                singles(d)
            }
            PolicySpec::Exhaustive => vec![(self.candidates(state)?, 1.0)],
        })
    }

    /// Solve and noise rates for `q` given the claims currently on `C`.
    fn rates(&self, state: &NdrState, q: &Question) -> (f64, f64) {
        let k = self.kernel;
        let (mut solve, mut noise) = (k.solve_rate, k.noise_rate);
        if let Some(prereqs) = self.prerequisites.get(q) {
            if let Some(boosted) = k.boosted_solve_rate {
                if prereqs.iter().any(|p| state.is_answered(p)) {
                    solve = boosted;
                }
            }
            if let Some(propagated) = k.propagated_noise_rate {
                let wrong = state
                    .claims()
                    .iter()
                    .any(|c| prereqs.contains(&c.question) && c.valence != self.oracle(&c.question));
                if wrong {
                    noise = propagated;
                }
            }
        }
        (solve, noise)
    }

    /// Step 2 for one question.
    pub fn attempt_answer<R: Rng + ?Sized>(&self, state: &NdrState, q: &Question, rng: &mut R) -> Option<Valence> {
        let (solve, noise) = self.rates(state, q);
        if !(rng.gen::<f64>() < solve) {
            return None;
        }
        let truth = self.oracle(q);
        if rng.gen::<f64>() < noise {
            Some(truth.others()[rng.gen_range(0..3)])
        } else {
            Some(truth)
        }
    }

    /// Exact distribution of [`NdrMachine::attempt_answer`].
    pub fn answer_distribution(&self, state: &NdrState, q: &Question) -> Vec<(Option<Valence>, f64)> {
        let (solve, noise) = self.rates(state, q);
        let truth = self.oracle(q);
        let mut d = vec![(None, 1.0 - solve), (Some(truth), solve * (1.0 - noise))];
        d.extend(truth.others().map(|v| (Some(v), solve * noise / 3.0)));
        d.retain(|(_, p)| *p > 0.0);
        d
    }

    fn add_questions(&self, state: &mut NdrState, batch: Vec<Question>, rec: &mut Recorder) {
        for q in batch {
            let position = state.questions.len();
            rec.record(EventKind::QuestionAdded, || q.to_string(), position);
            state.push_question(q);
        }
    }

    fn commit(&self, state: &mut NdrState, answers: &[Option<Valence>], rec: &mut Recorder) {
        let questions = std::mem::take(&mut state.questions);
        for (q, answer) in questions.into_iter().zip(answers) {
            match answer {
                Some(v) => {
                    state.open.remove(&q);
                    let claim = q.claim(*v);
                    let position = state.claims.len();
                    rec.record(EventKind::ClaimAdded, || claim.to_string(), position);
                    state.push_claim(claim);
                }
                None => state.questions.push(q),
            }
        }
    }

    fn remove(&self, state: &mut NdrState, removed: &[bool], rec: &mut Recorder) {
        let mut shift = 0;
        for (i, _) in removed.iter().enumerate().filter(|(_, r)| **r) {
            let position = i - shift;
            let claim = state.remove_claim(position);
            rec.record(EventKind::ClaimRemoved, || claim.to_string(), position);
            shift += 1;
        }
    }

    fn iterate_inner<R: Rng + ?Sized>(&self, state: &mut NdrState, rng: &mut R, events: Option<&mut Vec<TraceEvent>>) {
        let mut rec = Recorder {
            events,
            iteration: state.iteration + 1,
            seq: 0,
        };
        let batch = self.generate_questions(state, rng);
        self.add_questions(state, batch, &mut rec);
        let answers: Vec<Option<Valence>> = state
            .questions
            .iter()
            .map(|q| self.attempt_answer(state, q, rng))
            .collect();
        self.commit(state, &answers, &mut rec);
        if self.removal_rate > 0.0 {
            let removed: Vec<bool> = (0..state.claims.len())
                .map(|_| rng.gen::<f64>() < self.removal_rate)
                .collect();
            self.remove(state, &removed, &mut rec);
        }
        state.iteration += 1;
    }

    /// One iteration; returns its events.
    pub fn iterate<R: Rng + ?Sized>(&self, state: &mut NdrState, rng: &mut R) -> Vec<TraceEvent> {
        let mut events = Vec::new();
        self.iterate_inner(state, rng, Some(&mut events));
        events
    }

    /// One iteration without recording events.
    pub fn advance<R: Rng + ?Sized>(&self, state: &mut NdrState, rng: &mut R) {
        self.iterate_inner(state, rng, None);
    }

    /// `k` iterations from blank tapes.
    pub fn run<R: Rng + ?Sized>(&self, k: u64, rng: &mut R) -> NdrState {
        let mut state = NdrState::new();
        for _ in 0..k {
            self.advance(&mut state, rng);
        }
        state
    }

    pub fn run_traced<R: Rng + ?Sized>(&self, k: u64, rng: &mut R) -> (NdrState, Vec<TraceEvent>) {
        let mut state = NdrState::new();
        let mut events = Vec::new();
        for _ in 0..k {
            self.iterate_inner(&mut state, rng, Some(&mut events));
        }
        (state, events)
    }

    /// `k` iterations from blank tapes, calling `observe` on the state after
    /// each of iterations `0..=k`.
    pub fn run_observed<R: Rng + ?Sized>(&self, k: u64, rng: &mut R, mut observe: impl FnMut(&NdrState)) -> NdrState {
        let mut state = NdrState::new();
        observe(&state);
        for _ in 0..k {
            self.advance(&mut state, rng);
            observe(&state);
        }
        state
    }

    /// Every successor of `state` with its probability. Outcomes leading to
    /// equal states are not merged.
    pub fn transitions(&self, state: &NdrState, limit: usize) -> Result<Vec<(NdrState, f64)>, NdrError> {
        let too_many = NdrError::TooManyTransitions { limit };
        let mut out = Vec::new();
        let mut rec = Recorder {
            events: None,
            iteration: 0,
            seq: 0,
        };
        for (batch, p_batch) in self.question_distribution(state)? {
            let mut asked = state.clone();
            self.add_questions(&mut asked, batch, &mut rec);

            let mut combos: Vec<(Vec<Option<Valence>>, f64)> = vec![(Vec::new(), p_batch)];
            for q in asked.questions() {
                let dist = self.answer_distribution(&asked, q);
                if combos.len() * dist.len() > limit {
                    return Err(too_many);
                }
                combos = combos
                    .into_iter()
                    .flat_map(|(answers, p)| {
                        dist.iter().map(move |(a, pa)| {
                            let mut answers = answers.clone();
                            answers.push(*a);
                            (answers, p * pa)
                        })
                    })
                    .collect();
            }

            for (answers, p) in combos {
                let mut next = asked.clone();
                self.commit(&mut next, &answers, &mut rec);
                next.iteration += 1;
                let n = next.claims.len();
                if self.removal_rate == 0.0 || n == 0 {
                    out.push((next, p));
                } else if self.removal_rate == 1.0 {
                    self.remove(&mut next, &vec![true; n], &mut rec);
                    out.push((next, p));
                } else {
                    if n >= usize::BITS as usize - 1 || out.len() + (1usize << n) > limit {
                        return Err(too_many);
                    }
                    for mask in 0..1usize << n {
                        let removed: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                        let k = removed.iter().filter(|r| **r).count() as i32;
                        let pr = self.removal_rate.powi(k) * (1.0 - self.removal_rate).powi(n as i32 - k);
                        let mut after = next.clone();
                        self.remove(&mut after, &removed, &mut rec);
                        out.push((after, p * pr));
                    }
                }
                if out.len() > limit {
                    return Err(too_many);
                }
            }
        }
        Ok(out)
    }
}

/// Every claim carries its question's oracle valence.
pub fn is_mistake_free(claims: &ClaimsList, oracles: &SystemRegistry) -> Result<bool, FormalSystemError> {
    for c in claims {
        if oracles.oracle(&c.question)? != c.valence {
            return Ok(false);
        }
    }
    Ok(true)
}

/// No two claims share a question.
pub fn is_non_repeating(claims: &ClaimsList) -> bool {
    let mut seen = HashSet::new();
    claims.iter().all(|c| seen.insert(&c.question))
}

/// The first `n` claims.
pub fn prefix(claims: &ClaimsList, n: usize) -> Result<ClaimsList, NdrError> {
    if n > claims.len() {
        return Err(NdrError::IndexOutOfRange { n, len: claims.len() });
    }
    Ok(ClaimsList(claims.0[..n].to_vec()))
}
