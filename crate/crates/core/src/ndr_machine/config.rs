//! Serializable machine configuration.
//!
//! ```toml
//! systems = ["SYNTHU"]
//! max_string_len = 2
//! enforce_non_repeating = true
//!
//! [pool]
//! kind = "explicit"
//! questions = ["SYNTHU:t0", "SYNTHU:t1"]
//!
//! [question_policy]
//! kind = "uniform"
//! emit_prob = 0.5
//!
//! [answer_kernel]
//! kind = "noisy-oracle"
//! solve_rate = 0.8
//! noise_rate = 0.1
//! propagated_noise_rate = 0.6
//!
//! [removal_policy]
//! kind = "independent"
//! removal_rate = 0.0
//!
//! [dependencies]
//! "SYNTHU:t1" = ["SYNTHU:t0"]
//! ```
//!
//! `dependencies` maps a question to its prerequisites. The greedy policy
//! scores a candidate by how many open questions list it as a prerequisite;
//! the answer kernel switches to `boosted_solve_rate` once any prerequisite
//! has been claimed and to `propagated_noise_rate` once any prerequisite has
//! been claimed wrongly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::formal_system::{Question, DEFAULT_MAX_STRING_LEN};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NdrConfig {
    pub systems: Vec<String>,
    #[serde(default = "default_max_len")]
    pub max_string_len: usize,
    #[serde(default = "default_true")]
    pub enforce_non_repeating: bool,
    #[serde(default)]
    pub pool: PoolSpec,
    pub question_policy: PolicySpec,
    pub answer_kernel: KernelSpec,
    #[serde(default)]
    pub removal_policy: RemovalSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub dependencies: BTreeMap<Question, Vec<Question>>,
}

fn default_max_len() -> usize {
    DEFAULT_MAX_STRING_LEN
}

fn default_true() -> bool {
    true
}

fn default_one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PoolSpec {
    /// All strings up to `max_string_len` of every configured system.
    #[default]
    Strings,
    Explicit { questions: Vec<Question> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicySpec {
    /// With probability `emit_prob`, one question uniform over candidates.
    Uniform {
        #[serde(default = "default_one")]
        emit_prob: f64,
    },
    /// With probability `emit_prob`, one candidate drawn with weight
    /// `wff_weight` if it is a WFF and `1 - wff_weight` otherwise.
    WffBiased {
        #[serde(default = "default_one")]
        emit_prob: f64,
        wff_weight: f64,
    },
    /// With probability `emit_prob`, one question: with probability
    /// `explore_prob` uniform over candidates, otherwise the candidate with
    /// the most open dependents (ties to the smallest question).
    BreakthroughGreedy {
        #[serde(default = "default_one")]
        emit_prob: f64,
        #[serde(default)]
        explore_prob: f64,
    },
    /// Every candidate, in pool order.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelSpec {
    /// Solve with probability `solve_rate`; a solved question gets its oracle
    /// valence with probability `1 - noise_rate`, otherwise one of the three
    /// wrong valences uniformly.
    NoisyOracle {
        solve_rate: f64,
        noise_rate: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        boosted_solve_rate: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        propagated_noise_rate: Option<f64>,
    },
}

impl KernelSpec {
    pub fn noisy_oracle(solve_rate: f64, noise_rate: f64) -> Self {
        KernelSpec::NoisyOracle {
            solve_rate,
            noise_rate,
            boosted_solve_rate: None,
            propagated_noise_rate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RemovalSpec {
    /// After committing, each claim is removed independently with
    /// probability `removal_rate`.
    Independent { removal_rate: f64 },
}

impl Default for RemovalSpec {
    fn default() -> Self {
        RemovalSpec::Independent { removal_rate: 0.0 }
    }
}

impl NdrConfig {
    /// A config over an explicit question list with the given policy and
    /// kernel, no removal and no dependencies.
    pub fn explicit(system: &str, questions: &[&str], question_policy: PolicySpec, answer_kernel: KernelSpec) -> Self {
        NdrConfig {
            systems: vec![system.to_string()],
            max_string_len: DEFAULT_MAX_STRING_LEN,
            enforce_non_repeating: true,
            pool: PoolSpec::Explicit {
                questions: questions.iter().map(|f| Question::new(system, f)).collect(),
            },
            question_policy,
            answer_kernel,
            removal_policy: RemovalSpec::default(),
            dependencies: BTreeMap::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }
}
