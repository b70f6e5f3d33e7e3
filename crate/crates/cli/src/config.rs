//! Experiment configs: one TOML file drives every subcommand.
//!
//! ```toml
//! seed = 7
//! horizon = 4
//! replicas = 2000
//!
//! [machine]
//! systems = ["SYNTHU"]
//! question_policy = { kind = "uniform", emit_prob = 0.5 }
//! answer_kernel = { kind = "noisy-oracle", solve_rate = 0.8, noise_rate = 0.3 }
//! pool = { kind = "explicit", questions = ["SYNTHU:t0", "SYNTHU:u1"] }
//!
//! [estimate]
//! prefix_lengths = [1, 2]
//! answers = ["SYNTHU:t0"]
//! exact = true
//!
//! [[estimate.generalized]]
//! question = "SYNTHU:u1"
//! given = ["SYNTHU:t0/t"]
//! ```
//!
//! Relative paths resolve against the config file's directory. The
//! effective config written next to the outputs has them made absolute and
//! every command-line override applied, so re-running it reproduces the
//! outputs.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndr_core::formal_system::{Claim, ClaimsList, ClaimsSet, Question, SystemFile, SystemRegistry};
use ndr_core::mmh::GeneratorSpec;
use ndr_core::ndr_machine::{NdrConfig, NdrMachine};
use serde::{Deserialize, Serialize};

use crate::args::{Format, Global};
use crate::error::{io_error, CliError};

pub const EFFECTIVE_CONFIG: &str = "effective_config.toml";

fn default_horizon() -> u64 {
    1
}

fn default_replicas() -> u64 {
    1000
}

fn default_state_bound() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    /// Iterations per replica (`k_max`).
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_replicas")]
    pub replicas: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Whether `simulate` writes per-event traces.
    #[serde(default = "default_true")]
    pub trace: bool,
    /// Extra formal systems, registered next to the built-in ones.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub system_files: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub machine: Option<NdrConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mmh: Option<MmhSection>,
}

fn default_true() -> bool {
    true
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            horizon: default_horizon(),
            replicas: default_replicas(),
            format: None,
            trace: true,
            system_files: Vec::new(),
            machine: None,
            estimate: None,
            check: None,
            mmh: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prefix_lengths: Vec<usize>,
    /// Plain answer distributions.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub answers: Vec<Question>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generalized: Vec<GeneralizedRequest>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub list_conditioned: Vec<ListRequest>,
    /// Claims sets whose containment probability is estimated.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub claims: Vec<Vec<String>>,
    #[serde(default)]
    pub maximal: bool,
    /// Also compute every requested quantity on the exact chain.
    #[serde(default)]
    pub exact: bool,
    #[serde(default = "default_state_bound")]
    pub state_bound: usize,
}

impl Default for EstimateSection {
    fn default() -> Self {
        EstimateSection {
            prefix_lengths: vec![1],
            answers: Vec::new(),
            generalized: Vec::new(),
            list_conditioned: Vec::new(),
            claims: Vec::new(),
            maximal: true,
            exact: false,
            state_bound: default_state_bound(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralizedRequest {
    pub question: Question,
    #[serde(default)]
    pub given: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ListRequest {
    pub question: Question,
    pub list: Vec<String>,
    #[serde(default)]
    pub given: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abduction: Option<AbductionSuite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proofpath: Option<ProofPathSuite>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub joints: Vec<JointCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbductionSuite {
    #[serde(default = "default_abduction_joints")]
    pub joints: u64,
    #[serde(default = "default_max_outcomes")]
    pub max_outcomes: usize,
}

fn default_abduction_joints() -> u64 {
    10_000
}

fn default_max_outcomes() -> usize {
    12
}

impl Default for AbductionSuite {
    fn default() -> Self {
        AbductionSuite {
            joints: default_abduction_joints(),
            max_outcomes: default_max_outcomes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofPathSuite {
    #[serde(default = "default_proofpath_joints")]
    pub joints: u64,
    #[serde(default = "default_max_paths")]
    pub max_paths: usize,
}

fn default_proofpath_joints() -> u64 {
    1000
}

fn default_max_paths() -> usize {
    4
}

impl Default for ProofPathSuite {
    fn default() -> Self {
        ProofPathSuite {
            joints: default_proofpath_joints(),
            max_paths: default_max_paths(),
        }
    }
}

/// Checks on one joint: a joint file, or the exact chain of `[machine]` at
/// `horizon` when `file` is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointCheck {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    pub question: Question,
    /// Evidence question for the abduction check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Question>,
    /// Proof paths, each a list of claims.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmhSection {
    pub generator: GeneratorSpec,
    /// Also write the measure restricted to mistake-free instances.
    #[serde(default)]
    pub restrict: bool,
    /// Build the world of `[machine]` over WFFs up to this length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub world_bound: Option<usize>,
}

pub fn parse_claims(field: &str, items: &[String]) -> Result<Vec<Claim>, CliError> {
    items
        .iter()
        .map(|s| Claim::from_str(s).map_err(|e| CliError::Usage(format!("{field}: {s:?}: {e}"))))
        .collect()
}

pub fn parse_set(field: &str, items: &[String]) -> Result<ClaimsSet, CliError> {
    Ok(parse_claims(field, items)?.into_iter().collect())
}

pub fn parse_list(field: &str, items: &[String]) -> Result<ClaimsList, CliError> {
    Ok(ClaimsList(parse_claims(field, items)?))
}

fn absolute(base: &Path, p: &Path) -> PathBuf {
    let joined = base.join(p);
    std::fs::canonicalize(&joined).unwrap_or(joined)
}

/// A loaded config with its overrides applied, plus everything derived
/// from the command line.
#[derive(Debug)]
pub struct Context {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub format: Format,
    pub registry: SystemRegistry,
}

impl Context {
    pub fn load(global: &Global) -> Result<Self, CliError> {
        let mut config = match &global.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(io_error(path))?;
                let mut config: ExperimentConfig = toml::from_str(&text).map_err(|e| CliError::Config {
                    path: path.clone(),
                    message: e.to_string().trim_end().to_string(),
                })?;
                let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
                config.resolve_paths(&base);
                config
            }
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = global.seed {
            config.seed = seed;
        }
        if let Some(format) = global.format {
            config.format = Some(format);
        }
        let format = config.format.unwrap_or(Format::Csv);
        config.format = Some(format);
        let mut registry = SystemRegistry::builtin();
        for path in &config.system_files {
            let system = SystemFile::load(path)
                .and_then(|f| f.to_system())
                .map_err(|e| CliError::Config {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
            registry.register(system)?;
        }
        Ok(Context {
            config,
            out: global.out.clone(),
            format,
            registry,
        })
    }

    pub fn override_run(&mut self, horizon: Option<u64>, replicas: Option<u64>) {
        if let Some(k) = horizon {
            self.config.horizon = k;
        }
        if let Some(n) = replicas {
            self.config.replicas = n;
        }
    }

    pub fn machine(&self) -> Result<NdrMachine, CliError> {
        let config = self
            .config
            .machine
            .clone()
            .ok_or_else(|| CliError::Usage("the config has no [machine] section".into()))?;
        Ok(NdrMachine::new(config, &self.registry)?)
    }

    /// Creates the output directory and writes the effective config.
    pub fn prepare_output(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out).map_err(io_error(&self.out))?;
        let text = toml::to_string(&self.config).expect("configs serialize");
        crate::output::write_file(&self.out.join(EFFECTIVE_CONFIG), text.as_bytes())
    }
}

impl ExperimentConfig {
    fn resolve_paths(&mut self, base: &Path) {
        for p in &mut self.system_files {
            *p = absolute(base, p);
        }
        if let Some(check) = &mut self.check {
            for j in &mut check.joints {
                if let Some(f) = &mut j.file {
                    *f = absolute(base, f);
                }
            }
        }
        if let Some(MmhSection {
            generator: GeneratorSpec::Coinflip { machine, .. },
            ..
        }) = &mut self.mmh
        {
            *machine = absolute(base, machine);
        }
    }
}
