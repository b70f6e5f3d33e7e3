//! TOML files for worlds, measures and measure generators.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Generator, MmhError, MmhMeasure, NdrWorld, NdrWorldInstance};
use crate::formal_system::SystemRegistry;
use crate::ndr_machine::{NdrConfig, NdrMachine};
use crate::ptm::{MachineFile, MachineFileError};

#[derive(Debug, Error)]
pub enum MmhFileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Machine(#[from] MachineFileError),
    #[error(transparent)]
    Mmh(#[from] MmhError),
    #[error(transparent)]
    Ndr(#[from] crate::ndr_machine::NdrError),
}

fn read(path: &Path) -> Result<String, MmhFileError> {
    std::fs::read_to_string(path).map_err(|source| MmhFileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

mod claim_strings {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::formal_system::{Claim, ClaimsSet};

    pub fn serialize<S: Serializer>(set: &ClaimsSet, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(set.iter().map(|c| c.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ClaimsSet, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        items
            .iter()
            .map(|s| s.parse::<Claim>().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// A world, with answers as `[t, a, n, u]` probabilities per formula.
pub type WorldFile = NdrWorld;

impl NdrWorld {
    pub fn parse(text: &str) -> Result<Self, MmhFileError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, MmhFileError> {
        Self::parse(&read(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("worlds serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceEntry {
    pub system: String,
    #[serde(with = "claim_strings")]
    pub claims: crate::formal_system::ClaimsSet,
    #[serde(default)]
    pub horizon: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximal: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

impl InstanceEntry {
    pub fn instance(&self) -> NdrWorldInstance {
        NdrWorldInstance {
            system: self.system.clone(),
            claims: self.claims.clone(),
            horizon: self.horizon,
            maximal: self.maximal,
        }
    }

    pub fn from_instance(inst: &NdrWorldInstance, weight: Option<f64>) -> Self {
        InstanceEntry {
            system: inst.system.clone(),
            claims: inst.claims.clone(),
            horizon: inst.horizon,
            maximal: inst.maximal,
            weight,
        }
    }
}

/// A measure over world instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub generator: Generator,
    pub instances: Vec<InstanceEntry>,
}

impl MeasureFile {
    pub fn from_measure(m: &MmhMeasure<NdrWorldInstance>) -> Self {
        MeasureFile {
            generator: m.generator.clone(),
            instances: m.support.iter().map(|(x, w)| InstanceEntry::from_instance(x, Some(*w))).collect(),
        }
    }

    pub fn to_measure(&self) -> Result<MmhMeasure<NdrWorldInstance>, MmhError> {
        let support = self
            .instances
            .iter()
            .map(|e| Ok((e.instance(), e.weight.ok_or_else(|| MmhError::InvalidWeights(format!("{} has no weight", e.claims)))?)))
            .collect::<Result<Vec<_>, MmhError>>()?;
        let mut m = MmhMeasure::explicit(support)?;
        m.generator = self.generator.clone();
        Ok(m)
    }

    pub fn parse(text: &str) -> Result<Self, MmhFileError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("measures serialize")
    }
}

/// How to build a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Explicit {
        instances: Vec<InstanceEntry>,
    },
    Sampled {
        horizon: u64,
        replicas: u64,
        config: NdrConfig,
    },
    Coinflip {
        /// Machine file, relative to the spec file.
        machine: PathBuf,
        max_len: usize,
        budget: u64,
        /// Instance per program; entries carry no weight.
        decoding: BTreeMap<String, InstanceEntry>,
    },
}

impl GeneratorSpec {
    pub fn parse(text: &str) -> Result<Self, MmhFileError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("generator specs serialize")
    }

    /// `base` resolves relative machine paths; `seed` drives sampling.
    pub fn build(&self, base: &Path, seed: u64, registry: &SystemRegistry) -> Result<MmhMeasure<NdrWorldInstance>, MmhFileError> {
        Ok(match self {
            GeneratorSpec::Explicit { instances } => MeasureFile {
                generator: Generator::ExplicitWeights,
                instances: instances.clone(),
            }
            .to_measure()?,
            GeneratorSpec::Sampled {
                horizon,
                replicas,
                config,
            } => {
                let machine = NdrMachine::new(config.clone(), registry)?;
                MmhMeasure::sampled(&machine, *horizon, *replicas, seed)?
            }
            GeneratorSpec::Coinflip {
                machine,
                max_len,
                budget,
                decoding,
            } => {
                let program = MachineFile::load(&base.join(machine))?.to_machine()?;
                let table = decoding.iter().map(|(k, e)| (k.clone(), e.instance())).collect();
                MmhMeasure::coinflip(&program, *max_len, *budget, &table)?
            }
        })
    }
}
