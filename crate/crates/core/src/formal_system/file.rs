//! TOML description of a custom formal system.
//!
//! ```toml
//! id = "SYNTHU"
//! alphabet = ["0", "1", "a", "t", "u", "~"]
//! not_symbol = "~"
//! rule = "explicit-table"
//! default = "n"
//!
//! [table]
//! t0 = "t"
//! "~t0" = "a"
//! u0 = "u"
//! ```
//!
//! `rule = "truth-table"` takes `variables = ["p", "q"]`;
//! `rule = "arithmetic-eval"` takes `max_digit = 3`. For those two kinds the
//! alphabet may be omitted and is derived from the parameters.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{arith, prop, FormalSystem, FormalSystemError, Valence, ValenceRule};

#[derive(Debug, Error)]
pub enum SystemFileError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing system file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
    #[error(transparent)]
    System(#[from] FormalSystemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    TruthTable,
    ArithmeticEval,
    ExplicitTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    #[serde(default = "default_not")]
    pub not_symbol: String,
    pub rule: RuleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_digit: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<Valence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, Valence>>,
}

fn default_not() -> String {
    "~".into()
}

fn single_char(field: &'static str, s: &str) -> Result<char, SystemFileError> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(SystemFileError::Field {
            field,
            reason: format!("{s:?} is not a single symbol"),
        }),
    }
}

fn char_list(field: &'static str, v: &[String]) -> Result<Vec<char>, SystemFileError> {
    v.iter().map(|s| single_char(field, s)).collect()
}

impl SystemFile {
    pub fn load(path: &Path) -> Result<Self, SystemFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| SystemFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, SystemFileError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_system(&self) -> Result<FormalSystem, SystemFileError> {
        let not_symbol = single_char("not_symbol", &self.not_symbol)?;
        let missing = |field: &'static str| SystemFileError::Field {
            field,
            reason: "required for this rule kind".into(),
        };
        let (rule, derived_alphabet) = match self.rule {
            RuleKind::TruthTable => {
                let variables = char_list("variables", self.variables.as_deref().ok_or_else(|| missing("variables"))?)?;
                let mut alphabet = variables.clone();
                alphabet.extend(prop::CONNECTIVES);
                (ValenceRule::TruthTable { variables }, Some(alphabet))
            }
            RuleKind::ArithmeticEval => {
                let max_digit = self.max_digit.ok_or_else(|| missing("max_digit"))?;
                let mut alphabet: Vec<char> = arith::digits(max_digit.min(9)).collect();
                alphabet.extend(arith::operators());
                (ValenceRule::ArithmeticEval { max_digit }, Some(alphabet))
            }
            RuleKind::ExplicitTable => (
                ValenceRule::ExplicitTable {
                    entries: self.table.clone().unwrap_or_default(),
                    default: self.default.ok_or_else(|| missing("default"))?,
                },
                None,
            ),
        };
        let alphabet = match (&self.alphabet, derived_alphabet) {
            (Some(a), _) => char_list("alphabet", a)?,
            (None, Some(a)) => a,
            (None, None) => return Err(missing("alphabet")),
        };
        Ok(FormalSystem::new(&self.id, alphabet, not_symbol, rule)?)
    }

    pub fn from_system(system: &FormalSystem) -> Self {
        let strings = |v: &[char]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        let mut file = SystemFile {
            id: system.id().to_string(),
            alphabet: Some(strings(system.alphabet())),
            not_symbol: system.not_symbol().to_string(),
            rule: RuleKind::ExplicitTable,
            variables: None,
            max_digit: None,
            default: None,
            table: None,
        };
        match system.rule() {
            ValenceRule::TruthTable { variables } => {
                file.rule = RuleKind::TruthTable;
                file.variables = Some(strings(variables));
            }
            ValenceRule::ArithmeticEval { max_digit } => {
                file.rule = RuleKind::ArithmeticEval;
                file.max_digit = Some(*max_digit);
            }
            ValenceRule::ExplicitTable { entries, default } => {
                file.default = Some(*default);
                file.table = Some(entries.clone());
            }
        }
        file
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("system files always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYNTHU_EXAMPLE: &str = r#"
id = "SYNTHU"
alphabet = ["0", "1", "a", "t", "u", "~"]
rule = "explicit-table"
default = "n"

[table]
t0 = "t"
"~t0" = "a"
u0 = "u"
"#;

    #[test]
    fn parses_documented_example() {
        let system = SystemFile::parse(SYNTHU_EXAMPLE).unwrap().to_system().unwrap();
        assert_eq!(system.classify("u0").unwrap(), Valence::Undecidable);
        assert_eq!(system.classify("~t0").unwrap(), Valence::Antitheorem);
        assert_eq!(system.classify("t1").unwrap(), Valence::NotWff);
    }

    #[test]
    fn builtins_round_trip() {
        for system in [
            FormalSystem::prop(),
            FormalSystem::modarith(4).unwrap(),
            FormalSystem::synthu(),
        ] {
            let text = SystemFile::from_system(&system).to_toml();
            let back = SystemFile::parse(&text).unwrap().to_system().unwrap();
            assert_eq!(back, system);
        }
    }

    #[test]
    fn derived_alphabets() {
        let f = SystemFile::parse("id = \"P2\"\nrule = \"truth-table\"\nvariables = [\"p\", \"q\"]\n").unwrap();
        let s = f.to_system().unwrap();
        assert_eq!(s.classify("p∨~p").unwrap(), Valence::Theorem);
        assert!(s.classify("r").is_err());

        let f = SystemFile::parse("id = \"A3\"\nrule = \"arithmetic-eval\"\nmax_digit = 3\n").unwrap();
        let s = f.to_system().unwrap();
        assert_eq!(s.classify("1+2=3").unwrap(), Valence::Theorem);
        assert!(s.classify("4=4").is_err());
    }

    #[test]
    fn field_diagnostics() {
        let err = SystemFile::parse("id = \"X\"\nrule = \"explicit-table\"\ndefault = \"n\"\n")
            .unwrap()
            .to_system()
            .unwrap_err();
        assert!(err.to_string().contains("alphabet"), "{err}");

        let err = SystemFile::parse("id = \"X\"\nrule = \"magic\"\n").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");

        let err = SystemFile::parse("id = \"X\"\nalphabet = [\"ab\", \"~\"]\nrule = \"explicit-table\"\ndefault = \"n\"\n")
            .unwrap()
            .to_system()
            .unwrap_err();
        assert!(err.to_string().contains("single symbol"), "{err}");
    }
}
