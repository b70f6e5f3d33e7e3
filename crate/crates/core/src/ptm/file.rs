//! TOML machine definitions.
//!
//! ```toml
//! name = "bit-flipper"
//! states = ["flip", "halt"]
//! alphabet = ["_", "0", "1"]
//! blank = "_"
//! start = "flip"
//! halt = "halt"
//!
//! [[rules]]
//! state = "flip"
//! read = "0"
//! write = "1"
//! move = "R"
//! next = "flip"
//!
//! # probabilistic rule: weights must sum to 1
//! [[rules]]
//! state = "coin"
//! read = "_"
//! branches = [
//!   { write = "0", move = "S", next = "halt", weight = 0.5 },
//!   { write = "1", move = "S", next = "halt", weight = 0.5 },
//! ]
//! ```
//!
//! `read = "*"` covers every symbol without its own rule in that state and
//! `write = "*"` writes back the symbol that was read. Every non-halt
//! (state, symbol) pair must be covered; the halt state takes no rules.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Action, PtmError, Shift, StochasticUpdate, TapeMachine, Update};

#[derive(Debug, Error)]
pub enum MachineFileError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing machine file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("rule for ({state}, {read}): {reason}")]
    Rule {
        state: String,
        read: String,
        reason: String,
    },
    #[error("update is not total: no rule for ({state}, {symbol:?})")]
    NotTotal { state: String, symbol: char },
    #[error("field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
    #[error(transparent)]
    Machine(#[from] PtmError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    L,
    S,
    R,
}

impl From<Move> for Shift {
    fn from(m: Move) -> Shift {
        match m {
            Move::L => Shift::Left,
            Move::S => Shift::Stay,
            Move::R => Shift::Right,
        }
    }
}

impl From<Shift> for Move {
    fn from(s: Shift) -> Move {
        match s {
            Shift::Left => Move::L,
            Shift::Stay => Move::S,
            Shift::Right => Move::R,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub write: String,
    #[serde(rename = "move")]
    pub shift: Move,
    pub next: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleEntry {
    pub state: String,
    pub read: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub write: Option<String>,
    #[serde(rename = "move", default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Move>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<Vec<Branch>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineFile {
    pub name: String,
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub start: String,
    pub halt: String,
    #[serde(default)]
    pub rules: Vec<RuleEntry>,
}

fn single_char(field: &'static str, s: &str) -> Result<char, MachineFileError> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(MachineFileError::Field {
            field,
            reason: format!("{s:?} is not a single symbol"),
        }),
    }
}

impl MachineFile {
    pub fn load(path: &Path) -> Result<Self, MachineFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| MachineFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, MachineFileError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("machine files always serialize")
    }

    pub fn to_machine(&self) -> Result<TapeMachine, MachineFileError> {
        let alphabet: Vec<char> = self
            .alphabet
            .iter()
            .map(|s| single_char("alphabet", s))
            .collect::<Result<_, _>>()?;
        let find_state = |field: &'static str, s: &str| {
            self.states.iter().position(|x| x == s).ok_or_else(|| MachineFileError::Field {
                field,
                reason: format!("unknown state {s:?}"),
            })
        };
        let find_symbol = |field: &'static str, s: &str| -> Result<usize, MachineFileError> {
            let c = single_char(field, s)?;
            alphabet.iter().position(|&x| x == c).ok_or_else(|| MachineFileError::Field {
                field,
                reason: format!("{c:?} is not in the alphabet"),
            })
        };
        let blank = find_symbol("blank", &self.blank)?;
        let start = find_state("start", &self.start)?;
        let halt = find_state("halt", &self.halt)?;

        // (state, Some(symbol)) for specific rules, (state, None) for wildcards
        let mut rules: BTreeMap<(usize, Option<usize>), &RuleEntry> = BTreeMap::new();
        for rule in &self.rules {
            let rule_err = |reason: &str| MachineFileError::Rule {
                state: rule.state.clone(),
                read: rule.read.clone(),
                reason: reason.to_string(),
            };
            let state = find_state("rules.state", &rule.state)?;
            if state == halt {
                return Err(rule_err("the halt state takes no rules"));
            }
            let read = if rule.read == "*" { None } else { Some(find_symbol("rules.read", &rule.read)?) };
            let simple = rule.write.is_some() && rule.shift.is_some() && rule.next.is_some();
            let any_simple = rule.write.is_some() || rule.shift.is_some() || rule.next.is_some();
            if simple == rule.branches.is_some() || (rule.branches.is_some() && any_simple) {
                return Err(rule_err("give either write/move/next or branches"));
            }
            if rules.insert((state, read), rule).is_some() {
                return Err(rule_err("duplicate rule"));
            }
        }

        let mut stochastic = false;
        let mut kernel = Vec::with_capacity(self.states.len() * alphabet.len());
        for state in 0..self.states.len() {
            for symbol in 0..alphabet.len() {
                if state == halt {
                    kernel.push(vec![(Action { next: state, write: symbol, shift: Shift::Stay }, 1.0)]);
                    continue;
                }
                let rule = rules
                    .get(&(state, Some(symbol)))
                    .or_else(|| rules.get(&(state, None)))
                    .ok_or_else(|| MachineFileError::NotTotal {
                        state: self.states[state].clone(),
                        symbol: alphabet[symbol],
                    })?;
                let action = |write: &str, shift: Move, next: &str| -> Result<Action, MachineFileError> {
                    Ok(Action {
                        next: find_state("rules.next", next)?,
                        write: if write == "*" { symbol } else { find_symbol("rules.write", write)? },
                        shift: shift.into(),
                    })
                };
                let row = match &rule.branches {
                    None => vec![(
                        action(rule.write.as_deref().unwrap(), rule.shift.unwrap(), rule.next.as_deref().unwrap())?,
                        1.0,
                    )],
                    Some(branches) => {
                        stochastic = true;
                        branches
                            .iter()
                            .map(|b| Ok((action(&b.write, b.shift, &b.next)?, b.weight)))
                            .collect::<Result<Vec<_>, MachineFileError>>()?
                    }
                };
                kernel.push(row);
            }
        }
        let update = if stochastic {
            Update::Stochastic(StochasticUpdate::new(alphabet.len(), kernel)?)
        } else {
            Update::Deterministic(kernel.into_iter().map(|row| row[0].0).collect())
        };
        Ok(TapeMachine::new(&self.name, self.states.clone(), alphabet, blank, start, halt, update)?)
    }

    /// Explicit rules for every non-halt (state, symbol) pair.
    pub fn from_machine(m: &TapeMachine) -> Self {
        let symbol = |i: usize| m.alphabet()[i].to_string();
        let mut rules = Vec::new();
        for (state, name) in m.states().iter().enumerate() {
            if state == m.halt() {
                continue;
            }
            for read in 0..m.alphabet().len() {
                let outcomes: Vec<(Action, f64)> = match m.update() {
                    Update::Deterministic(table) => vec![(table[state * m.alphabet().len() + read], 1.0)],
                    Update::Stochastic(k) => k.outcomes(state, read).to_vec(),
                };
                let mut entry = RuleEntry {
                    state: name.clone(),
                    read: symbol(read),
                    write: None,
                    shift: None,
                    next: None,
                    branches: None,
                };
                if let [(a, _)] = outcomes.as_slice() {
                    entry.write = Some(symbol(a.write));
                    entry.shift = Some(a.shift.into());
                    entry.next = Some(m.states()[a.next].clone());
                } else {
                    entry.branches = Some(
                        outcomes
                            .iter()
                            .map(|(a, w)| Branch {
                                write: symbol(a.write),
                                shift: a.shift.into(),
                                next: m.states()[a.next].clone(),
                                weight: *w,
                            })
                            .collect(),
                    );
                }
                rules.push(entry);
            }
        }
        MachineFile {
            name: m.name().to_string(),
            states: m.states().to_vec(),
            alphabet: m.alphabet().iter().map(|c| c.to_string()).collect(),
            blank: m.blank_symbol().to_string(),
            start: m.states()[m.start()].clone(),
            halt: m.states()[m.halt()].clone(),
            rules,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::machines;
    use super::*;

    #[test]
    fn documented_example_parses() {
        let text = r#"
name = "bit-flipper"
states = ["flip", "halt"]
alphabet = ["_", "0", "1"]
blank = "_"
start = "flip"
halt = "halt"

[[rules]]
state = "flip"
read = "0"
write = "1"
move = "R"
next = "flip"

[[rules]]
state = "flip"
read = "1"
write = "0"
move = "R"
next = "flip"

[[rules]]
state = "flip"
read = "_"
write = "_"
move = "L"
next = "halt"
"#;
        let m = MachineFile::parse(text).unwrap().to_machine().unwrap();
        assert_eq!(m, machines::bit_flipper());
    }

    #[test]
    fn wildcards() {
        let text = r#"
name = "loop"
states = ["s", "halt"]
alphabet = ["_", "0", "1"]
blank = "_"
start = "s"
halt = "halt"

[[rules]]
state = "s"
read = "*"
write = "*"
move = "S"
next = "s"
"#;
        let m = MachineFile::parse(text).unwrap().to_machine().unwrap();
        assert_eq!(m, machines::looping());
    }

    #[test]
    fn round_trips() {
        for m in [
            machines::identity(),
            machines::coin_writer(),
            machines::halts_on_0_10_11(),
            super::super::toy_universal(),
        ] {
            let text = MachineFile::from_machine(&m).to_toml();
            assert_eq!(MachineFile::parse(&text).unwrap().to_machine().unwrap(), m);
        }
    }

    #[test]
    fn totality_and_normalization_errors() {
        let base = "name = \"x\"\nstates = [\"s\", \"halt\"]\nalphabet = [\"_\", \"0\", \"1\"]\nblank = \"_\"\nstart = \"s\"\nhalt = \"halt\"\n";
        let partial = format!("{base}[[rules]]\nstate = \"s\"\nread = \"0\"\nwrite = \"0\"\nmove = \"R\"\nnext = \"s\"\n");
        assert!(matches!(
            MachineFile::parse(&partial).unwrap().to_machine(),
            Err(MachineFileError::NotTotal { .. })
        ));
        let bad_weights = format!(
            "{base}[[rules]]\nstate = \"s\"\nread = \"*\"\nbranches = [{{ write = \"0\", move = \"R\", next = \"s\", weight = 0.5 }}, {{ write = \"1\", move = \"R\", next = \"s\", weight = 0.4 }}]\n"
        );
        assert!(matches!(
            MachineFile::parse(&bad_weights).unwrap().to_machine(),
            Err(MachineFileError::Machine(PtmError::InvalidMachine(_)))
        ));
        let halt_rule = format!("{base}[[rules]]\nstate = \"halt\"\nread = \"*\"\nwrite = \"*\"\nmove = \"S\"\nnext = \"s\"\n");
        assert!(matches!(
            MachineFile::parse(&halt_rule).unwrap().to_machine(),
            Err(MachineFileError::Rule { .. })
        ));
        let bad_move = format!("{base}[[rules]]\nstate = \"s\"\nread = \"*\"\nwrite = \"*\"\nmove = \"2\"\nnext = \"s\"\n");
        assert!(MachineFile::parse(&bad_move).is_err());
    }
}
