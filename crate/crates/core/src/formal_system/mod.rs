//! Formal systems as alphabets plus decidable valence rules.
//!
//! Every system draws its symbols from one global symbol table (Unicode
//! scalar values), so a string is just a `str` and a system is identified by
//! a short id. Three systems ship built in:
//!
//! * `PROP`: propositional formulas over `p`, `q`, `r` with `~ ∧ ∨ →` and
//!   parentheses. Tautologies are theorems, contradictions antitheorems, and
//!   contingent formulas are classified as undecidable. That last mapping is
//!   a modeling choice: a contingent formula is not settled by the rules alone.
//! * `MODARITH`: (in)equalities between sums and differences of single-digit
//!   numerals, evaluated over the integers.
//! * `SYNTHU`: a synthetic system driven by an explicit table, used to
//!   exercise the undecidable valence.

mod arith;
mod claims;
mod file;
mod prop;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use claims::{Claim, ClaimsList, ClaimsSet, Question};
pub use file::{SystemFile, SystemFileError};

/// Maximum string length used by experiments unless configured otherwise.
pub const DEFAULT_MAX_STRING_LEN: usize = 12;

/// The four syntactic statuses a formal system can assign to a string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valence {
    #[serde(rename = "t")]
    Theorem,
    #[serde(rename = "a")]
    Antitheorem,
    #[serde(rename = "n")]
    NotWff,
    #[serde(rename = "u")]
    Undecidable,
}

impl Valence {
    pub const ALL: [Valence; 4] = [
        Valence::Theorem,
        Valence::Antitheorem,
        Valence::NotWff,
        Valence::Undecidable,
    ];

    /// Position of this valence in [`Valence::ALL`].
    pub fn index(self) -> usize {
        match self {
            Valence::Theorem => 0,
            Valence::Antitheorem => 1,
            Valence::NotWff => 2,
            Valence::Undecidable => 3,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Valence::Theorem => 't',
            Valence::Antitheorem => 'a',
            Valence::NotWff => 'n',
            Valence::Undecidable => 'u',
        }
    }

    /// The three valences different from `self`, in canonical order.
    pub fn others(self) -> [Valence; 3] {
        let mut out = [Valence::Theorem; 3];
        let mut i = 0;
        for v in Valence::ALL {
            if v != self {
                out[i] = v;
                i += 1;
            }
        }
        out
    }
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Valence {
    type Err = FormalSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "t" | "theorem" => Ok(Valence::Theorem),
            "a" | "antitheorem" => Ok(Valence::Antitheorem),
            "n" | "not-wff" => Ok(Valence::NotWff),
            "u" | "undecidable" => Ok(Valence::Undecidable),
            other => Err(FormalSystemError::UnknownValence(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormalSystemError {
    #[error("symbol {symbol:?} is not in the alphabet of {system}")]
    SymbolNotInAlphabet { system: String, symbol: char },
    #[error("unknown formal system {0:?}")]
    UnknownSystem(String),
    #[error("unknown valence {0:?}")]
    UnknownValence(String),
    #[error("invalid formal system {system}: {reason}")]
    Invalid { system: String, reason: String },
    #[error("formal system {0:?} is registered twice")]
    DuplicateSystem(String),
}

/// How a system assigns valences to strings over its alphabet.
#[derive(Debug, Clone, PartialEq)]
pub enum ValenceRule {
    /// Propositional formulas decided by truth tables.
    TruthTable { variables: Vec<char> },
    /// Integer (in)equalities over single-digit numerals `0..=max_digit`.
    ArithmeticEval { max_digit: u8 },
    /// Explicit string→valence table with a default for unlisted strings.
    ExplicitTable {
        entries: BTreeMap<String, Valence>,
        default: Valence,
    },
}

/// An alphabet together with a decidable, total valence rule.
///
/// Immutable after construction; share it behind an `Arc`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSystem {
    id: Arc<str>,
    alphabet: Vec<char>,
    not_symbol: char,
    rule: ValenceRule,
}

impl FormalSystem {
    pub fn new(
        id: &str,
        alphabet: Vec<char>,
        not_symbol: char,
        rule: ValenceRule,
    ) -> Result<Self, FormalSystemError> {
        let invalid = |reason: String| FormalSystemError::Invalid {
            system: id.to_string(),
            reason,
        };
        if id.is_empty() {
            return Err(invalid("empty id".into()));
        }
        if alphabet.is_empty() {
            return Err(invalid("empty alphabet".into()));
        }
        let mut seen = alphabet.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != alphabet.len() {
            return Err(invalid("alphabet lists a symbol twice".into()));
        }
        if !alphabet.contains(&not_symbol) {
            return Err(invalid(format!("NOT symbol {not_symbol:?} missing from alphabet")));
        }
        let system = FormalSystem {
            id: Arc::from(id),
            alphabet,
            not_symbol,
            rule,
        };
        match &system.rule {
            ValenceRule::TruthTable { variables } => {
                for c in variables.iter().chain(prop::CONNECTIVES.iter()) {
                    if !system.alphabet.contains(c) {
                        return Err(invalid(format!("truth-table symbol {c:?} missing from alphabet")));
                    }
                }
                if not_symbol != prop::NOT {
                    return Err(invalid("truth-table systems use '~' as NOT".into()));
                }
            }
            ValenceRule::ArithmeticEval { max_digit } => {
                if *max_digit > 9 {
                    return Err(invalid("max_digit must be at most 9".into()));
                }
                for c in arith::operators().chain(arith::digits(*max_digit)) {
                    if !system.alphabet.contains(&c) {
                        return Err(invalid(format!("arithmetic symbol {c:?} missing from alphabet")));
                    }
                }
                if not_symbol != arith::NOT {
                    return Err(invalid("arithmetic systems use '~' as NOT".into()));
                }
            }
            ValenceRule::ExplicitTable { entries, .. } => {
                for key in entries.keys() {
                    system.check_symbols(key)?;
                }
            }
        }
        Ok(system)
    }

    /// Propositional logic over `p`, `q`, `r`.
    pub fn prop() -> Self {
        let variables = vec!['p', 'q', 'r'];
        let mut alphabet = variables.clone();
        alphabet.extend(prop::CONNECTIVES);
        FormalSystem::new("PROP", alphabet, prop::NOT, ValenceRule::TruthTable { variables })
            .expect("built-in PROP is valid")
    }

    /// Integer arithmetic over single-digit numerals `0..=max_digit`.
    pub fn modarith(max_digit: u8) -> Result<Self, FormalSystemError> {
        let mut alphabet: Vec<char> = arith::digits(max_digit.min(9)).collect();
        alphabet.extend(arith::operators());
        FormalSystem::new("MODARITH", alphabet, arith::NOT, ValenceRule::ArithmeticEval { max_digit })
    }

    /// The synthetic table-driven system.
    ///
    /// `t0 t1` are theorems, `a0 a1` antitheorems, `u0 u1` undecidable, a
    /// leading `~` swaps theorem and antitheorem, everything else is not a WFF.
    pub fn synthu() -> Self {
        let mut entries = BTreeMap::new();
        for (head, valence, negated) in [
            ('t', Valence::Theorem, Valence::Antitheorem),
            ('a', Valence::Antitheorem, Valence::Theorem),
            ('u', Valence::Undecidable, Valence::Undecidable),
        ] {
            for digit in ['0', '1'] {
                entries.insert(format!("{head}{digit}"), valence);
                entries.insert(format!("~{head}{digit}"), negated);
            }
        }
        FormalSystem::new(
            "SYNTHU",
            vec!['0', '1', 'a', 't', 'u', '~'],
            '~',
            ValenceRule::ExplicitTable {
                entries,
                default: Valence::NotWff,
            },
        )
        .expect("built-in SYNTHU is valid")
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn shared_id(&self) -> Arc<str> {
        self.id.clone()
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn not_symbol(&self) -> char {
        self.not_symbol
    }

    pub fn rule(&self) -> &ValenceRule {
        &self.rule
    }

    fn check_symbols(&self, s: &str) -> Result<(), FormalSystemError> {
        match s.chars().find(|c| !self.alphabet.contains(c)) {
            Some(symbol) => Err(FormalSystemError::SymbolNotInAlphabet {
                system: self.id.to_string(),
                symbol,
            }),
            None => Ok(()),
        }
    }

    /// Assigns `s` its unique valence.
    pub fn classify(&self, s: &str) -> Result<Valence, FormalSystemError> {
        self.check_symbols(s)?;
        Ok(match &self.rule {
            ValenceRule::TruthTable { variables } => prop::classify(s, variables),
            ValenceRule::ArithmeticEval { .. } => arith::classify(s),
            ValenceRule::ExplicitTable { entries, default } => {
                entries.get(s).copied().unwrap_or(*default)
            }
        })
    }

    pub fn is_wff(&self, s: &str) -> Result<bool, FormalSystemError> {
        Ok(self.classify(s)? != Valence::NotWff)
    }

    /// A string whose meaning is the negation of `s`.
    ///
    /// Prefixing `~` alone would bind only to the first operand of an infix
    /// formula, so grammar-based systems wrap the operand in parentheses.
    pub fn negation(&self, s: &str) -> String {
        match &self.rule {
            ValenceRule::TruthTable { .. } => format!("{}({s})", self.not_symbol),
            _ => format!("{}{s}", self.not_symbol),
        }
    }

    pub fn enumerate_strings(&self, max_len: usize) -> StringEnumerator {
        StringEnumerator::new(self.alphabet.clone(), max_len)
    }

    /// Number of strings of length `≤ max_len`, saturating at `u64::MAX`.
    pub fn string_count(&self, max_len: usize) -> u64 {
        string_count(self.alphabet.len(), max_len)
    }
}

pub(crate) fn string_count(alphabet_len: usize, max_len: usize) -> u64 {
    let a = alphabet_len as u64;
    let mut total: u64 = 0;
    let mut layer: u64 = 1;
    for len in 0..=max_len {
        total = total.saturating_add(layer);
        if len < max_len {
            layer = layer.saturating_mul(a);
        }
    }
    total
}

/// All strings of length `≤ max_len` in length-then-lexicographic order,
/// where symbol order is the alphabet's listed order.
#[derive(Debug, Clone)]
pub struct StringEnumerator {
    alphabet: Vec<char>,
    max_len: usize,
    digits: Vec<usize>,
    done: bool,
}

impl StringEnumerator {
    pub fn new(alphabet: Vec<char>, max_len: usize) -> Self {
        StringEnumerator {
            alphabet,
            max_len,
            digits: Vec::new(),
            done: false,
        }
    }
}

impl Iterator for StringEnumerator {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        if self.done {
            return None;
        }
        let out: String = self.digits.iter().map(|&d| self.alphabet[d]).collect();
        // odometer increment; overflow grows the length
        let base = self.alphabet.len();
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                if self.digits.len() == self.max_len || base == 0 {
                    self.done = true;
                } else {
                    self.digits = vec![0; self.digits.len() + 1];
                }
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < base {
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

/// The set of formal systems an experiment can ask questions about; doubles
/// as the oracle set for mistake detection.
#[derive(Debug, Clone, Default)]
pub struct SystemRegistry {
    systems: BTreeMap<String, Arc<FormalSystem>>,
}

impl SystemRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `PROP`, `MODARITH` (digits 0–9) and `SYNTHU`.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        for system in [
            FormalSystem::prop(),
            FormalSystem::modarith(9).expect("built-in MODARITH is valid"),
            FormalSystem::synthu(),
        ] {
            reg.register(system).expect("built-in ids are distinct");
        }
        reg
    }

    pub fn register(&mut self, system: FormalSystem) -> Result<Arc<FormalSystem>, FormalSystemError> {
        if self.systems.contains_key(system.id()) {
            return Err(FormalSystemError::DuplicateSystem(system.id().to_string()));
        }
        let system = Arc::new(system);
        self.systems.insert(system.id().to_string(), system.clone());
        Ok(system)
    }

    /// Registers `system`, replacing any system with the same id.
    pub fn replace(&mut self, system: FormalSystem) -> Arc<FormalSystem> {
        let system = Arc::new(system);
        self.systems.insert(system.id().to_string(), system.clone());
        system
    }

    pub fn get(&self, id: &str) -> Result<&Arc<FormalSystem>, FormalSystemError> {
        self.systems
            .get(id)
            .ok_or_else(|| FormalSystemError::UnknownSystem(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.systems.keys().map(String::as_str)
    }

    /// The oracle valence of a question.
    pub fn oracle(&self, q: &Question) -> Result<Valence, FormalSystemError> {
        self.get(q.system())?.classify(q.formula())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_worked_examples() {
        let m = FormalSystem::modarith(9).unwrap();
        assert_eq!(m.classify("1+1=2").unwrap(), Valence::Theorem);
        assert_eq!(m.classify("1+1=3").unwrap(), Valence::Antitheorem);
        assert_eq!(m.classify("+4-").unwrap(), Valence::NotWff);
        assert!(m.is_wff("1+1=2").unwrap());
        assert!(!m.is_wff("+4-").unwrap());
    }

    #[test]
    fn prop_examples() {
        let p = FormalSystem::prop();
        assert_eq!(p.classify("p∨~p").unwrap(), Valence::Theorem);
        assert_eq!(p.classify("p∧~p").unwrap(), Valence::Antitheorem);
        assert_eq!(p.classify("p→q").unwrap(), Valence::Undecidable);
        assert!(!p.is_wff("").unwrap());
    }

    #[test]
    fn synthu_table() {
        let s = FormalSystem::synthu();
        assert_eq!(s.classify("u0").unwrap(), Valence::Undecidable);
        assert_eq!(s.classify("~t1").unwrap(), Valence::Antitheorem);
        assert_eq!(s.classify("0t").unwrap(), Valence::NotWff);
        assert_eq!(s.classify("").unwrap(), Valence::NotWff);
    }

    #[test]
    fn foreign_symbol_is_an_error() {
        let m = FormalSystem::modarith(9).unwrap();
        assert_eq!(
            m.classify("1+x=2"),
            Err(FormalSystemError::SymbolNotInAlphabet {
                system: "MODARITH".into(),
                symbol: 'x'
            })
        );
        assert!(FormalSystem::prop().is_wff("p&q").is_err());
    }

    #[test]
    fn enumeration_order_and_counts() {
        let e: Vec<String> = StringEnumerator::new(vec!['0', '1'], 1).collect();
        assert_eq!(e, ["", "0", "1"]);
        let e: Vec<String> = StringEnumerator::new(vec!['0', '1'], 2).collect();
        assert_eq!(e, ["", "0", "1", "00", "01", "10", "11"]);
        assert_eq!(StringEnumerator::new(vec!['0', '1'], 0).collect::<Vec<_>>(), [""]);

        let m = FormalSystem::modarith(9).unwrap();
        let a = m.alphabet().len();
        assert_eq!(m.enumerate_strings(2).count(), 1 + a + a * a);
        assert_eq!(m.string_count(2), (1 + a + a * a) as u64);
    }

    #[test]
    fn not_symbol_required() {
        let err = FormalSystem::new(
            "X",
            vec!['a'],
            '~',
            ValenceRule::ExplicitTable {
                entries: BTreeMap::new(),
                default: Valence::NotWff,
            },
        );
        assert!(matches!(err, Err(FormalSystemError::Invalid { .. })));
    }

    #[test]
    fn registry_lookup() {
        let reg = SystemRegistry::builtin();
        assert_eq!(reg.ids().collect::<Vec<_>>(), ["MODARITH", "PROP", "SYNTHU"]);
        let q = Question::new("MODARITH", "1+1=2");
        assert_eq!(reg.oracle(&q).unwrap(), Valence::Theorem);
        assert!(matches!(
            reg.oracle(&Question::new("ZF", "x")),
            Err(FormalSystemError::UnknownSystem(_))
        ));
    }

    #[test]
    fn others_excludes_self() {
        for v in Valence::ALL {
            let o = v.others();
            assert!(!o.contains(&v));
            assert_eq!(o.len(), 3);
        }
    }
}
