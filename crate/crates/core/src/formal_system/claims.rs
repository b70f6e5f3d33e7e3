//! Questions, claims, and ordered/unordered collections of claims.
//!
//! Canonical text forms (used as outcome keys in exported tables):
//!
//! * question `SYSTEM:formula`
//! * claim `SYSTEM:formula/v` with `v` one of `t a n u`
//! * claims list `[c1;c2;…]`, claims set `{c1;c2;…}` (sorted)
//!
//! The characters `\ : ; / [ ] { }` inside a system id or formula are
//! escaped with a backslash.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FormalSystemError, Valence};

const SPECIAL: [char; 8] = ['\\', ':', ';', '/', '[', ']', '{', '}'];

fn escape_into(out: &mut String, s: &str) {
    for c in s.chars() {
        if SPECIAL.contains(&c) {
            out.push('\\');
        }
        out.push(c);
    }
}

/// Splits on unescaped `sep`, keeping escapes in the pieces.
fn split_unescaped(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut start = 0;
    let mut escaped = false;
    for (i, c) in s.char_indices() {
        if escaped {
            escaped = false;
        } else if c == '\\' {
            escaped = true;
        } else if c == sep {
            parts.push(&s[start..i]);
            start = i + c.len_utf8();
        }
    }
    parts.push(&s[start..]);
    parts
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut escaped = false;
    for c in s.chars() {
        if !escaped && c == '\\' {
            escaped = true;
            continue;
        }
        escaped = false;
        out.push(c);
    }
    out
}

fn parse_error(s: &str) -> FormalSystemError {
    FormalSystemError::Invalid {
        system: "<text>".into(),
        reason: format!("cannot parse {s:?}"),
    }
}

/// A (system, string) pair. Serializes as its canonical text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Question {
    system: Arc<str>,
    formula: Arc<str>,
}

impl Question {
    pub fn new(system: &str, formula: &str) -> Self {
        Question {
            system: Arc::from(system),
            formula: Arc::from(formula),
        }
    }

    pub fn from_shared(system: Arc<str>, formula: Arc<str>) -> Self {
        Question { system, formula }
    }

    pub fn system(&self) -> &str {
        &self.system
    }

    pub fn formula(&self) -> &str {
        &self.formula
    }

    pub fn claim(&self, valence: Valence) -> Claim {
        Claim::new(self.clone(), valence)
    }

    fn write_canonical(&self, out: &mut String) {
        escape_into(out, &self.system);
        out.push(':');
        escape_into(out, &self.formula);
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_canonical(&mut s);
        f.write_str(&s)
    }
}

impl FromStr for Question {
    type Err = FormalSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match split_unescaped(s, ':').as_slice() {
            [system, formula] if !system.is_empty() => {
                Ok(Question::new(&unescape(system), &unescape(formula)))
            }
            _ => Err(parse_error(s)),
        }
    }
}

impl TryFrom<String> for Question {
    type Error = FormalSystemError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Question> for String {
    fn from(q: Question) -> String {
        q.to_string()
    }
}

/// A question together with a claimed valence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "ClaimRepr", into = "ClaimRepr")]
pub struct Claim {
    pub question: Question,
    pub valence: Valence,
}

#[derive(Serialize, Deserialize)]
struct ClaimRepr {
    system: String,
    formula: String,
    valence: Valence,
}

impl From<ClaimRepr> for Claim {
    fn from(r: ClaimRepr) -> Self {
        Claim::new(Question::new(&r.system, &r.formula), r.valence)
    }
}

impl From<Claim> for ClaimRepr {
    fn from(c: Claim) -> Self {
        ClaimRepr {
            system: c.question.system().to_string(),
            formula: c.question.formula().to_string(),
            valence: c.valence,
        }
    }
}

impl Claim {
    pub fn new(question: Question, valence: Valence) -> Self {
        Claim { question, valence }
    }

    fn write_canonical(&self, out: &mut String) {
        self.question.write_canonical(out);
        out.push('/');
        out.push(self.valence.symbol());
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_canonical(&mut s);
        f.write_str(&s)
    }
}

impl FromStr for Claim {
    type Err = FormalSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match split_unescaped(s, '/').as_slice() {
            [question, valence] => Ok(Claim::new(question.parse()?, valence.parse()?)),
            _ => Err(parse_error(s)),
        }
    }
}

fn parse_claims(s: &str, open: char, close: char) -> Result<Vec<Claim>, FormalSystemError> {
    let inner = s
        .strip_prefix(open)
        .and_then(|rest| rest.strip_suffix(close))
        .ok_or_else(|| parse_error(s))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    split_unescaped(inner, ';').into_iter().map(str::parse).collect()
}

/// The ordered contents of a claims tape.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClaimsList(pub Vec<Claim>);

impl ClaimsList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Claim> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Claim] {
        &self.0
    }

    /// `true` iff `self` is a prefix of `other` (not necessarily proper).
    pub fn is_prefix_of(&self, other: &ClaimsList) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn contains(&self, claim: &Claim) -> bool {
        self.0.contains(claim)
    }

    /// `true` iff every claim of `set` occurs somewhere in the list.
    pub fn contains_all(&self, set: &ClaimsSet) -> bool {
        set.iter().all(|c| self.contains(c))
    }

    pub fn to_set(&self) -> ClaimsSet {
        ClaimsSet(self.0.iter().cloned().collect())
    }
}

impl From<Vec<Claim>> for ClaimsList {
    fn from(v: Vec<Claim>) -> Self {
        ClaimsList(v)
    }
}

impl fmt::Display for ClaimsList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::from("[");
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                s.push(';');
            }
            c.write_canonical(&mut s);
        }
        s.push(']');
        f.write_str(&s)
    }
}

impl FromStr for ClaimsList {
    type Err = FormalSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_claims(s, '[', ']').map(ClaimsList)
    }
}

impl<'a> IntoIterator for &'a ClaimsList {
    type Item = &'a Claim;
    type IntoIter = std::slice::Iter<'a, Claim>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// An unordered, finite collection of claims.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClaimsSet(pub BTreeSet<Claim>);

impl ClaimsSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::collections::btree_set::Iter<'_, Claim> {
        self.0.iter()
    }

    pub fn contains(&self, claim: &Claim) -> bool {
        self.0.contains(claim)
    }

    pub fn insert(&mut self, claim: Claim) -> bool {
        self.0.insert(claim)
    }

    pub fn is_subset(&self, other: &ClaimsSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &ClaimsSet) -> ClaimsSet {
        ClaimsSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn with(&self, claim: Claim) -> ClaimsSet {
        let mut out = self.clone();
        out.insert(claim);
        out
    }

    /// Claims whose question is `q`.
    pub fn answers_to<'a>(&'a self, q: &'a Question) -> impl Iterator<Item = &'a Claim> + 'a {
        self.0.iter().filter(move |c| &c.question == q)
    }

    pub fn answers(&self, q: &Question) -> bool {
        self.answers_to(q).next().is_some()
    }
}

impl FromIterator<Claim> for ClaimsSet {
    fn from_iter<I: IntoIterator<Item = Claim>>(iter: I) -> Self {
        ClaimsSet(iter.into_iter().collect())
    }
}

impl fmt::Display for ClaimsSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::from("{");
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                s.push(';');
            }
            c.write_canonical(&mut s);
        }
        s.push('}');
        f.write_str(&s)
    }
}

impl FromStr for ClaimsSet {
    type Err = FormalSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_claims(s, '{', '}').map(|v| v.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_forms() {
        let c = Question::new("MODARITH", "1+1=2").claim(Valence::Theorem);
        assert_eq!(c.to_string(), "MODARITH:1+1=2/t");
        let l = ClaimsList(vec![c.clone(), Question::new("SYNTHU", "u0").claim(Valence::Undecidable)]);
        assert_eq!(l.to_string(), "[MODARITH:1+1=2/t;SYNTHU:u0/u]");
        assert_eq!(ClaimsList::new().to_string(), "[]");
        assert_eq!("[]".parse::<ClaimsList>().unwrap(), ClaimsList::new());
        assert_eq!(l.to_set().to_string(), "{MODARITH:1+1=2/t;SYNTHU:u0/u}");
    }

    #[test]
    fn escapes_special_characters() {
        let q = Question::new("X", "a/b;c:[d]\\");
        assert_eq!(q.to_string(), "X:a\\/b\\;c\\:\\[d\\]\\\\");
        assert_eq!(q.to_string().parse::<Question>().unwrap(), q);
    }

    #[test]
    fn prefix_relation() {
        let a = Question::new("S", "a").claim(Valence::Theorem);
        let b = Question::new("S", "b").claim(Valence::Theorem);
        let short = ClaimsList(vec![a.clone()]);
        let long = ClaimsList(vec![a, b]);
        assert!(short.is_prefix_of(&long));
        assert!(!long.is_prefix_of(&short));
        assert!(ClaimsList::new().is_prefix_of(&short));
    }

    fn claim_strategy() -> impl Strategy<Value = Claim> {
        (
            "[A-Z]{1,4}",
            "[a-z0-9~+=/;:\\[\\]{}\\\\]{0,6}",
            prop::sample::select(Valence::ALL.to_vec()),
        )
            .prop_map(|(s, f, v)| Question::new(&s, &f).claim(v))
    }

    proptest! {
        #[test]
        fn list_text_round_trip(claims in prop::collection::vec(claim_strategy(), 0..5)) {
            let list = ClaimsList(claims);
            prop_assert_eq!(list.to_string().parse::<ClaimsList>().unwrap(), list.clone());
            let set = list.to_set();
            prop_assert_eq!(set.to_string().parse::<ClaimsSet>().unwrap(), set);
        }
    }
}
