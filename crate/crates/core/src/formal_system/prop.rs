//! Propositional formulas and their truth-table classification.
//!
//! Grammar, loosest binding first (`→` is right associative):
//!
//! ```text
//! implication := disjunction ('→' implication)?
//! disjunction := conjunction ('∨' conjunction)*
//! conjunction := unary ('∧' unary)*
//! unary       := '~' unary | atom
//! atom        := variable | '(' implication ')'
//! ```

use super::Valence;

pub(crate) const NOT: char = '~';
pub(crate) const CONNECTIVES: [char; 6] = ['~', '∧', '∨', '→', '(', ')'];

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Formula {
    Var(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    fn eval(&self, assignment: u32) -> bool {
        match self {
            Formula::Var(i) => assignment >> i & 1 == 1,
            Formula::Not(f) => !f.eval(assignment),
            Formula::And(a, b) => a.eval(assignment) && b.eval(assignment),
            Formula::Or(a, b) => a.eval(assignment) || b.eval(assignment),
            Formula::Implies(a, b) => !a.eval(assignment) || b.eval(assignment),
        }
    }
}

struct Parser<'a> {
    symbols: Vec<char>,
    pos: usize,
    variables: &'a [char],
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.symbols.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Option<Formula> {
        let lhs = self.disjunction()?;
        if self.eat('→') {
            let rhs = self.implication()?;
            return Some(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Some(lhs)
    }

    fn disjunction(&mut self) -> Option<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat('∨') {
            let rhs = self.conjunction()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Some(lhs)
    }

    fn conjunction(&mut self) -> Option<Formula> {
        let mut lhs = self.unary()?;
        while self.eat('∧') {
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Some(lhs)
    }

    fn unary(&mut self) -> Option<Formula> {
        if self.eat(NOT) {
            return Some(Formula::Not(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Option<Formula> {
        if self.eat('(') {
            let inner = self.implication()?;
            return self.eat(')').then_some(inner);
        }
        let c = self.peek()?;
        let index = self.variables.iter().position(|&v| v == c)?;
        self.pos += 1;
        Some(Formula::Var(index))
    }
}

pub(crate) fn parse(s: &str, variables: &[char]) -> Option<Formula> {
    let mut parser = Parser {
        symbols: s.chars().collect(),
        pos: 0,
        variables,
    };
    let formula = parser.implication()?;
    (parser.pos == parser.symbols.len()).then_some(formula)
}

pub(crate) fn classify(s: &str, variables: &[char]) -> Valence {
    let Some(formula) = parse(s, variables) else {
        return Valence::NotWff;
    };
    assert!(variables.len() < 32, "truth tables limited to 31 variables");
    let rows = 1u32 << variables.len();
    let satisfied = (0..rows).filter(|&a| formula.eval(a)).count() as u32;
    if satisfied == rows {
        Valence::Theorem
    } else if satisfied == 0 {
        Valence::Antitheorem
    } else {
        Valence::Undecidable
    }
}
