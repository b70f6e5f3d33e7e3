//! Single-tape Turing machines and their probabilistic generalization.
//!
//! A machine is the usual 7-tuple: states, an alphabet of at least three
//! symbols, a blank, a head position (`head`, starting at 0), a start state,
//! a halt state, and an update rule. Every update moves the head by at most
//! one cell and rewrites at most the cell under the head; [`Shift`] makes
//! anything else unrepresentable. Probabilistic machines replace the update
//! function by a conditional distribution over such local actions.

mod emulate;
mod file;
mod halting;

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

pub use emulate::{check_emulation, emulate, toy_universal, EmulationCheck, SweepEncoding, TapeEncoding};
pub use file::{MachineFile, MachineFileError};
pub use halting::{check_prefix_free, coin_flip_distribution, CoinFlipDistribution, HaltingSet, Truncation};

pub type StateId = usize;
pub type SymbolId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PtmError {
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("input symbol {0:?} is not a non-blank symbol of the machine")]
    BadInput(char),
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("step budget of {0} exhausted before halting")]
    BudgetExhausted(u64),
    #[error("halting set is not prefix-free: {shorter:?} is a proper prefix of {longer:?}")]
    NotPrefixFree { shorter: String, longer: String },
    #[error("halting set is empty; the coin-flipping distribution is undefined")]
    EmptyHaltingSet,
    #[error("halting sets are only enumerated for deterministic machines")]
    Stochastic,
    #[error("machine {0} cannot be emulated by the toy universal machine")]
    NotEmulable(String),
    #[error("universal output {0:?} does not decode")]
    DecodeFailed(String),
}

/// Head movement of one update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shift {
    Left,
    Stay,
    Right,
}

impl Shift {
    pub fn delta(self) -> i64 {
        match self {
            Shift::Left => -1,
            Shift::Stay => 0,
            Shift::Right => 1,
        }
    }
}

/// What one update does: enter `next`, write `write` under the head, move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Action {
    pub next: StateId,
    pub write: SymbolId,
    pub shift: Shift,
}

/// A conditional distribution over actions for every (state, symbol).
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticUpdate {
    symbols: usize,
    kernel: Vec<Vec<(Action, f64)>>,
}

impl StochasticUpdate {
    /// `kernel[state * symbols + symbol]` lists the outcomes for that pair.
    pub fn new(symbols: usize, kernel: Vec<Vec<(Action, f64)>>) -> Result<Self, PtmError> {
        if symbols == 0 || kernel.len() % symbols != 0 {
            return Err(PtmError::InvalidMachine("kernel is not a full state × symbol table".into()));
        }
        for (i, outcomes) in kernel.iter().enumerate() {
            if outcomes.iter().any(|&(_, p)| !(0.0..=1.0).contains(&p)) {
                return Err(PtmError::InvalidMachine(format!("row {i} has a probability outside [0, 1]")));
            }
            let total: f64 = outcomes.iter().map(|&(_, p)| p).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(PtmError::InvalidMachine(format!("row {i} sums to {total}, not 1")));
            }
        }
        Ok(StochasticUpdate { symbols, kernel })
    }

    pub fn outcomes(&self, state: StateId, symbol: SymbolId) -> &[(Action, f64)] {
        &self.kernel[state * self.symbols + symbol]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Update {
    Deterministic(Vec<Action>),
    Stochastic(StochasticUpdate),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TapeMachine {
    name: String,
    states: Vec<String>,
    alphabet: Vec<char>,
    blank: SymbolId,
    start: StateId,
    halt: StateId,
    update: Update,
}

/// State, head position and the finitely many non-blank cells.
///
/// Blank cells are never stored, so equal configurations compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InstantaneousDescription {
    pub state: StateId,
    pub head: i64,
    tape: BTreeMap<i64, SymbolId>,
}

impl InstantaneousDescription {
    pub fn read(&self, pos: i64, blank: SymbolId) -> SymbolId {
        self.tape.get(&pos).copied().unwrap_or(blank)
    }

    fn write(&mut self, pos: i64, symbol: SymbolId, blank: SymbolId) {
        if symbol == blank {
            self.tape.remove(&pos);
        } else {
            self.tape.insert(pos, symbol);
        }
    }

    /// Non-blank cells in position order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, SymbolId)> + '_ {
        self.tape.iter().map(|(&p, &s)| (p, s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Halted { output: String, steps: u64 },
    BudgetExhausted,
}

impl RunOutcome {
    pub fn output(&self) -> Option<&str> {
        match self {
            RunOutcome::Halted { output, .. } => Some(output),
            RunOutcome::BudgetExhausted => None,
        }
    }
}

impl TapeMachine {
    pub fn new(
        name: &str,
        states: Vec<String>,
        alphabet: Vec<char>,
        blank: SymbolId,
        start: StateId,
        halt: StateId,
        update: Update,
    ) -> Result<Self, PtmError> {
        let invalid = |m: &str| Err(PtmError::InvalidMachine(format!("{name}: {m}")));
        if alphabet.len() < 3 {
            return invalid("alphabet needs at least three symbols");
        }
        if blank >= alphabet.len() || start >= states.len() || halt >= states.len() {
            return invalid("blank, start or halt out of range");
        }
        let rows = states.len() * alphabet.len();
        let actions: Vec<&Action> = match &update {
            Update::Deterministic(table) => {
                if table.len() != rows {
                    return invalid("update is not total over states × alphabet");
                }
                table.iter().collect()
            }
            Update::Stochastic(kernel) => {
                if kernel.kernel.len() != rows || kernel.symbols != alphabet.len() {
                    return invalid("update is not total over states × alphabet");
                }
                if kernel.kernel.iter().any(Vec::is_empty) {
                    return invalid("a stochastic row has no outcomes");
                }
                kernel.kernel.iter().flatten().map(|(a, _)| a).collect()
            }
        };
        if actions.iter().any(|a| a.next >= states.len() || a.write >= alphabet.len()) {
            return invalid("an action names an unknown state or symbol");
        }
        Ok(TapeMachine {
            name: name.to_string(),
            states,
            alphabet,
            blank,
            start,
            halt,
            update,
        })
    }

    /// Builds a deterministic machine from a rule function over non-halt
    /// (state, symbol) pairs; halt-state rows are filled with no-ops.
    pub fn from_rules<N: AsRef<str>>(
        name: &str,
        states: &[&str],
        alphabet: &[char],
        blank: char,
        start: &str,
        halt: &str,
        rule: impl Fn(&str, char) -> (char, Shift, N),
    ) -> Result<Self, PtmError> {
        let state_index = |s: &str| {
            states
                .iter()
                .position(|&x| x == s)
                .ok_or_else(|| PtmError::InvalidMachine(format!("{name}: unknown state {s}")))
        };
        let symbol_index = |c: char| {
            alphabet
                .iter()
                .position(|&x| x == c)
                .ok_or_else(|| PtmError::InvalidMachine(format!("{name}: unknown symbol {c:?}")))
        };
        let halt_id = state_index(halt)?;
        let mut table = Vec::with_capacity(states.len() * alphabet.len());
        for (si, &s) in states.iter().enumerate() {
            for (ci, &c) in alphabet.iter().enumerate() {
                if si == halt_id {
                    table.push(Action { next: si, write: ci, shift: Shift::Stay });
                    continue;
                }
                let (write, shift, next) = rule(s, c);
                table.push(Action {
                    next: state_index(next.as_ref())?,
                    write: symbol_index(write)?,
                    shift,
                });
            }
        }
        TapeMachine::new(
            name,
            states.iter().map(|s| s.to_string()).collect(),
            alphabet.to_vec(),
            symbol_index(blank)?,
            state_index(start)?,
            halt_id,
            Update::Deterministic(table),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn blank(&self) -> SymbolId {
        self.blank
    }

    pub fn blank_symbol(&self) -> char {
        self.alphabet[self.blank]
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn halt(&self) -> StateId {
        self.halt
    }

    pub fn update(&self) -> &Update {
        &self.update
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.update, Update::Deterministic(_))
    }

    /// Non-blank symbols in alphabet order; inputs are strings over these.
    pub fn input_alphabet(&self) -> Vec<char> {
        self.alphabet
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.blank)
            .map(|(_, &c)| c)
            .collect()
    }

    fn symbol_id(&self, c: char) -> Option<SymbolId> {
        self.alphabet.iter().position(|&x| x == c)
    }

    /// Start-state ID with `input` written from cell 0 and the head at 0.
    pub fn initial(&self, input: &str) -> Result<InstantaneousDescription, PtmError> {
        let mut id = InstantaneousDescription {
            state: self.start,
            head: 0,
            tape: BTreeMap::new(),
        };
        for (pos, c) in input.chars().enumerate() {
            match self.symbol_id(c) {
                Some(s) if s != self.blank => id.write(pos as i64, s, self.blank),
                _ => return Err(PtmError::BadInput(c)),
            }
        }
        Ok(id)
    }

    /// Applies one update. Halt-state IDs are returned unchanged; deterministic
    /// machines never touch `rng`.
    pub fn step<R: Rng + ?Sized>(&self, id: &InstantaneousDescription, rng: &mut R) -> InstantaneousDescription {
        if id.state == self.halt {
            return id.clone();
        }
        let symbol = id.read(id.head, self.blank);
        let action = match &self.update {
            Update::Deterministic(table) => table[id.state * self.alphabet.len() + symbol],
            Update::Stochastic(kernel) => {
                let outcomes = kernel.outcomes(id.state, symbol);
                if outcomes.len() == 1 {
                    outcomes[0].0
                } else {
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    let mut chosen = outcomes[outcomes.len() - 1].0;
                    for &(a, p) in outcomes {
                        acc += p;
                        if u < acc {
                            chosen = a;
                            break;
                        }
                    }
                    chosen
                }
            }
        };
        let mut next = id.clone();
        next.write(id.head, action.write, self.blank);
        next.state = action.next;
        next.head += action.shift.delta();
        next
    }

    /// The largest blank-delimited string containing the head.
    pub fn output(&self, id: &InstantaneousDescription) -> String {
        if id.read(id.head, self.blank) == self.blank {
            return String::new();
        }
        let mut lo = id.head;
        while id.read(lo - 1, self.blank) != self.blank {
            lo -= 1;
        }
        let mut hi = id.head;
        while id.read(hi + 1, self.blank) != self.blank {
            hi += 1;
        }
        (lo..=hi).map(|p| self.alphabet[id.read(p, self.blank)]).collect()
    }

    /// Runs from `input` for at most `budget` steps.
    pub fn run<R: Rng + ?Sized>(&self, input: &str, budget: u64, rng: &mut R) -> Result<RunOutcome, PtmError> {
        if budget == 0 {
            return Err(PtmError::ZeroBudget);
        }
        let mut id = self.initial(input)?;
        let mut steps = 0;
        while id.state != self.halt {
            if steps == budget {
                return Ok(RunOutcome::BudgetExhausted);
            }
            id = self.step(&id, rng);
            steps += 1;
        }
        Ok(RunOutcome::Halted {
            output: self.output(&id),
            steps,
        })
    }

    /// Every ID visited, initial one included, for at most `budget` steps.
    pub fn trace<R: Rng + ?Sized>(
        &self,
        input: &str,
        budget: u64,
        rng: &mut R,
    ) -> Result<Vec<InstantaneousDescription>, PtmError> {
        let mut id = self.initial(input)?;
        let mut out = vec![id.clone()];
        for _ in 0..budget {
            if id.state == self.halt {
                break;
            }
            id = self.step(&id, rng);
            out.push(id.clone());
        }
        Ok(out)
    }

    /// Runs a deterministic machine; `rng` is never consulted.
    pub fn run_deterministic(&self, input: &str, budget: u64) -> Result<RunOutcome, PtmError> {
        if !self.is_deterministic() {
            return Err(PtmError::Stochastic);
        }
        self.run(input, budget, &mut rand::rngs::mock::StepRng::new(0, 0))
    }
}

/// Small machines used as fixtures and in tests.
pub mod machines {
    use super::*;

    const BINARY: [char; 3] = ['_', '0', '1'];

    /// Halts after one step without touching the tape.
    pub fn identity() -> TapeMachine {
        TapeMachine::from_rules("identity", &["s", "halt"], &BINARY, '_', "s", "halt", |_, c| {
            (c, Shift::Stay, "halt")
        })
        .expect("valid")
    }

    /// Never halts.
    pub fn looping() -> TapeMachine {
        TapeMachine::from_rules("loop", &["s", "halt"], &BINARY, '_', "s", "halt", |_, c| {
            (c, Shift::Stay, "s")
        })
        .expect("valid")
    }

    /// Complements every bit left to right, then steps back onto the last bit.
    pub fn bit_flipper() -> TapeMachine {
        TapeMachine::from_rules("bit-flipper", &["flip", "halt"], &BINARY, '_', "flip", "halt", |_, c| match c {
            '0' => ('1', Shift::Right, "flip"),
            '1' => ('0', Shift::Right, "flip"),
            _ => ('_', Shift::Left, "halt"),
        })
        .expect("valid")
    }

    /// Halts exactly on the inputs `0`, `10` and `11`, leaving them as output.
    pub fn halts_on_0_10_11() -> TapeMachine {
        TapeMachine::from_rules(
            "halt-0-10-11",
            &["first", "second", "end", "stuck", "halt"],
            &BINARY,
            '_',
            "first",
            "halt",
            |s, c| match (s, c) {
                ("first", '0') => ('0', Shift::Right, "end"),
                ("first", '1') => ('1', Shift::Right, "second"),
                ("second", '0' | '1') => (c, Shift::Right, "end"),
                ("end", '_') => ('_', Shift::Left, "halt"),
                _ => (c, Shift::Stay, "stuck"),
            },
        )
        .expect("valid")
    }

    /// On a blank cell writes `0` or `1` with probability 1/2 each and halts.
    pub fn coin_writer() -> TapeMachine {
        let states = vec!["w".to_string(), "halt".to_string()];
        let mut kernel = Vec::new();
        for state in 0..2 {
            for symbol in 0..3 {
                let row = if state == 0 && symbol == 0 {
                    vec![
                        (Action { next: 1, write: 1, shift: Shift::Stay }, 0.5),
                        (Action { next: 1, write: 2, shift: Shift::Stay }, 0.5),
                    ]
                } else {
                    vec![(Action { next: 1, write: symbol, shift: Shift::Stay }, 1.0)]
                };
                kernel.push(row);
            }
        }
        TapeMachine::new(
            "coin-writer",
            states,
            BINARY.to_vec(),
            0,
            0,
            1,
            Update::Stochastic(StochasticUpdate::new(3, kernel).expect("rows sum to 1")),
        )
        .expect("valid")
    }

    /// One state that writes `1` under the head and moves right, forever.
    pub fn writer() -> TapeMachine {
        TapeMachine::from_rules("writer", &["w", "halt"], &BINARY, '_', "w", "halt", |_, _| {
            ('1', Shift::Right, "w")
        })
        .expect("valid")
    }
}
