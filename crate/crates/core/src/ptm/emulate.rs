//! Emulating one machine on another through an invertible tape encoding.
//!
//! The toy universal machine interprets *sweep machines*: binary machines
//! with one working state that move right rewriting each bit (or loop
//! forever on it) and, on reaching the blank after the input, either step
//! back and halt or loop. A sweep machine is encoded as three header symbols
//! followed by `#`:
//!
//! ```text
//! a0 a1 ab # input
//! ```
//!
//! where `a0`, `a1` ∈ {`0`, `1`, `x`} give the rewrite of `0` and `1`
//! (`x` = loop forever) and `ab` ∈ {`h`, `x`} says whether the blank halts.
//! The universal machine reads the header into its finite control, skips
//! the separator and rewrites the input in place, leaving the header on the
//! tape so that decoding is just stripping it.

use rand::Rng;

use super::{PtmError, RunOutcome, Shift, TapeMachine, Update};

/// An invertible map from target tapes to universal tapes.
pub trait TapeEncoding {
    fn encode(&self, input: &str) -> String;
    /// Inverse of [`TapeEncoding::encode`] on the universal machine's outputs.
    fn decode(&self, output: &str) -> Option<String>;
}

const UNIVERSAL_ALPHABET: [char; 6] = ['_', '0', '1', 'x', 'h', '#'];

fn state_name(prefix: &str, code: &[char]) -> String {
    format!("{prefix}[{}]", code.iter().collect::<String>())
}

/// The interpreter for sweep machines described in the module docs.
pub fn toy_universal() -> TapeMachine {
    let bit_actions = ['0', '1', 'x'];
    let blank_actions = ['h', 'x'];
    let mut names = vec!["read0".to_string()];
    for &a0 in &bit_actions {
        names.push(state_name("read1", &[a0]));
        for &a1 in &bit_actions {
            names.push(state_name("readb", &[a0, a1]));
            for &ab in &blank_actions {
                names.push(state_name("sep", &[a0, a1, ab]));
                names.push(state_name("apply", &[a0, a1, ab]));
            }
        }
    }
    names.push("stuck".into());
    names.push("halt".into());
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();

    TapeMachine::from_rules("toy-universal", &refs, &UNIVERSAL_ALPHABET, '_', "read0", "halt", |state, c| {
        let stuck = (c, Shift::Stay, "stuck".to_string());
        if state == "stuck" {
            return stuck;
        }
        if state == "read0" {
            return match c {
                '0' | '1' | 'x' => (c, Shift::Right, state_name("read1", &[c])),
                _ => stuck,
            };
        }
        let code: Vec<char> = state[state.find('[').unwrap() + 1..state.len() - 1].chars().collect();
        match (&state[..state.find('[').unwrap()], c) {
            ("read1", '0' | '1' | 'x') => (c, Shift::Right, state_name("readb", &[code[0], c])),
            ("readb", 'h' | 'x') => (c, Shift::Right, state_name("sep", &[code[0], code[1], c])),
            ("sep", '#') => (c, Shift::Right, state_name("apply", &code)),
            ("apply", '0' | '1') => {
                let action = if c == '0' { code[0] } else { code[1] };
                if action == 'x' {
                    (c, Shift::Stay, state.to_string())
                } else {
                    (action, Shift::Right, state.to_string())
                }
            }
            ("apply", '_') if code[2] == 'h' => ('_', Shift::Left, "halt".to_string()),
            ("apply", '_') => ('_', Shift::Stay, state.to_string()),
            _ => stuck,
        }
    })
    .expect("toy universal machine is well formed")
}

/// Header encoding of a sweep machine for [`toy_universal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepEncoding {
    header: String,
}

impl SweepEncoding {
    /// Uses a raw three-symbol header such as `"10h"`.
    pub fn from_header(header: &str) -> Result<Self, PtmError> {
        let c: Vec<char> = header.chars().collect();
        let ok = c.len() == 3
            && c[..2].iter().all(|x| matches!(x, '0' | '1' | 'x'))
            && matches!(c[2], 'h' | 'x');
        if !ok {
            return Err(PtmError::NotEmulable(format!("header {header:?}")));
        }
        Ok(SweepEncoding { header: header.to_string() })
    }

    /// Compiles `target` if it computes the same partial function as some
    /// sweep machine. Recognized: sweep machines themselves, and machines
    /// that halt immediately without writing (which behave like the copying
    /// sweep `01h`).
    pub fn for_target(target: &TapeMachine) -> Result<Self, PtmError> {
        let not_emulable = || PtmError::NotEmulable(target.name().to_string());
        let Update::Deterministic(table) = target.update() else {
            return Err(not_emulable());
        };
        let alphabet = target.alphabet();
        let mut sorted = alphabet.to_vec();
        sorted.sort_unstable();
        if sorted != ['0', '1', '_'] || target.blank_symbol() != '_' || target.states().len() != 2 {
            return Err(not_emulable());
        }
        let (s, halt) = (target.start(), target.halt());
        if s == halt {
            return Err(not_emulable());
        }
        let action = |c: char| table[s * alphabet.len() + alphabet.iter().position(|&x| x == c).unwrap()];
        let sym = |c: char| alphabet.iter().position(|&x| x == c).unwrap();

        let immediate = ['_', '0', '1']
            .iter()
            .all(|&c| action(c) == super::Action { next: halt, write: sym(c), shift: Shift::Stay });
        if immediate {
            return Self::from_header("01h");
        }

        let mut header = String::new();
        for c in ['0', '1'] {
            let a = action(c);
            if a.next == s && a.shift == Shift::Right {
                header.push(alphabet[a.write]);
            } else if a.next == s && a.shift == Shift::Stay && a.write == sym(c) {
                header.push('x');
            } else {
                return Err(not_emulable());
            }
        }
        let b = action('_');
        if b.next == halt && b.shift == Shift::Left && b.write == sym('_') {
            header.push('h');
        } else if b.next == s && b.shift == Shift::Stay && b.write == sym('_') {
            header.push('x');
        } else {
            return Err(not_emulable());
        }
        Self::from_header(&header)
    }

    pub fn header(&self) -> &str {
        &self.header
    }
}

impl TapeEncoding for SweepEncoding {
    fn encode(&self, input: &str) -> String {
        format!("{}#{input}", self.header)
    }

    fn decode(&self, output: &str) -> Option<String> {
        output
            .strip_prefix(self.header.as_str())
            .and_then(|rest| rest.strip_prefix('#'))
            .map(str::to_string)
    }
}

/// Output of `universal` on `encode(input)`, decoded.
pub fn emulate<R: Rng + ?Sized>(
    universal: &TapeMachine,
    encoding: &dyn TapeEncoding,
    input: &str,
    budget: u64,
    rng: &mut R,
) -> Result<String, PtmError> {
    match universal.run(&encoding.encode(input), budget, rng)? {
        RunOutcome::Halted { output, .. } => encoding.decode(&output).ok_or(PtmError::DecodeFailed(output)),
        RunOutcome::BudgetExhausted => Err(PtmError::BudgetExhausted(budget)),
    }
}

/// Both routes of an emulation: through the universal machine and direct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmulationCheck {
    pub via_universal: Result<String, PtmError>,
    pub direct: Result<String, PtmError>,
}

impl EmulationCheck {
    /// Both halted with equal outputs, or both exhausted their budgets.
    pub fn agrees(&self) -> bool {
        match (&self.via_universal, &self.direct) {
            (Ok(a), Ok(b)) => a == b,
            (Err(PtmError::BudgetExhausted(_)), Err(PtmError::BudgetExhausted(_))) => true,
            _ => false,
        }
    }
}

pub fn check_emulation<R: Rng + ?Sized>(
    universal: &TapeMachine,
    target: &TapeMachine,
    encoding: &dyn TapeEncoding,
    input: &str,
    budget: u64,
    rng: &mut R,
) -> Result<EmulationCheck, PtmError> {
    let direct = match target.run(input, budget, rng)? {
        RunOutcome::Halted { output, .. } => Ok(output),
        RunOutcome::BudgetExhausted => Err(PtmError::BudgetExhausted(budget)),
    };
    let via_universal = match emulate(universal, encoding, input, budget, rng) {
        Err(e @ PtmError::BudgetExhausted(_)) => Err(e),
        other => Ok(other?),
    };
    Ok(EmulationCheck { via_universal, direct })
}

#[cfg(test)]
mod tests {
    use super::super::machines::*;
    use super::*;
    use crate::formal_system::StringEnumerator;
    use rand::rngs::mock::StepRng;

    fn rng() -> StepRng {
        StepRng::new(0, 0)
    }

    #[test]
    fn flipper_through_universal() {
        let u = toy_universal();
        let enc = SweepEncoding::for_target(&bit_flipper()).unwrap();
        assert_eq!(enc.header(), "10h");
        assert_eq!(emulate(&u, &enc, "10", 1000, &mut rng()).unwrap(), "01");
    }

    #[test]
    fn identity_and_loop_targets() {
        let u = toy_universal();
        let id_enc = SweepEncoding::for_target(&identity()).unwrap();
        for input in ["", "0", "101", "1101"] {
            assert_eq!(emulate(&u, &id_enc, input, 1000, &mut rng()).unwrap(), input);
        }
        let check = check_emulation(&u, &looping(), &SweepEncoding::for_target(&looping()).unwrap(), "10", 500, &mut rng()).unwrap();
        assert_eq!(check.direct, Err(PtmError::BudgetExhausted(500)));
        assert_eq!(check.via_universal, Err(PtmError::BudgetExhausted(500)));
        assert!(check.agrees());
    }

    #[test]
    fn all_sweep_machines_agree_on_short_inputs() {
        let u = toy_universal();
        for a0 in ['0', '1', 'x'] {
            for a1 in ['0', '1', 'x'] {
                for ab in ['h', 'x'] {
                    let header: String = [a0, a1, ab].iter().collect();
                    let target = TapeMachine::from_rules("sweep", &["s", "halt"], &['_', '0', '1'], '_', "s", "halt", |_, c| {
                        let a = match c { '0' => a0, '1' => a1, _ => ab };
                        match (c, a) {
                            ('_', 'h') => ('_', Shift::Left, "halt"),
                            (_, 'x') => (c, Shift::Stay, "s"),
                            (_, w) => (w, Shift::Right, "s"),
                        }
                    })
                    .unwrap();
                    let enc = SweepEncoding::for_target(&target).unwrap();
                    assert_eq!(enc.header(), header);
                    for input in StringEnumerator::new(vec!['0', '1'], 3) {
                        let check = check_emulation(&u, &target, &enc, &input, 200, &mut rng()).unwrap();
                        assert!(check.agrees(), "{header} on {input:?}: {check:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn encoding_is_invertible() {
        let enc = SweepEncoding::from_header("0xh").unwrap();
        for input in StringEnumerator::new(vec!['0', '1'], 4) {
            assert_eq!(enc.decode(&enc.encode(&input)).as_deref(), Some(input.as_str()));
        }
        assert!(SweepEncoding::from_header("0h").is_err());
        assert!(SweepEncoding::for_target(&halts_on_0_10_11()).is_err());
    }
}
