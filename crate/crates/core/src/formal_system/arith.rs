//! Single-digit integer arithmetic.
//!
//! ```text
//! formula  := '~' formula | expr ('=' | '<') expr
//! expr     := digit (('+' | '-') digit)*
//! ```
//!
//! True formulas are theorems, false ones antitheorems; there are no
//! undecidable strings.

use super::Valence;

pub(crate) const NOT: char = '~';

pub(crate) fn operators() -> impl Iterator<Item = char> {
    ['+', '-', '=', '<', NOT].into_iter()
}

pub(crate) fn digits(max_digit: u8) -> impl Iterator<Item = char> {
    (0..=max_digit).map(|d| char::from(b'0' + d))
}

fn expr(symbols: &[char]) -> Option<i64> {
    let mut iter = symbols.iter();
    let mut total = iter.next()?.to_digit(10)? as i64;
    loop {
        let Some(op) = iter.next() else {
            return Some(total);
        };
        let operand = iter.next()?.to_digit(10)? as i64;
        match op {
            '+' => total += operand,
            '-' => total -= operand,
            _ => return None,
        }
    }
}

fn evaluate(symbols: &[char]) -> Option<bool> {
    if let Some((&NOT, rest)) = symbols.split_first() {
        return evaluate(rest).map(|b| !b);
    }
    let split = symbols.iter().position(|&c| c == '=' || c == '<')?;
    let lhs = expr(&symbols[..split])?;
    let rhs = expr(&symbols[split + 1..])?;
    Some(match symbols[split] {
        '=' => lhs == rhs,
        _ => lhs < rhs,
    })
}

pub(crate) fn classify(s: &str) -> Valence {
    let symbols: Vec<char> = s.chars().collect();
    match evaluate(&symbols) {
        Some(true) => Valence::Theorem,
        Some(false) => Valence::Antitheorem,
        None => Valence::NotWff,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        assert_eq!(classify("1+1=2"), Valence::Theorem);
        assert_eq!(classify("2-3<0"), Valence::Theorem);
        assert_eq!(classify("~1+1=3"), Valence::Theorem);
        assert_eq!(classify("~~1+1=3"), Valence::Antitheorem);
        assert_eq!(classify("9<1+1"), Valence::Antitheorem);
    }

    #[test]
    fn malformed() {
        for s in ["", "+4-", "1+1", "1==1", "12=12", "1=1=1", "=1", "1=", "1+=2", "~"] {
            assert_eq!(classify(s), Valence::NotWff, "{s:?}");
        }
    }
}
