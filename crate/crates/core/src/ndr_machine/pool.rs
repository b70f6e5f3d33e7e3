//! The finite set of questions a policy draws from.

use std::sync::Arc;

use crate::formal_system::{FormalSystem, Question};

/// Pools at most this large may be enumerated in full (exact chains,
/// exhaustive and greedy policies, rejection fallbacks).
pub const MATERIALIZE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone)]
pub enum QuestionPool {
    /// Every string of length `≤ max_len` of each system, indexed system by
    /// system in length-then-lexicographic order.
    Strings {
        systems: Vec<(Arc<FormalSystem>, u64)>,
        max_len: usize,
        total: u64,
    },
    Explicit(Vec<Question>),
}

impl QuestionPool {
    pub fn strings(systems: Vec<Arc<FormalSystem>>, max_len: usize) -> Self {
        let systems: Vec<_> = systems
            .into_iter()
            .map(|s| {
                let n = s.string_count(max_len);
                (s, n)
            })
            .collect();
        let total = systems.iter().map(|(_, n)| n).fold(0u64, |a, &n| a.saturating_add(n));
        QuestionPool::Strings { systems, max_len, total }
    }

    pub fn len(&self) -> u64 {
        match self {
            QuestionPool::Strings { total, .. } => *total,
            QuestionPool::Explicit(qs) => qs.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_materializable(&self) -> bool {
        self.len() <= MATERIALIZE_LIMIT
    }

    /// The `i`-th question, `i < len()`.
    pub fn get(&self, mut i: u64) -> Question {
        match self {
            QuestionPool::Explicit(qs) => qs[i as usize].clone(),
            QuestionPool::Strings { systems, max_len, .. } => {
                for (system, count) in systems {
                    if i < *count {
                        return Question::from_shared(system.shared_id(), Arc::from(nth_string(system, *max_len, i)));
                    }
                    i -= count;
                }
                panic!("pool index out of range")
            }
        }
    }

    pub fn contains(&self, q: &Question) -> bool {
        match self {
            QuestionPool::Explicit(qs) => qs.contains(q),
            QuestionPool::Strings { systems, max_len, .. } => systems.iter().any(|(s, _)| {
                s.id() == q.system()
                    && q.formula().chars().count() <= *max_len
                    && q.formula().chars().all(|c| s.alphabet().contains(&c))
            }),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Question> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }
}

fn nth_string(system: &FormalSystem, max_len: usize, mut i: u64) -> String {
    let alphabet = system.alphabet();
    let base = alphabet.len() as u64;
    let mut len = 0;
    let mut block = 1u64;
    while i >= block && len < max_len {
        i -= block;
        len += 1;
        block = block.saturating_mul(base);
    }
    let mut digits = vec![0usize; len];
    for d in digits.iter_mut().rev() {
        *d = (i % base) as usize;
        i /= base;
    }
    digits.into_iter().map(|d| alphabet[d]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_matches_enumeration() {
        let synthu = Arc::new(FormalSystem::synthu());
        let prop = Arc::new(FormalSystem::prop());
        let pool = QuestionPool::strings(vec![synthu.clone(), prop.clone()], 2);
        let expected: Vec<Question> = synthu
            .enumerate_strings(2)
            .map(|s| Question::new("SYNTHU", &s))
            .chain(prop.enumerate_strings(2).map(|s| Question::new("PROP", &s)))
            .collect();
        assert_eq!(pool.len(), expected.len() as u64);
        assert_eq!(pool.iter().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn large_pools_are_indexable() {
        let m = Arc::new(FormalSystem::modarith(9).unwrap());
        let pool = QuestionPool::strings(vec![m.clone()], 12);
        assert!(!pool.is_materializable());
        assert_eq!(pool.get(0).formula(), "");
        let last = pool.get(pool.len() - 1);
        assert_eq!(last.formula().chars().count(), 12);
        assert!(last.formula().chars().all(|c| c == *m.alphabet().last().unwrap()));
    }
}
