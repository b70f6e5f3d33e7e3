//! Random and product joints for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{BayesError, ClaimJoint, Provenance};
use crate::formal_system::{ClaimsSet, Question, Valence};

fn normalized(outcomes: Vec<(ClaimsSet, f64)>) -> ClaimJoint {
    let total: f64 = outcomes.iter().map(|(_, w)| w).sum();
    ClaimJoint::new(outcomes.into_iter().map(|(s, w)| (s, w / total)), Provenance::Given).expect("normalized weights")
}

fn random_valence<R: Rng + ?Sized>(rng: &mut R) -> Valence {
    if rng.gen_bool(0.5) {
        Valence::Theorem
    } else {
        *Valence::Theorem.others().choose(rng).expect("three others")
    }
}

/// Up to `max_outcomes` outcomes, each answering every question once;
/// theorem with probability 1/2, otherwise a uniform other valence.
pub fn random_answer_joint<R: Rng + ?Sized>(rng: &mut R, questions: &[Question], max_outcomes: usize) -> ClaimJoint {
    let n = rng.gen_range(1..=max_outcomes.max(1));
    let outcomes = (0..n)
        .map(|_| {
            let set: ClaimsSet = questions.iter().map(|q| q.claim(random_valence(rng))).collect();
            // cubing spreads weights over several orders of magnitude
            (set, rng.gen_range(0.01f64..1.0).powi(3))
        })
        .collect();
    normalized(outcomes)
}

/// Full support over `q ∈ {t, not t}` times every subset of `paths`, with
/// random positive weights. The non-theorem answer is drawn per outcome.
pub fn random_path_joint<R: Rng + ?Sized>(rng: &mut R, q: &Question, paths: &[ClaimsSet]) -> ClaimJoint {
    let mut outcomes = Vec::new();
    for truth in [true, false] {
        for mask in 0u32..(1 << paths.len()) {
            let v = if truth {
                Valence::Theorem
            } else {
                *Valence::Theorem.others().choose(rng).expect("three others")
            };
            let mut set = ClaimsSet::new().with(q.claim(v));
            for (i, path) in paths.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    set = set.union(path);
                }
            }
            outcomes.push((set, rng.gen_range(0.01f64..1.0).powi(3)));
        }
    }
    normalized(outcomes)
}

/// Independent answers: the product of per-question valence distributions.
pub fn product_joint(marginals: &[(Question, [f64; 4])]) -> Result<ClaimJoint, BayesError> {
    let mut outcomes = vec![(ClaimsSet::new(), 1.0)];
    for (q, probs) in marginals {
        let mut next = Vec::new();
        for (set, p) in &outcomes {
            for v in Valence::ALL {
                let w = probs[v.index()];
                if w > 0.0 {
                    next.push((set.with(q.claim(v)), p * w));
                }
            }
        }
        outcomes = next;
    }
    ClaimJoint::new(outcomes, Provenance::Given)
}
