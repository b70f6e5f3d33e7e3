use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::estimation::{exact_chain, ExactChain};
use crate::formal_system::SystemRegistry;
use crate::ndr_machine::{KernelSpec, NdrConfig, NdrMachine, PolicySpec};

fn q(s: &str) -> Question {
    s.parse().unwrap()
}

fn set(claims: &[&str]) -> ClaimsSet {
    claims.iter().map(|c| c.parse::<Claim>().unwrap()).collect()
}

fn table(rows: &[(&[&str], f64)]) -> ClaimJoint {
    ClaimJoint::new(rows.iter().map(|(s, p)| (set(s), *p)), Provenance::Given).unwrap()
}

fn path_sets(n: usize) -> Vec<ClaimsSet> {
    (0..n).map(|i| set(&[&format!("S:p{i}/t")])).collect()
}

#[test]
fn correlated_two_question_table() {
    let joint = table(&[
        (&["S:q/t", "S:r/t"], 0.4),
        (&["S:q/t", "S:r/a"], 0.1),
        (&["S:q/a", "S:r/t"], 0.1),
        (&["S:q/a", "S:r/a"], 0.4),
    ]);
    let r = check_abduction(&joint, &q("S:q"), &q("S:r")).unwrap();
    assert!((r.premise_margin - 0.3).abs() < 1e-12 && (r.conclusion_margin - 0.3).abs() < 1e-12);
    assert!(r.premise_holds && r.conclusion_holds && r.assertable);
    assert!((joint.posterior_true(&q("S:q"), &set(&["S:r/t"])).unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn independent_questions_move_nothing() {
    let joint = product_joint(&[(q("S:q"), [0.3, 0.2, 0.1, 0.4]), (q("S:r"), [0.6, 0.4, 0.0, 0.0])]).unwrap();
    let r = check_abduction(&joint, &q("S:q"), &q("S:r")).unwrap();
    assert!(r.premise_margin.abs() < 1e-15 && r.conclusion_margin.abs() < 1e-15);
    assert!(!r.premise_holds && !r.conclusion_holds);
}

#[test]
fn abduction_preconditions() {
    let partial = table(&[(&["S:q/t", "S:r/t"], 0.5), (&["S:q/t"], 0.5)]);
    assert_eq!(
        check_abduction(&partial, &q("S:q"), &q("S:r")).unwrap_err(),
        BayesError::PrecedenceViolated {
            question: q("S:r"),
            probability: 0.5
        }
    );
    let never_true = table(&[(&["S:q/t", "S:r/a"], 1.0)]);
    assert_eq!(
        check_abduction(&never_true, &q("S:q"), &q("S:r")).unwrap_err(),
        BayesError::ConditioningUndefined(set(&["S:r/t"]))
    );
    assert!(matches!(
        ClaimJoint::new([(set(&["S:q/t"]), -0.1)], Provenance::Given),
        Err(BayesError::InvalidWeights(_))
    ));
    assert!(matches!(
        ClaimJoint::new([(set(&["S:q/t"]), 0.7), (set(&["S:q/a"]), 0.7)], Provenance::Given),
        Err(BayesError::InvalidWeights(_))
    ));
    assert!(matches!(
        ClaimJoint::new([(set(&["S:q/t"]), f64::NAN)], Provenance::Given),
        Err(BayesError::InvalidWeights(_))
    ));
}

#[test]
fn premise_and_conclusion_agree_on_random_joints() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let questions: Vec<Question> = (0..4).map(|i| q(&format!("S:x{i}"))).collect();
    let mut checked = 0;
    while checked < 2000 {
        let m = 2 + checked % 3;
        let joint = random_answer_joint(&mut rng, &questions[..m], 10);
        match check_abduction(&joint, &questions[0], &questions[1]) {
            Ok(r) => {
                assert!(r.consistent(), "{r}\n{joint:?}");
                checked += 1;
            }
            Err(BayesError::ConditioningUndefined(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn single_path_has_no_multipliers() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let paths = path_sets(1);
    let joint = random_path_joint(&mut rng, &q("S:q"), &paths);
    let r = proof_path_coefficients(&joint, &q("S:q"), &paths).unwrap();
    assert!(r.epsilon.is_empty());
    assert_eq!(r.trajectory.len(), 1);
    assert_eq!(posterior_product(&r), r.trajectory[0]);
    assert!((r.trajectory[0] - joint.posterior_true(&q("S:q"), &paths[0]).unwrap()).abs() < 1e-15);
    assert_eq!(monotonicity_check(&r), Monotonicity::Holds);
}

/// `P(v) * prod_i P(c_i | v)`, with path likelihoods `given_t[i]` and
/// `given_not_t[i]`.
fn conditionally_independent(prior: f64, given_t: &[f64], given_not_t: &[f64]) -> ClaimJoint {
    let paths = path_sets(given_t.len());
    let mut rows = Vec::new();
    for (v, pv, likelihoods) in [("t", prior, given_t), ("a", 1.0 - prior, given_not_t)] {
        for mask in 0u32..(1 << paths.len()) {
            let mut s = set(&[&format!("S:q/{v}")]);
            let mut p = pv;
            for (i, l) in likelihoods.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s = s.union(&paths[i]);
                    p *= l;
                } else {
                    p *= 1.0 - l;
                }
            }
            rows.push((s, p));
        }
    }
    ClaimJoint::new(rows, Provenance::Given).unwrap()
}

#[test]
fn conditionally_independent_paths_reduce_to_likelihoods() {
    let (lt, ln) = ([0.9, 0.6, 0.75], [0.3, 0.5, 0.2]);
    let joint = conditionally_independent(0.4, &lt, &ln);
    let r = proof_path_coefficients(&joint, &q("S:q"), &path_sets(3)).unwrap();
    for i in 0..3 {
        assert!((r.alpha[i] - lt[i]).abs() < 1e-12);
        assert!((r.beta[i] - ln[i]).abs() < 1e-12);
    }
    assert_eq!(monotonicity_check(&r), Monotonicity::Holds);
    assert!(r.trajectory.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn neutral_paths_leave_the_posterior_constant() {
    let joint = conditionally_independent(0.3, &[0.7, 0.4, 0.5], &[0.2, 0.4, 0.5]);
    let r = proof_path_coefficients(&joint, &q("S:q"), &path_sets(3)).unwrap();
    assert!(r.epsilon.iter().all(|e| (e - 1.0).abs() < 1e-12));
    assert!((r.trajectory[2] - r.trajectory[0]).abs() < 1e-12);
    assert!(r.sign_law_holds());
}

#[test]
fn product_formula_matches_direct_conditioning() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut max_err: f64 = 0.0;
    let mut increasing_cases = 0;
    for trial in 0..1000 {
        let n = 1 + trial % 4;
        let paths = path_sets(n);
        let joint = random_path_joint(&mut rng, &q("S:q"), &paths);
        let r = proof_path_coefficients(&joint, &q("S:q"), &paths).unwrap();
        // independent oracle: condition on all paths at once
        let union = paths.iter().fold(ClaimsSet::new(), |a, p| a.union(p));
        let direct = joint.posterior_true(&q("S:q"), &union).unwrap();
        max_err = max_err.max((posterior_product(&r) - direct).abs());
        assert!(r.sign_law_holds(), "{r}");
        assert!(r.bayes_factor_error() < 1e-12);
        assert!(r.trajectory.iter().all(|p| (0.0..=1.0).contains(p)));
        assert_ne!(monotonicity_check(&r), Monotonicity::Violated);
        if n > 1 && r.epsilon.iter().all(|e| *e > 1.0) {
            increasing_cases += 1;
            assert!(r.trajectory.windows(2).all(|w| w[1] > w[0]), "{r}");
        }
    }
    assert!(max_err < 1e-10, "{max_err}");
    assert!(increasing_cases > 50);
}

#[test]
fn likelihood_ratio_is_not_the_prior_odds() {
    // alpha/beta is the Bayes factor odds_i / odds_{i-1}, not odds_{i-1}
    let joint = conditionally_independent(0.5, &[0.9], &[0.3]);
    let r = proof_path_coefficients(&joint, &q("S:q"), &path_sets(1)).unwrap();
    let odds = r.odds();
    assert!((odds[0] - 1.0).abs() < 1e-12);
    assert!((r.alpha[0] / r.beta[0] - 3.0).abs() < 1e-12);
    assert!((r.alpha[0] / r.beta[0] - odds[0]).abs() > 1.0);
    assert!(r.bayes_factor_error() < 1e-12);
}

#[test]
fn monotonicity_not_applicable_when_a_path_counts_against() {
    let joint = conditionally_independent(0.5, &[0.9, 0.2], &[0.3, 0.6]);
    let r = proof_path_coefficients(&joint, &q("S:q"), &path_sets(2)).unwrap();
    assert!(r.epsilon[0] < 1.0);
    assert_eq!(monotonicity_check(&r), Monotonicity::NotApplicable);
}

#[test]
fn path_errors() {
    let joint = table(&[(&["S:q/t", "S:p0/t"], 0.5), (&["S:q/t"], 0.5)]);
    assert!(matches!(
        proof_path_coefficients(&joint, &q("S:q"), &path_sets(1)),
        Err(BayesError::ZeroDenominator(_))
    ));
}

fn machine(cfg: NdrConfig) -> NdrMachine {
    NdrMachine::new(cfg, &SystemRegistry::builtin()).unwrap()
}

/// Asks `t0`, then `t1`; a wrong answer to `t0` makes `t1` noisier.
fn sequential(eta: f64) -> NdrMachine {
    let mut cfg = NdrConfig::explicit(
        "SYNTHU",
        &["t0", "t1"],
        PolicySpec::BreakthroughGreedy {
            emit_prob: 1.0,
            explore_prob: 0.0,
        },
        KernelSpec::NoisyOracle {
            solve_rate: 1.0,
            noise_rate: eta,
            boosted_solve_rate: None,
            propagated_noise_rate: Some(0.9),
        },
    );
    cfg.dependencies = BTreeMap::from([(q("SYNTHU:t1"), vec![q("SYNTHU:t0")])]);
    machine(cfg)
}

#[test]
fn abduction_holds_for_any_noise_level() {
    for eta in [0.0, 0.1, 0.5] {
        let m = sequential(eta);
        let chain = exact_chain(&m, 2, 10_000).unwrap();
        let joint = ClaimJoint::from_exact_chain(&chain, None).unwrap();
        assert!((joint.total_mass() - 1.0).abs() < 1e-12);
        let r = check_abduction(&joint, &q("SYNTHU:t0"), &q("SYNTHU:t1")).unwrap();
        assert!(r.consistent(), "eta={eta}\n{r}");
        assert_eq!(r.premise_holds, eta > 0.0, "eta={eta}\n{r}");
    }
}

#[test]
fn exact_chain_paths_match_hand_ratios() {
    let m = machine(NdrConfig::explicit(
        "SYNTHU",
        &["t0", "a1", "u0"],
        PolicySpec::Uniform { emit_prob: 1.0 },
        KernelSpec::noisy_oracle(0.8, 0.3),
    ));
    let chain = exact_chain(&m, 4, 100_000).unwrap();
    let joint = ClaimJoint::from_exact_chain(&chain, None).unwrap();
    let target = q("SYNTHU:t0");
    let paths = vec![set(&["SYNTHU:a1/a"]), set(&["SYNTHU:u0/u"])];
    let r = proof_path_coefficients(&joint, &target, &paths).unwrap();
    // hand evaluation straight from the list distribution
    let lists = chain.list_distribution();
    let mass = |need: &[&str], t: bool| -> f64 {
        lists
            .iter()
            .filter(|(l, _)| l.contains_all(&set(need)))
            .filter(|(l, _)| {
                l.iter()
                    .any(|c| c.question == target && (c.valence == Valence::Theorem) == t)
            })
            .map(|(_, p)| p)
            .sum()
    };
    let a = [mass(&[], true), mass(&["SYNTHU:a1/a"], true), mass(&["SYNTHU:a1/a", "SYNTHU:u0/u"], true)];
    let b = [mass(&[], false), mass(&["SYNTHU:a1/a"], false), mass(&["SYNTHU:a1/a", "SYNTHU:u0/u"], false)];
    for i in 0..2 {
        assert!((r.alpha[i] - a[i + 1] / a[i]).abs() < 1e-12);
        assert!((r.beta[i] - b[i + 1] / b[i]).abs() < 1e-12);
    }
    assert!((posterior_product(&r) - a[2] / (a[2] + b[2])).abs() < 1e-12);
}

#[test]
fn conditioned_joints_reject_paths_inside_the_list() {
    let m = sequential(0.2);
    let through: ClaimsList = "[SYNTHU:t0/t]".parse().unwrap();
    let mut chain = ExactChain::new(&m, 10_000, std::slice::from_ref(&through));
    chain.advance_to(3).unwrap();
    let joint = ClaimJoint::from_exact_chain(&chain, Some(&through)).unwrap();
    assert_eq!(joint.conditioning(), Some(&through));
    assert!((joint.total_mass() - 1.0).abs() < 1e-12);
    assert_eq!(
        proof_path_coefficients(&joint, &q("SYNTHU:t1"), &[set(&["SYNTHU:t0/t"])]).unwrap_err(),
        BayesError::PathInConditioning("SYNTHU:t0/t".parse().unwrap())
    );
}

#[test]
fn empirical_joints_are_report_only() {
    let m = sequential(0.5);
    let ensemble = crate::estimation::Ensemble::simulate(&m, 2, 4000, 9, &[]).unwrap();
    let joint = ClaimJoint::from_ensemble(&ensemble, None).unwrap();
    assert_eq!(
        joint.provenance(),
        &Provenance::Empirical {
            horizon: 2,
            replicas: 4000
        }
    );
    let r = check_abduction(&joint, &q("SYNTHU:t0"), &q("SYNTHU:t1")).unwrap();
    assert!(!r.assertable);
    assert!(r.premise_tolerance > EXACT_TOL);
    assert!(r.to_string().contains("report-only"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_joints_are_normalized(seed in any::<u64>(), m in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let questions: Vec<Question> = (0..m).map(|i| q(&format!("S:x{i}"))).collect();
        let joint = random_answer_joint(&mut rng, &questions, 12);
        prop_assert!((joint.total_mass() - 1.0).abs() < 1e-12);
        for question in &questions {
            prop_assert!((joint.occurrence(question) - 1.0).abs() < 1e-12);
        }
    }
}
