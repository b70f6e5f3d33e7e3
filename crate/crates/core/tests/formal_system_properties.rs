use ndr_core::formal_system::{FormalSystem, SystemRegistry, Valence};
use proptest::prelude::*;

fn systems() -> Vec<FormalSystem> {
    vec![FormalSystem::prop(), FormalSystem::modarith(9).unwrap(), FormalSystem::synthu()]
}

fn string_over(alphabet: Vec<char>, max_len: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(alphabet), 0..=max_len).prop_map(|cs| cs.into_iter().collect())
}

#[test]
fn every_short_string_gets_exactly_one_valence() {
    for system in systems() {
        let bound = if system.alphabet().len() > 8 { 3 } else { 4 };
        let mut seen = 0u64;
        for s in system.enumerate_strings(bound) {
            let v = system.classify(&s).unwrap();
            assert!(Valence::ALL.contains(&v));
            assert_eq!(system.is_wff(&s).unwrap(), v != Valence::NotWff, "{}:{s}", system.id());
            seen += 1;
        }
        assert_eq!(seen, system.string_count(bound));
    }
}

#[test]
fn prop_negation_swaps_theorems_and_antitheorems() {
    let prop = FormalSystem::prop();
    let mut checked = 0;
    for s in prop.enumerate_strings(5) {
        let v = prop.classify(&s).unwrap();
        if v == Valence::NotWff {
            continue;
        }
        let negated = prop.classify(&prop.negation(&s)).unwrap();
        let expected = match v {
            Valence::Theorem => Valence::Antitheorem,
            Valence::Antitheorem => Valence::Theorem,
            other => other,
        };
        assert_eq!(negated, expected, "{s}");
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn registry_oracle_agrees_with_systems() {
    let registry = SystemRegistry::builtin();
    for system in systems() {
        for s in system.enumerate_strings(2) {
            let q = ndr_core::formal_system::Question::new(system.id(), &s);
            assert_eq!(registry.oracle(&q).unwrap(), system.classify(&s).unwrap());
        }
    }
}

proptest! {
    #[test]
    fn prop_classification_is_deterministic_and_partitions(s in string_over(FormalSystem::prop().alphabet().to_vec(), 9)) {
        let prop = FormalSystem::prop();
        let v = prop.classify(&s).unwrap();
        prop_assert_eq!(v, prop.classify(&s).unwrap());
        prop_assert_eq!(prop.is_wff(&s).unwrap(), v != Valence::NotWff);
        if v != Valence::NotWff {
            let back = prop.classify(&prop.negation(&s)).unwrap();
            prop_assert_eq!(back == Valence::Theorem, v == Valence::Antitheorem);
            prop_assert_eq!(back == Valence::Antitheorem, v == Valence::Theorem);
        }
    }

    #[test]
    fn modarith_classification_is_deterministic(s in string_over(FormalSystem::modarith(9).unwrap().alphabet().to_vec(), 9)) {
        let m = FormalSystem::modarith(9).unwrap();
        let v = m.classify(&s).unwrap();
        prop_assert_eq!(v, m.classify(&s).unwrap());
        prop_assert_ne!(v, Valence::Undecidable);
        prop_assert_eq!(m.is_wff(&s).unwrap(), v != Valence::NotWff);
    }

    #[test]
    fn synthu_classification_is_total(s in string_over(FormalSystem::synthu().alphabet().to_vec(), 6)) {
        let u = FormalSystem::synthu();
        let v = u.classify(&s).unwrap();
        prop_assert_eq!(v, u.classify(&s).unwrap());
        prop_assert_eq!(u.is_wff(&s).unwrap(), v != Valence::NotWff);
    }
}
