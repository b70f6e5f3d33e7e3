use std::collections::BTreeSet;

use ndr_core::ptm::{machines, Action, InstantaneousDescription, Shift, StochasticUpdate, TapeMachine, Update};
use ndr_core::rng::replica_rng;
use rand::Rng;

fn random_machine<R: Rng>(rng: &mut R) -> TapeMachine {
    let n_states = rng.gen_range(2..6);
    let n_symbols = rng.gen_range(3..5);
    let shifts = [Shift::Left, Shift::Stay, Shift::Right];
    let mut kernel = Vec::new();
    for _ in 0..n_states * n_symbols {
        let k = rng.gen_range(1..4);
        let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let mut row: Vec<(Action, f64)> = weights
            .iter()
            .map(|w| {
                let action = Action {
                    next: rng.gen_range(0..n_states),
                    write: rng.gen_range(0..n_symbols),
                    shift: shifts[rng.gen_range(0..3)],
                };
                (action, w / total)
            })
            .collect();
        // absorb rounding so the row sums to 1
        let rest: f64 = row[1..].iter().map(|(_, p)| p).sum();
        row[0].1 = 1.0 - rest;
        kernel.push(row);
    }
    let states = (0..n_states).map(|i| format!("s{i}")).collect();
    let alphabet = ['_', '0', '1', '2'][..n_symbols].to_vec();
    let update = Update::Stochastic(StochasticUpdate::new(n_symbols, kernel).unwrap());
    TapeMachine::new("random", states, alphabet, 0, 0, n_states - 1, update).unwrap()
}

fn changed_cells(a: &InstantaneousDescription, b: &InstantaneousDescription, blank: usize) -> usize {
    let positions: BTreeSet<i64> = a.cells().chain(b.cells()).map(|(p, _)| p).collect();
    positions.into_iter().filter(|&p| a.read(p, blank) != b.read(p, blank)).count()
}

#[test]
fn steps_are_local() {
    let mut rng = replica_rng(2024, 0);
    let mut steps = 0u64;
    while steps < 100_000 {
        let m = random_machine(&mut rng);
        let blank = m.blank();
        let mut id = m.initial("").unwrap();
        for _ in 0..1000 {
            let next = m.step(&id, &mut rng);
            assert!((next.head - id.head).abs() <= 1);
            let changed = changed_cells(&id, &next, blank);
            assert!(changed <= 1);
            if changed == 1 {
                assert_ne!(id.read(id.head, blank), next.read(id.head, blank));
            }
            id = next;
            steps += 1;
        }
    }
}

#[test]
fn halt_states_are_fixed_points() {
    let mut rng = replica_rng(7, 0);
    for _ in 0..200 {
        let m = random_machine(&mut rng);
        let mut id = m.initial("").unwrap();
        id.state = m.halt();
        id.head = rng.gen_range(-5..5);
        assert_eq!(m.step(&id, &mut rng), id);
    }
    let m = machines::identity();
    let mut rng = replica_rng(0, 0);
    let halted = m.trace("101", 100, &mut rng).unwrap().pop().unwrap();
    assert_eq!(halted.state, m.halt());
    assert_eq!(m.step(&halted, &mut rng), halted);
}

#[test]
fn stochastic_runs_are_seed_determined() {
    let mut gen = replica_rng(99, 0);
    for i in 0..50 {
        let m = random_machine(&mut gen);
        let a = m.trace("", 500, &mut replica_rng(i, 3)).unwrap();
        let b = m.trace("", 500, &mut replica_rng(i, 3)).unwrap();
        assert_eq!(a, b);
    }
    let coin = machines::coin_writer();
    let outputs: BTreeSet<String> = (0..64)
        .map(|i| coin.run("", 100, &mut replica_rng(5, i)).unwrap().output().unwrap().to_string())
        .collect();
    assert!(outputs.len() > 1);
}

#[test]
fn coin_flip_distributions_are_normalized() {
    for m in [machines::halts_on_0_10_11(), machines::bit_flipper()] {
        let Ok(d) = m.coin_flip_distribution(4, 200) else { continue };
        assert!((d.probabilities.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }
    let d = machines::halts_on_0_10_11().coin_flip_distribution(6, 200).unwrap();
    assert_eq!(d.omega, 1.0);
}
