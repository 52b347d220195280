//! Seeded random instances for tests and benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{Automaton, Event};
use crate::distribution::EventDistribution;

fn events(k: usize) -> Vec<Event> {
    (0..k)
        .map(|i| Event::new(&format!("e{i}")).expect("valid name"))
        .collect()
}

/// Deterministic acyclic automaton. Transitions only go from lower to higher
/// state indices, so the result is acyclic; it is accessible by
/// construction, though pruning may leave fewer than `states` states.
pub fn acyclic_deterministic<R: Rng>(rng: &mut R, states: usize, alphabet: usize) -> Automaton {
    let alpha = events(alphabet.max(1));
    let n = states.max(1);
    let mut succ: Vec<Vec<(Event, usize)>> = vec![Vec::new(); n];
    // Each non-initial state gets one incoming edge from an earlier state.
    for q in 1..n {
        for _ in 0..8 {
            let p = rng.gen_range(0..q);
            let e = alpha.choose(rng).expect("nonempty").clone();
            if !succ[p].iter().any(|(f, _)| *f == e) {
                succ[p].push((e, q));
                break;
            }
        }
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let p = rng.gen_range(0..n);
        if p + 1 >= n {
            continue;
        }
        let q = rng.gen_range(p + 1..n);
        let e = alpha.choose(rng).expect("nonempty").clone();
        if !succ[p].iter().any(|(f, _)| *f == e) {
            succ[p].push((e, q));
        }
    }
    let names = (0..n).map(|q| format!("q{q}")).collect();
    let used: BTreeSet<Event> = succ.iter().flatten().map(|(e, _)| e.clone()).collect();
    let alphabet = if used.is_empty() {
        alpha.into_iter().take(1).collect()
    } else {
        used
    };
    Automaton::from_raw(names, 0, alphabet, succ)
}

/// Random cover of `a`'s alphabet by `agents` nonempty event sets.
pub fn distribution<R: Rng>(rng: &mut R, a: &Automaton, agents: usize) -> EventDistribution {
    let n = agents.max(1);
    let mut sets = vec![BTreeSet::new(); n];
    for e in a.alphabet() {
        let owner = rng.gen_range(0..n);
        sets[owner].insert(e.clone());
        for (k, set) in sets.iter_mut().enumerate() {
            if k != owner && rng.gen_bool(0.3) {
                set.insert(e.clone());
            }
        }
    }
    let alphabet: Vec<&Event> = a.alphabet().iter().collect();
    for set in sets.iter_mut() {
        if set.is_empty() {
            set.insert((*alphabet.choose(rng).expect("nonempty alphabet")).clone());
        }
    }
    EventDistribution::new(sets).expect("nonempty sets")
}

/// A decomposability instance in the range used by the agreement tests:
/// at most 8 states, 5 events and 3 agents.
pub fn instance(seed: u64) -> (Automaton, EventDistribution) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = rng.gen_range(2..=8);
    let alphabet = rng.gen_range(2..=5);
    let agents = rng.gen_range(2..=3);
    let a = acyclic_deterministic(&mut rng, states, alphabet);
    let d = distribution(&mut rng, &a, agents);
    (a, d)
}

/// Small automaton, possibly nondeterministic and cyclic, over the first
/// `alphabet` events `e0, e1, ...`.
pub fn arbitrary<R: Rng>(rng: &mut R, states: usize, alphabet: usize, density: f64) -> Automaton {
    let alpha = events(alphabet.max(1));
    let n = states.max(1);
    let mut succ: Vec<Vec<(Event, usize)>> = vec![Vec::new(); n];
    for out in succ.iter_mut() {
        for e in &alpha {
            for q in 0..n {
                if rng.gen_bool(density) {
                    out.push((e.clone(), q));
                }
            }
        }
    }
    let names = (0..n).map(|q| format!("s{q}")).collect();
    Automaton::from_raw(names, 0, alpha.into_iter().collect(), succ)
}

/// Deterministic automaton with self-loops and back edges allowed.
pub fn cyclic_deterministic<R: Rng>(rng: &mut R, states: usize, alphabet: usize) -> Automaton {
    let alpha = events(alphabet.max(1));
    let n = states.max(1);
    let mut succ: Vec<Vec<(Event, usize)>> = vec![Vec::new(); n];
    for (p, out) in succ.iter_mut().enumerate() {
        for e in &alpha {
            if rng.gen_bool(0.45) {
                let q = if p + 1 < n && rng.gen_bool(0.6) {
                    p + 1
                } else {
                    rng.gen_range(0..n)
                };
                out.push((e.clone(), q));
            }
        }
    }
    let names = (0..n).map(|q| format!("q{q}")).collect();
    let used: BTreeSet<Event> = succ.iter().flatten().map(|(e, _)| e.clone()).collect();
    let alphabet = if used.is_empty() {
        alpha.into_iter().take(1).collect()
    } else {
        used
    };
    Automaton::from_raw(names, 0, alphabet, succ)
}
