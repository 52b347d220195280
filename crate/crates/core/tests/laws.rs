mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use taskdecomp::algebra::{compose, finite_language, interleave, project_automaton, project_string};
use taskdecomp::equivalence::{bisimilar, simulates};
use taskdecomp::{compose_all, generate, projections, word, Automaton, Event};

/// Each state duplicated, with every transition leading to both copies of
/// its target. Bisimilar to the original.
fn split(a: &Automaton) -> Automaton {
    let mut b = Automaton::builder()
        .initial(&format!("{}'", a.state_name(a.initial())))
        .events(a.alphabet().iter().map(Event::name));
    for q in 0..a.num_states() {
        b = b.state(&format!("{}'", a.state_name(q)));
        b = b.state(&format!("{}''", a.state_name(q)));
    }
    for t in a.transitions() {
        for from in ["'", "''"] {
            for to in ["'", "''"] {
                b = b.transition(
                    &format!("{}{from}", a.state_name(t.source)),
                    t.label.name(),
                    &format!("{}{to}", a.state_name(t.target)),
                );
            }
        }
    }
    b.build().unwrap()
}

/// `a` plus extra transitions; simulates `a`.
fn widen(a: &Automaton, extra: &[(usize, usize, usize)]) -> Automaton {
    let events: Vec<&Event> = a.alphabet().iter().collect();
    let n = a.num_states();
    let mut b = Automaton::builder()
        .states(a.state_names().iter().map(String::as_str))
        .initial(a.state_name(a.initial()))
        .events(a.alphabet().iter().map(Event::name));
    for t in a.transitions() {
        b = b.transition(a.state_name(t.source), t.label.name(), a.state_name(t.target));
    }
    for &(p, e, q) in extra {
        b = b.transition(a.state_name(p % n), events[e % events.len()].name(), a.state_name(q % n));
    }
    b.build().unwrap()
}

fn extra_edges() -> impl Strategy<Value = Vec<(usize, usize, usize)>> {
    prop::collection::vec((0usize..8, 0usize..3, 0usize..8), 0..4)
}

proptest! {
    #[test]
    fn accessible_is_idempotent(a in small_automaton()) {
        let once = a.accessible();
        prop_assert_eq!(once.accessible(), once.clone());
        prop_assert_eq!(once, a);
    }

    #[test]
    fn deterministic_runs_have_at_most_one_state(seed in seeds(), s in prop::collection::vec(0usize..5, 0..6)) {
        let (a, _) = generate::instance(seed);
        let events: Vec<Event> = a.alphabet().iter().cloned().collect();
        let s: Vec<Event> = s.iter().map(|&k| events[k % events.len()].clone()).collect();
        prop_assert!(a.run(a.initial(), &s).unwrap().len() <= 1);
    }

    #[test]
    fn runs_split_at_any_point(a in small_automaton(), s in prop::collection::vec(0usize..3, 0..5), cut in 0usize..6) {
        let names = ["a", "b", "c"];
        let s: Vec<Event> = s.iter().map(|&k| ev(names[k])).collect();
        let cut = cut.min(s.len());
        let q = a.initial();
        let whole = a.run(q, &s).unwrap();
        let mut staged = BTreeSet::new();
        for mid in a.run(q, &s[..cut]).unwrap() {
            staged.extend(a.run(mid, &s[cut..]).unwrap());
        }
        prop_assert_eq!(whole, staged);
        if a.accepts(&s) {
            prop_assert!(a.accepts(&s[..cut]));
        }
    }

    #[test]
    fn simple_paths_replay(a in small_automaton()) {
        for q in 0..a.num_states() {
            let paths = a.enumerate_paths(q, 1).unwrap();
            prop_assert!(paths.iter().any(|p| p.is_empty()));
            for p in &paths {
                prop_assert!(a.run(q, &p.labels()).unwrap().contains(&p.end()));
            }
        }
    }

    #[test]
    fn projection_keeps_projected_strings(seed in seeds()) {
        let (a, d) = generate::instance(seed);
        let lang = finite_language(&a).unwrap();
        for (_, keep) in d.iter() {
            let p = project_automaton(&a, keep);
            for s in &lang {
                prop_assert!(p.accepts(&project_string(s, keep)));
            }
        }
    }

    #[test]
    fn task_is_simulated_by_its_composed_projections(seed in seeds()) {
        let (a, d) = generate::instance(seed);
        let locals = projections(&a, &d);
        let refs: Vec<&Automaton> = locals.iter().collect();
        let composed = compose_all(&refs).unwrap();
        prop_assert!(simulates(&a, &composed).is_some());
    }

    #[test]
    fn cyclic_task_is_simulated_by_its_composed_projections(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = generate::cyclic_deterministic(&mut rng, 5, 3);
        let d = generate::distribution(&mut rng, &a, 3);
        let locals = projections(&a, &d);
        let refs: Vec<&Automaton> = locals.iter().collect();
        prop_assert!(simulates(&a, &compose_all(&refs).unwrap()).is_some());
    }

    #[test]
    fn composition_commutes(a in small_automaton_any_alphabet(), b in small_automaton_any_alphabet()) {
        prop_assert!(bisimilar(&compose(&a, &b), &compose(&b, &a)).is_some());
    }

    #[test]
    fn composition_associates(
        a in small_automaton_any_alphabet(),
        b in small_automaton_any_alphabet(),
        c in small_automaton_any_alphabet(),
    ) {
        let left = compose(&compose(&a, &b), &c);
        let right = compose(&a, &compose(&b, &c));
        prop_assert!(bisimilar(&left, &right).is_some());
        prop_assert!(bisimilar(&left, &compose_all(&[&a, &b, &c]).unwrap()).is_some());
    }

    #[test]
    fn composition_is_monotone_under_simulation(
        a1 in small_automaton_any_alphabet(),
        a3 in small_automaton_any_alphabet(),
        x in extra_edges(),
        y in extra_edges(),
    ) {
        let a2 = widen(&a1, &x);
        let a4 = widen(&a3, &y);
        prop_assert!(simulates(&a1, &a2).is_some());
        prop_assert!(simulates(&a3, &a4).is_some());
        prop_assert!(simulates(&compose(&a1, &a3), &compose(&a2, &a4)).is_some());
    }

    #[test]
    fn composition_is_monotone_under_bisimulation(
        a1 in small_automaton_any_alphabet(),
        a3 in small_automaton_any_alphabet(),
    ) {
        let a2 = split(&a1);
        let a4 = split(&a3);
        prop_assert!(bisimilar(&a1, &a2).is_some());
        prop_assert!(bisimilar(&compose(&a1, &a3), &compose(&a2, &a4)).is_some());
    }

    #[test]
    fn bisimilarity_is_an_equivalence(
        a in small_automaton(),
        b in small_automaton(),
        c in small_automaton(),
    ) {
        prop_assert!(bisimilar(&a, &a).is_some());
        prop_assert_eq!(bisimilar(&a, &b).is_some(), bisimilar(&b, &a).is_some());
        if let Some(w) = bisimilar(&a, &b) {
            let back = bisimilar(&b, &a).unwrap();
            prop_assert_eq!(w.inverse(), back.pairs);
        }
        if bisimilar(&a, &b).is_some() && bisimilar(&b, &c).is_some() {
            prop_assert!(bisimilar(&a, &c).is_some());
        }
        let s = split(&a);
        let ss = split(&s);
        prop_assert!(bisimilar(&a, &ss).is_some());
    }

    #[test]
    fn bisimilar_implies_mutual_simulation(a in small_automaton(), b in small_automaton()) {
        if bisimilar(&a, &b).is_some() {
            prop_assert!(simulates(&a, &b).is_some());
            prop_assert!(simulates(&b, &a).is_some());
        }
    }

    #[test]
    fn interleave_matches_brute_force(
        s in prop::collection::vec(0usize..4, 0..4),
        t in prop::collection::vec(0usize..4, 0..4),
        extra1 in prop::collection::vec(0usize..4, 0..2),
        extra2 in prop::collection::vec(0usize..4, 0..2),
    ) {
        let names = ["a", "b", "e1", "e2"];
        let s: Vec<Event> = s.iter().map(|&k| ev(names[k])).collect();
        let t: Vec<Event> = t.iter().map(|&k| ev(names[k])).collect();
        let e1: BTreeSet<Event> = s.iter().cloned().chain(extra1.iter().map(|&k| ev(names[k]))).collect();
        let e2: BTreeSet<Event> = t.iter().cloned().chain(extra2.iter().map(|&k| ev(names[k]))).collect();
        prop_assert_eq!(interleave(&s, &t, &e1, &e2).unwrap(), brute_interleave(&s, &t, &e1, &e2));
    }
}

#[test]
fn interleave_rejects_foreign_events() {
    assert!(interleave(&word("a b"), &word("a"), &set("a"), &set("a")).is_err());
}
