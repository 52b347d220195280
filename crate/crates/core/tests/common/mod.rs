#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use proptest::prelude::*;
use taskdecomp::algebra::{project_automaton, project_string};
use taskdecomp::equivalence::simulates;
use taskdecomp::io::{parse_model, ModelDocument};
use taskdecomp::{compose_all, projections, word, Automaton, Event, EventDistribution, Witness, Word};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.aut"))
}

pub fn fixture(name: &str) -> ModelDocument {
    let path = fixture_path(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_model(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn ev(name: &str) -> Event {
    Event::new(name).unwrap()
}

pub fn set(text: &str) -> BTreeSet<Event> {
    word(text).into_iter().collect()
}

/// Automaton over `a, b, c` from an edge list; indices are taken modulo the
/// state count.
pub fn from_edges(states: usize, edges: &[(usize, usize, usize)]) -> Automaton {
    const EVENTS: [&str; 3] = ["a", "b", "c"];
    let names: Vec<String> = (0..states).map(|q| format!("s{q}")).collect();
    let mut b = Automaton::builder()
        .states(names.iter().map(String::as_str))
        .initial("s0")
        .events(EVENTS);
    for &(p, e, q) in edges {
        b = b.transition(&names[p % states], EVENTS[e % 3], &names[q % states]);
    }
    b.build().unwrap()
}

/// Small automata over `{a, b, c}`, possibly nondeterministic and cyclic.
pub fn small_automaton() -> impl Strategy<Value = Automaton> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0usize..3, 0..n), 0..=8).prop_map(move |edges| from_edges(n, &edges))
    })
}

/// Small automata over a random subset of `{a, b, c}` that still contains
/// every event used.
pub fn small_automaton_any_alphabet() -> impl Strategy<Value = Automaton> {
    (small_automaton(), prop::bool::ANY, prop::bool::ANY).prop_map(|(a, keep_b, keep_c)| {
        let used: BTreeSet<Event> = a.transitions().map(|t| t.label).collect();
        let mut names = vec!["a".to_string()];
        if keep_b || used.contains(&ev("b")) {
            names.push("b".into());
        }
        if keep_c || used.contains(&ev("c")) {
            names.push("c".into());
        }
        let mut b = Automaton::builder()
            .states(a.state_names().iter().map(String::as_str))
            .initial(a.state_name(a.initial()))
            .events(names.iter().map(String::as_str));
        for t in a.transitions() {
            b = b.transition(a.state_name(t.source), t.label.name(), a.state_name(t.target));
        }
        b.build().unwrap()
    })
}

pub fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

/// DC3 by enumerating every pair of distinct transition-simple strings.
pub fn literal_dc3(a: &Automaton, d: &EventDistribution) -> bool {
    for q in 0..a.num_states() {
        let target = a.rooted(q).unwrap();
        let words: BTreeSet<Word> = a
            .enumerate_paths(q, 1)
            .unwrap()
            .iter()
            .map(|p| p.labels())
            .collect();
        let words: Vec<Word> = words.into_iter().collect();
        for (k, s) in words.iter().enumerate() {
            for t in &words[k + 1..] {
                let obligated = (1..=d.len()).any(|i| {
                    (i + 1..=d.len()).any(|j| {
                        let shared = d.shared(i, j);
                        let (x, y) = (project_string(s, &shared), project_string(t, &shared));
                        !x.is_empty() && !y.is_empty() && x[0] == y[0]
                    })
                });
                if !obligated {
                    continue;
                }
                let mut b = Automaton::builder()
                    .initial("root")
                    .events(a.alphabet().iter().map(Event::name));
                for (tag, branch) in [("l", s), ("r", t)] {
                    let mut prev = "root".to_string();
                    for (n, e) in branch.iter().enumerate() {
                        let next = format!("{tag}{n}");
                        b = b.transition(&prev, e.name(), &next);
                        prev = next;
                    }
                }
                let two = b.build().unwrap();
                let locals = projections(&two, d);
                let refs: Vec<&Automaton> = locals.iter().collect();
                if simulates(&compose_all(&refs).unwrap(), &target).is_none() {
                    return false;
                }
            }
        }
    }
    true
}

/// All strings over `e1 ∪ e2` whose projections are prefixes of `s` and `t`,
/// by exhaustive search over candidate strings of bounded length.
pub fn brute_interleave(
    s: &[Event],
    t: &[Event],
    e1: &BTreeSet<Event>,
    e2: &BTreeSet<Event>,
) -> BTreeSet<Word> {
    let alphabet: Vec<Event> = e1.union(e2).cloned().collect();
    let max = s.len() + t.len();
    let is_prefix = |w: &[Event], of: &[Event]| w.len() <= of.len() && of[..w.len()] == *w;
    let mut out = BTreeSet::from([Vec::new()]);
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &frontier {
            for e in &alphabet {
                let mut v: Word = w.clone();
                v.push(e.clone());
                if is_prefix(&project_string(&v, e1), s) && is_prefix(&project_string(&v, e2), t) {
                    out.insert(v.clone());
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Two strings from a shared root, as one automaton.
pub fn two_branches(alphabet: &BTreeSet<Event>, s: &[Event], t: &[Event]) -> Automaton {
    let mut b = Automaton::builder()
        .initial("root")
        .events(alphabet.iter().map(Event::name));
    for (tag, branch) in [("l", s), ("r", t)] {
        let mut prev = "root".to_string();
        for (n, e) in branch.iter().enumerate() {
            let next = format!("{tag}{n}");
            b = b.transition(&prev, e.name(), &next);
            prev = next;
        }
    }
    b.build().unwrap()
}

/// Whether a reported witness is genuine evidence against its condition.
pub fn replays(a: &Automaton, d: &EventDistribution, w: &Witness) -> bool {
    match w {
        Witness::Order {
            state,
            first,
            second,
            continuation,
        } => {
            let q = a.state(state).unwrap();
            let shared = d.share_agent(first, second);
            match continuation {
                None => {
                    !shared
                        && !(a.defined(q, &[first.clone(), second.clone()])
                            && a.defined(q, &[second.clone(), first.clone()]))
                        && a.next(q, first).is_some()
                        && a.next(q, second).is_some()
                }
                Some(c) => {
                    let fwd: Word = [first.clone(), second.clone()].into_iter().chain(c.iter().cloned()).collect();
                    let bwd: Word = [second.clone(), first.clone()].into_iter().chain(c.iter().cloned()).collect();
                    !shared && a.defined(q, &fwd) && !a.defined(q, &bwd)
                }
            }
        }
        Witness::Interleaving {
            state,
            branch,
            other_branch,
            offending,
            ..
        } => {
            let q = a.state(state).unwrap();
            let two = two_branches(a.alphabet(), branch, other_branch);
            let locals = projections(&two, d);
            let refs: Vec<&Automaton> = locals.iter().collect();
            a.defined(q, branch)
                && a.defined(q, other_branch)
                && compose_all(&refs).unwrap().accepts(offending)
                && !a.defined(q, offending)
        }
        Witness::LocalNondeterminism {
            agent,
            local_state,
            event,
            successors,
            suffix,
        } => {
            let p = project_automaton(a, d.agent(*agent).unwrap());
            let x = p.state(local_state).unwrap();
            let (y1, y2) = (p.state(&successors.0).unwrap(), p.state(&successors.1).unwrap());
            let step = p.step(x, event).unwrap();
            let distinct = y1 != y2 && step.contains(&y1) && step.contains(&y2);
            match suffix {
                Some(t) => distinct && (p.defined(y1, t) != p.defined(y2, t)),
                None => distinct,
            }
        }
    }
}
