//! Simulation, bisimulation and continuation equivalence.
//!
//! All relations are greatest fixpoints computed by removing pairs from the
//! full product `Q1 × Q2` until every remaining pair satisfies the transfer
//! condition. Removals are propagated backwards through a worklist so each
//! pair is re-examined only when one of its successor pairs disappears.
//!
//! Automata are compared over the union of their alphabets with no implicit
//! self-loops: a move on an event the other side lacks is simply unmatched.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automaton::{Automaton, Event, StateIx, Word};
use crate::error::Result;

/// Pairs `(q1, q2)` witnessing that `A1` is simulated by `A2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationRelation {
    pub pairs: BTreeSet<(StateIx, StateIx)>,
}

/// A single relation closed under transfer in both directions. Its inverse
/// is a simulation of `A2` by `A1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisimulationWitness {
    pub pairs: BTreeSet<(StateIx, StateIx)>,
}

impl SimulationRelation {
    pub fn contains(&self, p: StateIx, q: StateIx) -> bool {
        self.pairs.contains(&(p, q))
    }
}

impl BisimulationWitness {
    pub fn contains(&self, p: StateIx, q: StateIx) -> bool {
        self.pairs.contains(&(p, q))
    }

    pub fn inverse(&self) -> BTreeSet<(StateIx, StateIx)> {
        self.pairs.iter().map(|&(p, q)| (q, p)).collect()
    }
}

/// Adjacency with events interned to small integers shared by both sides.
struct Interned {
    succ: Vec<Vec<(u32, usize)>>,
    pred: Vec<Vec<(u32, usize)>>,
}

fn intern(a1: &Automaton, a2: &Automaton) -> (Interned, Interned) {
    let mut ids: HashMap<&Event, u32> = HashMap::new();
    for e in a1.alphabet().iter().chain(a2.alphabet()) {
        let next = ids.len() as u32;
        ids.entry(e).or_insert(next);
    }
    let build = |a: &Automaton| {
        let n = a.num_states();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for t in a.transitions() {
            let id = ids[&t.label];
            succ[t.source].push((id, t.target));
            pred[t.target].push((id, t.source));
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
        }
        Interned { succ, pred }
    };
    (build(a1), build(a2))
}

fn label_range(list: &[(u32, usize)], e: u32) -> &[(u32, usize)] {
    let lo = list.partition_point(|(l, _)| *l < e);
    let hi = list.partition_point(|(l, _)| *l <= e);
    &list[lo..hi]
}

/// Greatest relation `R ⊆ Q1 × Q2` such that every move of the left state is
/// matched by the right one (and, when `two_way`, vice versa).
fn greatest_relation(a1: &Automaton, a2: &Automaton, two_way: bool) -> Vec<bool> {
    let (l, r) = intern(a1, a2);
    let n2 = a2.num_states();
    let n1 = a1.num_states();
    let at = |p: usize, q: usize| p * n2 + q;
    let mut rel = vec![true; n1 * n2];

    let holds = |rel: &[bool], p: usize, q: usize| -> bool {
        let forward = l.succ[p].iter().all(|&(e, p2)| {
            label_range(&r.succ[q], e)
                .iter()
                .any(|&(_, q2)| rel[at(p2, q2)])
        });
        forward
            && (!two_way
                || r.succ[q].iter().all(|&(e, q2)| {
                    label_range(&l.succ[p], e)
                        .iter()
                        .any(|&(_, p2)| rel[at(p2, q2)])
                }))
    };

    let mut queue: VecDeque<(usize, usize)> = (0..n1)
        .flat_map(|p| (0..n2).map(move |q| (p, q)))
        .collect();
    let mut queued = vec![true; n1 * n2];
    while let Some((p, q)) = queue.pop_front() {
        queued[at(p, q)] = false;
        if !rel[at(p, q)] || holds(&rel, p, q) {
            continue;
        }
        rel[at(p, q)] = false;
        // Every pair that could have relied on (p, q) is re-examined.
        for &(e, p0) in &l.pred[p] {
            for &(_, q0) in label_range(&r.pred[q], e) {
                let k = at(p0, q0);
                if rel[k] && !queued[k] {
                    queued[k] = true;
                    queue.push_back((p0, q0));
                }
            }
        }
    }
    rel
}

fn to_pairs(rel: &[bool], n2: usize) -> BTreeSet<(StateIx, StateIx)> {
    rel.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| (k / n2, k % n2))
        .collect()
}

/// Greatest simulation of `a1` by `a2`, if it relates the initial states.
pub fn simulates(a1: &Automaton, a2: &Automaton) -> Option<SimulationRelation> {
    let n2 = a2.num_states();
    let rel = greatest_relation(a1, a2, false);
    rel[a1.initial() * n2 + a2.initial()].then(|| SimulationRelation {
        pairs: to_pairs(&rel, n2),
    })
}

/// Greatest bisimulation between `a1` and `a2`, if it relates the initial
/// states.
pub fn bisimilar(a1: &Automaton, a2: &Automaton) -> Option<BisimulationWitness> {
    let n2 = a2.num_states();
    let rel = greatest_relation(a1, a2, true);
    rel[a1.initial() * n2 + a2.initial()].then(|| BisimulationWitness {
        pairs: to_pairs(&rel, n2),
    })
}

/// Whether `a1 ≺ a2`. When `a2` is deterministic this reduces to language
/// inclusion and is decided on the reachable part of the synchronous run.
pub fn is_simulated_by(a1: &Automaton, a2: &Automaton) -> bool {
    if a2.is_deterministic() {
        inclusion_counterexample(a1, a2).is_none()
    } else {
        simulates(a1, a2).is_some()
    }
}

/// Greatest bisimulation of an automaton with itself, queried per pair.
pub(crate) struct SelfBisimulation {
    n: usize,
    rel: Vec<bool>,
}

impl SelfBisimulation {
    pub(crate) fn new(a: &Automaton) -> Self {
        SelfBisimulation {
            n: a.num_states(),
            rel: greatest_relation(a, a, true),
        }
    }

    pub(crate) fn related(&self, p: StateIx, q: StateIx) -> bool {
        self.rel[p * self.n + q]
    }
}

fn reachable(a: &Automaton, from: StateIx) -> Vec<bool> {
    let mut seen = vec![false; a.num_states()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(q) = stack.pop() {
        for (_, t) in a.successors(q) {
            if !seen[*t] {
                seen[*t] = true;
                stack.push(*t);
            }
        }
    }
    seen
}

/// The greatest relation over the states reachable from `x1` and from `x2`
/// that contains `(x1, x2)` and in which every move of either side is
/// matched by the other with the successor pair still related. `None` when
/// no such relation contains `(x1, x2)`.
pub fn continuation_equivalent(
    a: &Automaton,
    x1: StateIx,
    x2: StateIx,
) -> Result<Option<BTreeSet<(StateIx, StateIx)>>> {
    a.run(x1, &[])?;
    a.run(x2, &[])?;
    let eq = SelfBisimulation::new(a);
    Ok(restricted_equivalence(a, &eq, x1, x2))
}

pub(crate) fn restricted_equivalence(
    a: &Automaton,
    eq: &SelfBisimulation,
    x1: StateIx,
    x2: StateIx,
) -> Option<BTreeSet<(StateIx, StateIx)>> {
    if !eq.related(x1, x2) {
        return None;
    }
    let left = reachable(a, x1);
    let right = &reachable(a, x2);
    Some(
        (0..a.num_states())
            .filter(|&p| left[p])
            .flat_map(|p| {
                (0..a.num_states())
                    .filter(move |&q| right[q] && eq.related(p, q))
                    .map(move |q| (p, q))
            })
            .collect(),
    )
}

fn post(a: &Automaton, from: &BTreeSet<StateIx>, e: &Event) -> BTreeSet<StateIx> {
    from.iter().flat_map(|&q| a.targets(q, e)).collect()
}

/// Shortest string that can be executed from `start1` in `a1` or from
/// `start2` in `a2` but not both.
fn shortest_difference(
    a1: &Automaton,
    start1: StateIx,
    a2: &Automaton,
    start2: StateIx,
    one_sided: bool,
) -> Option<Word> {
    type Node = (BTreeSet<StateIx>, BTreeSet<StateIx>);
    let start: Node = (BTreeSet::from([start1]), BTreeSet::from([start2]));
    let mut seen: HashSet<Node> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, Vec::new())]);
    while let Some(((s1, s2), w)) = queue.pop_front() {
        let mut events: BTreeSet<&Event> = BTreeSet::new();
        for &q in &s1 {
            events.extend(a1.successors(q).iter().map(|(e, _)| e));
        }
        if !one_sided {
            for &q in &s2 {
                events.extend(a2.successors(q).iter().map(|(e, _)| e));
            }
        }
        for e in events {
            let n1 = post(a1, &s1, e);
            let n2 = post(a2, &s2, e);
            let mut next_w = w.clone();
            next_w.push(e.clone());
            if n1.is_empty() != n2.is_empty() {
                if !one_sided || n2.is_empty() {
                    return Some(next_w);
                }
                continue;
            }
            let node = (n1, n2);
            if !node.0.is_empty() && seen.insert(node.clone()) {
                queue.push_back((node, next_w));
            }
        }
    }
    None
}

/// Shortest `t` such that exactly one of `δ(x1, t)!` and `δ(x2, t)!` holds.
pub fn distinguishing_suffix(a: &Automaton, x1: StateIx, x2: StateIx) -> Result<Option<Word>> {
    a.run(x1, &[])?;
    a.run(x2, &[])?;
    Ok(shortest_difference(a, x1, a, x2, false))
}

/// Shortest string in exactly one of `L(a1)` and `L(a2)`.
pub fn language_difference(a1: &Automaton, a2: &Automaton) -> Option<Word> {
    shortest_difference(a1, a1.initial(), a2, a2.initial(), false)
}

/// Shortest string in `L(a1)` but not in `L(a2)`.
pub fn inclusion_counterexample(a1: &Automaton, a2: &Automaton) -> Option<Word> {
    shortest_difference(a1, a1.initial(), a2, a2.initial(), true)
}
