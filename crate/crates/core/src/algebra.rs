//! Natural projection, parallel composition and string interleaving.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::automaton::{Automaton, Event, StateIx, Word};
use crate::error::{Error, Result};

/// Erases from `s` every event outside `keep`.
pub fn project_string(s: &[Event], keep: &BTreeSet<Event>) -> Word {
    s.iter().filter(|e| keep.contains(*e)).cloned().collect()
}

/// `{ε, e1, e1 e2, ..., s}`.
pub fn prefix_closure(s: &[Event]) -> BTreeSet<Word> {
    (0..=s.len()).map(|k| s[..k].to_vec()).collect()
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut x = x;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Partition of the states of an automaton into `~E'` classes.
///
/// Class ids are ordered by the smallest state index they contain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    class_of: Vec<usize>,
    classes: Vec<Vec<StateIx>>,
}

impl Quotient {
    pub fn class_of(&self, q: StateIx) -> usize {
        self.class_of[q]
    }

    pub fn classes(&self) -> &[Vec<StateIx>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// The finest equivalence on states that relates the endpoints of every
/// transition labelled outside `keep`.
pub fn quotient_classes(a: &Automaton, keep: &BTreeSet<Event>) -> Quotient {
    let n = a.num_states();
    let mut uf = UnionFind::new(n);
    for t in a.transitions() {
        if !keep.contains(&t.label) {
            uf.union(t.source, t.target);
        }
    }
    let mut by_root: HashMap<usize, usize> = HashMap::new();
    let mut classes: Vec<Vec<StateIx>> = Vec::new();
    let class_of = (0..n)
        .map(|q| {
            let root = uf.find(q);
            let id = *by_root.entry(root).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[id].push(q);
            id
        })
        .collect();
    Quotient { class_of, classes }
}

/// Natural projection `P_{E'}(A)`: states are `~E'` classes, and a class has
/// an `e`-transition to another class whenever some member has one to some
/// member of the other, for `e ∈ E'`. The alphabet of the result is
/// `E' ∩ E`. The result is not determinized.
pub fn project_automaton(a: &Automaton, keep: &BTreeSet<Event>) -> Automaton {
    let quotient = quotient_classes(a, keep);
    let names = quotient
        .classes
        .iter()
        .map(|members| {
            let inner: Vec<&str> = members.iter().map(|&q| a.state_name(q)).collect();
            format!("{{{}}}", inner.join(","))
        })
        .collect();
    let mut succ = vec![Vec::new(); quotient.len()];
    for t in a.transitions() {
        if keep.contains(&t.label) {
            succ[quotient.class_of[t.source]].push((t.label, quotient.class_of[t.target]));
        }
    }
    let alphabet = a.alphabet().intersection(keep).cloned().collect();
    Automaton::from_raw(names, quotient.class_of[a.initial()], alphabet, succ)
}

/// A state of a parallel composition: one local state per operand.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductState(pub Vec<StateIx>);

/// Synchronous product of any number of automata, restricted to its
/// accessible part. Shared events move every operand that has them in its
/// alphabet; private events move their owner alone.
pub fn compose_tracked(operands: &[&Automaton]) -> Result<(Automaton, Vec<ProductState>)> {
    if operands.is_empty() {
        return Err(Error::EmptyComposition);
    }
    let alphabet: BTreeSet<Event> = operands
        .iter()
        .flat_map(|a| a.alphabet().iter().cloned())
        .collect();
    // For each event, which operands synchronize on it.
    let owners: HashMap<&Event, Vec<usize>> = alphabet
        .iter()
        .map(|e| {
            let who = (0..operands.len())
                .filter(|&k| operands[k].alphabet().contains(e))
                .collect();
            (e, who)
        })
        .collect();

    let start = ProductState(operands.iter().map(|a| a.initial()).collect());
    let mut index: HashMap<ProductState, usize> = HashMap::new();
    let mut states = vec![start.clone()];
    index.insert(start, 0);
    let mut succ: Vec<Vec<(Event, usize)>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);

    while let Some(at) = queue.pop_front() {
        let current = states[at].clone();
        let candidates: BTreeSet<&Event> = operands
            .iter()
            .zip(&current.0)
            .flat_map(|(a, &q)| a.successors(q).iter().map(|(e, _)| e))
            .collect();
        for e in candidates {
            let who = &owners[e];
            let choices: Vec<Vec<StateIx>> = who
                .iter()
                .map(|&k| operands[k].targets(current.0[k], e).collect())
                .collect();
            if choices.iter().any(Vec::is_empty) {
                continue;
            }
            // Cartesian product over the participants' successor choices.
            let mut picks = vec![0usize; who.len()];
            loop {
                let mut next = current.0.clone();
                for (slot, &k) in who.iter().enumerate() {
                    next[k] = choices[slot][picks[slot]];
                }
                let next = ProductState(next);
                let target = match index.get(&next) {
                    Some(&t) => t,
                    None => {
                        let t = states.len();
                        states.push(next.clone());
                        index.insert(next, t);
                        succ.push(Vec::new());
                        queue.push_back(t);
                        t
                    }
                };
                succ[at].push((e.clone(), target));

                let mut slot = 0;
                while slot < picks.len() {
                    picks[slot] += 1;
                    if picks[slot] < choices[slot].len() {
                        break;
                    }
                    picks[slot] = 0;
                    slot += 1;
                }
                if slot == picks.len() {
                    break;
                }
            }
        }
    }

    let names = states
        .iter()
        .map(|ps| {
            let parts: Vec<&str> = ps
                .0
                .iter()
                .zip(operands)
                .map(|(&q, a)| a.state_name(q))
                .collect();
            format!("({})", parts.join(","))
        })
        .collect();
    Ok((Automaton::from_raw(names, 0, alphabet, succ), states))
}

/// `A1 ∥ A2`.
pub fn compose(a1: &Automaton, a2: &Automaton) -> Automaton {
    compose_tracked(&[a1, a2])
        .expect("two operands")
        .0
}

/// `A1 ∥ A2 ∥ ... ∥ An`. The n-ary product is isomorphic to any bracketing
/// of binary compositions; product states are flattened tuples.
pub fn compose_all(operands: &[&Automaton]) -> Result<Automaton> {
    compose_tracked(operands).map(|(a, _)| a)
}

/// Language of an acyclic automaton, or `None` when it has a cycle.
pub fn finite_language(a: &Automaton) -> Option<BTreeSet<Word>> {
    if !a.is_acyclic() {
        return None;
    }
    let mut out = BTreeSet::new();
    let mut stack = vec![(a.initial(), Vec::new())];
    while let Some((q, w)) = stack.pop() {
        for (e, t) in a.successors(q) {
            let mut next = w.clone();
            next.push(e.clone());
            stack.push((*t, next));
        }
        out.insert(w);
    }
    Some(out)
}

/// `s̄ | s̄'`: the strings over `E1 ∪ E2` whose projections are prefixes of
/// `s` and of `s'` respectively, computed as the language of the composition
/// of the two path automata.
pub fn interleave(
    s: &[Event],
    s_prime: &[Event],
    e1: &BTreeSet<Event>,
    e2: &BTreeSet<Event>,
) -> Result<BTreeSet<Word>> {
    for (w, alphabet) in [(s, e1), (s_prime, e2)] {
        if let Some(bad) = w.iter().find(|e| !alphabet.contains(*e)) {
            return Err(Error::UnknownEvent(bad.to_string()));
        }
    }
    let left = Automaton::chain(s, e1.iter().cloned());
    let right = Automaton::chain(s_prime, e2.iter().cloned());
    let product = compose(&left, &right);
    Ok(finite_language(&product).expect("product of chains is acyclic"))
}
