//! Finite automata over named events.
//!
//! Every state is treated as marked, so the language of an automaton is the
//! set of strings it can execute from its initial state. Automata are kept
//! accessible: construction drops every state that cannot be reached from the
//! initial state, together with its transitions.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An event label. Events compare by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Event(Arc<str>);

impl Event {
    pub fn new(name: &str) -> Result<Self> {
        if valid_symbol(name) {
            Ok(Event(Arc::from(name)))
        } else {
            Err(Error::InvalidEventName(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Event {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Event::new(&value)
    }
}

impl From<Event> for String {
    fn from(value: Event) -> Self {
        value.0.to_string()
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn valid_symbol(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(char::is_whitespace)
}

/// A finite string of events.
pub type Word = Vec<Event>;

/// Splits a whitespace-separated string into events, `word("e1 a b")`.
pub fn word(text: &str) -> Word {
    text.split_whitespace()
        .map(|t| Event(Arc::from(t)))
        .collect()
}

/// Renders a word as space-separated event names; the empty word is `ε`.
pub fn format_word(w: &[Event]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.iter()
            .map(Event::name)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Index of a state inside one automaton.
pub type StateIx = usize;

/// A single labelled transition, by state index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: StateIx,
    pub label: Event,
    pub target: StateIx,
}

/// A run through an automaton: a start state and the chain of transitions
/// taken from it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub start: StateIx,
    pub steps: Vec<Transition>,
}

impl Path {
    pub fn empty(start: StateIx) -> Self {
        Path {
            start,
            steps: Vec::new(),
        }
    }

    pub fn labels(&self) -> Word {
        self.steps.iter().map(|t| t.label.clone()).collect()
    }

    pub fn end(&self) -> StateIx {
        self.steps.last().map_or(self.start, |t| t.target)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// A finite automaton `(Q, q0, E, δ)`. The transition relation may be
/// nondeterministic; [`Automaton::is_deterministic`] tells which.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AutomatonRepr", into = "AutomatonRepr")]
pub struct Automaton {
    names: Vec<String>,
    initial: StateIx,
    alphabet: BTreeSet<Event>,
    // Outgoing transitions per state, sorted by (event, target) and deduplicated.
    succ: Vec<Vec<(Event, StateIx)>>,
}

impl fmt::Debug for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Automaton")
            .field("initial", &self.names[self.initial])
            .field("alphabet", &self.alphabet)
            .field(
                "transitions",
                &self
                    .transitions()
                    .map(|t| {
                        format!(
                            "{} -{}-> {}",
                            self.names[t.source], t.label, self.names[t.target]
                        )
                    })
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// Name-based serialized form of an [`Automaton`].
#[derive(Serialize, Deserialize)]
struct AutomatonRepr {
    states: Vec<String>,
    initial: String,
    events: Vec<Event>,
    transitions: Vec<(String, Event, String)>,
}

impl From<Automaton> for AutomatonRepr {
    fn from(a: Automaton) -> Self {
        let transitions = a
            .transitions()
            .map(|t| (a.names[t.source].clone(), t.label, a.names[t.target].clone()))
            .collect();
        AutomatonRepr {
            initial: a.names[a.initial].clone(),
            events: a.alphabet.iter().cloned().collect(),
            states: a.names,
            transitions,
        }
    }
}

impl TryFrom<AutomatonRepr> for Automaton {
    type Error = Error;

    fn try_from(r: AutomatonRepr) -> Result<Self> {
        let mut b = Automaton::builder()
            .states(r.states.iter().map(String::as_str))
            .initial(&r.initial)
            .events(r.events.iter().map(Event::name));
        for (p, e, q) in &r.transitions {
            b = b.transition(p, e.name(), q);
        }
        b.build()
    }
}

/// Incremental construction of an [`Automaton`] from named states and events.
#[derive(Debug, Default, Clone)]
pub struct AutomatonBuilder {
    states: Vec<String>,
    initial: Option<String>,
    alphabet: Vec<String>,
    transitions: Vec<(String, String, String)>,
}

impl AutomatonBuilder {
    pub fn state(mut self, name: &str) -> Self {
        self.states.push(name.to_string());
        self
    }

    pub fn states<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.states.extend(names.into_iter().map(str::to_string));
        self
    }

    pub fn initial(mut self, name: &str) -> Self {
        self.initial = Some(name.to_string());
        self
    }

    pub fn event(mut self, name: &str) -> Self {
        self.alphabet.push(name.to_string());
        self
    }

    pub fn events<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.alphabet.extend(names.into_iter().map(str::to_string));
        self
    }

    pub fn transition(mut self, source: &str, label: &str, target: &str) -> Self {
        self.transitions
            .push((source.to_string(), label.to_string(), target.to_string()));
        self
    }

    /// Validates the parts and returns the accessible automaton.
    ///
    /// States named only in transitions are declared implicitly.
    pub fn build(self) -> Result<Automaton> {
        let mut alphabet = BTreeSet::new();
        for e in &self.alphabet {
            alphabet.insert(Event::new(e)?);
        }
        let mut index: HashMap<String, StateIx> = HashMap::new();
        let mut names = Vec::new();
        let mut declare = |name: &str, names: &mut Vec<String>| -> Result<StateIx> {
            if !valid_symbol(name) {
                return Err(Error::InvalidStateName(name.to_string()));
            }
            Ok(*index.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                names.len() - 1
            }))
        };
        for s in &self.states {
            declare(s, &mut names)?;
        }
        let initial = match &self.initial {
            Some(q) => declare(q, &mut names)?,
            None if names.is_empty() => return Err(Error::EmptyAutomaton),
            None => 0,
        };
        let mut edges = Vec::with_capacity(self.transitions.len());
        for (p, e, q) in &self.transitions {
            let label = Event::new(e)?;
            if !alphabet.contains(&label) {
                return Err(Error::UnknownEvent(e.clone()));
            }
            let p = declare(p, &mut names)?;
            let q = declare(q, &mut names)?;
            edges.push((p, label, q));
        }
        let mut succ = vec![Vec::new(); names.len()];
        for (p, e, q) in edges {
            succ[p].push((e, q));
        }
        Ok(Automaton::from_raw(names, initial, alphabet, succ))
    }
}

impl Automaton {
    pub fn builder() -> AutomatonBuilder {
        AutomatonBuilder::default()
    }

    /// Assembles an automaton from index-based parts and restricts it to its
    /// accessible part. Callers guarantee that indices are in range.
    pub(crate) fn from_raw(
        names: Vec<String>,
        initial: StateIx,
        alphabet: BTreeSet<Event>,
        mut succ: Vec<Vec<(Event, StateIx)>>,
    ) -> Automaton {
        for out in &mut succ {
            out.sort();
            out.dedup();
        }
        let n = names.len();
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([initial]);
        seen[initial] = true;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for (_, t) in &succ[q] {
                if !seen[*t] {
                    seen[*t] = true;
                    queue.push_back(*t);
                }
            }
        }
        if order.len() == n {
            return Automaton {
                names,
                initial,
                alphabet,
                succ,
            };
        }
        // Keep the original relative order of surviving states.
        let mut remap = vec![usize::MAX; n];
        let mut kept = Vec::with_capacity(order.len());
        for q in 0..n {
            if seen[q] {
                remap[q] = kept.len();
                kept.push(q);
            }
        }
        let new_names = kept.iter().map(|&q| names[q].clone()).collect();
        let new_succ = kept
            .iter()
            .map(|&q| {
                succ[q]
                    .iter()
                    .map(|(e, t)| (e.clone(), remap[*t]))
                    .collect()
            })
            .collect();
        Automaton {
            names: new_names,
            initial: remap[initial],
            alphabet,
            succ: new_succ,
        }
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> StateIx {
        self.initial
    }

    pub fn alphabet(&self) -> &BTreeSet<Event> {
        &self.alphabet
    }

    pub fn state_name(&self, q: StateIx) -> &str {
        &self.names[q]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_index(&self, name: &str) -> Option<StateIx> {
        self.names.iter().position(|n| n == name)
    }

    /// Looks a state up by name, failing with [`Error::UnknownState`].
    pub fn state(&self, name: &str) -> Result<StateIx> {
        self.state_index(name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    fn check_state(&self, q: StateIx) -> Result<()> {
        if q < self.names.len() {
            Ok(())
        } else {
            Err(Error::StateOutOfRange(q))
        }
    }

    /// Outgoing transitions of `q`, sorted by event then target.
    pub fn successors(&self, q: StateIx) -> &[(Event, StateIx)] {
        &self.succ[q]
    }

    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        self.succ.iter().enumerate().flat_map(|(source, out)| {
            out.iter().map(move |(label, target)| Transition {
                source,
                label: label.clone(),
                target: *target,
            })
        })
    }

    /// Events with at least one transition out of `q`.
    pub fn enabled(&self, q: StateIx) -> BTreeSet<Event> {
        self.succ[q].iter().map(|(e, _)| e.clone()).collect()
    }

    pub(crate) fn targets<'a>(
        &'a self,
        q: StateIx,
        e: &'a Event,
    ) -> impl Iterator<Item = StateIx> + 'a {
        let out = &self.succ[q];
        let start = out.partition_point(|(l, _)| l < e);
        out[start..]
            .iter()
            .take_while(move |(l, _)| l == e)
            .map(|(_, t)| *t)
    }

    /// The unique `e`-successor of `q`, if the automaton is deterministic there.
    pub fn next(&self, q: StateIx, e: &Event) -> Option<StateIx> {
        self.targets(q, e).next()
    }

    /// `{q' | (q, e, q') ∈ δ}`; empty for events outside the alphabet.
    pub fn step(&self, q: StateIx, e: &Event) -> Result<BTreeSet<StateIx>> {
        self.check_state(q)?;
        Ok(self.targets(q, e).collect())
    }

    /// All states reachable from `q` by exactly the string `s`.
    pub fn run(&self, q: StateIx, s: &[Event]) -> Result<BTreeSet<StateIx>> {
        self.check_state(q)?;
        let mut current = BTreeSet::from([q]);
        for e in s {
            current = current
                .iter()
                .flat_map(|&p| self.targets(p, e))
                .collect();
            if current.is_empty() {
                break;
            }
        }
        Ok(current)
    }

    /// Whether `s` belongs to the generated language.
    pub fn accepts(&self, s: &[Event]) -> bool {
        !self
            .run(self.initial, s)
            .expect("initial state is always valid")
            .is_empty()
    }

    /// Whether `s` can be executed from `q` (`δ(q, s)!`).
    pub fn defined(&self, q: StateIx, s: &[Event]) -> bool {
        self.run(q, s).map(|r| !r.is_empty()).unwrap_or(false)
    }

    /// The automaton obtained by starting from `q`, restricted to what is
    /// reachable from there.
    pub fn rooted(&self, q: StateIx) -> Result<Automaton> {
        self.check_state(q)?;
        Ok(Automaton::from_raw(
            self.names.clone(),
            q,
            self.alphabet.clone(),
            self.succ.clone(),
        ))
    }

    /// Recomputes the accessible part. Automata are already accessible after
    /// construction, so this returns an identical copy.
    pub fn accessible(&self) -> Automaton {
        Automaton::from_raw(
            self.names.clone(),
            self.initial,
            self.alphabet.clone(),
            self.succ.clone(),
        )
    }

    pub fn is_deterministic(&self) -> bool {
        self.nondeterministic_choice().is_none()
    }

    /// First `(state, event)` with two distinct successors, if any.
    pub fn nondeterministic_choice(&self) -> Option<(StateIx, Event)> {
        self.succ.iter().enumerate().find_map(|(q, out)| {
            out.windows(2)
                .find(|w| w[0].0 == w[1].0)
                .map(|w| (q, w[0].0.clone()))
        })
    }

    pub(crate) fn require_deterministic(&self) -> Result<()> {
        match self.nondeterministic_choice() {
            None => Ok(()),
            Some((q, e)) => Err(Error::Nondeterministic {
                state: self.names[q].clone(),
                event: e.to_string(),
            }),
        }
    }

    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm on the transition graph.
        let n = self.num_states();
        let mut indegree = vec![0usize; n];
        for out in &self.succ {
            for (_, t) in out {
                indegree[*t] += 1;
            }
        }
        let mut stack: Vec<_> = (0..n).filter(|&q| indegree[q] == 0).collect();
        let mut visited = 0;
        while let Some(q) = stack.pop() {
            visited += 1;
            for (_, t) in &self.succ[q] {
                indegree[*t] -= 1;
                if indegree[*t] == 0 {
                    stack.push(*t);
                }
            }
        }
        visited == n
    }

    /// Every path from `q` that takes each transition at most `bound` times,
    /// including the empty path. The result is finite for any `bound ≥ 1`.
    pub fn enumerate_paths(&self, q: StateIx, bound: usize) -> Result<Vec<Path>> {
        self.check_state(q)?;
        if bound == 0 {
            return Err(Error::InvalidBound);
        }
        let offsets = self.transition_offsets();
        let mut uses = vec![0usize; self.num_transitions()];
        let mut out = Vec::new();
        let mut current = Path::empty(q);
        self.paths_dfs(&offsets, &mut uses, bound, &mut current, &mut out);
        Ok(out)
    }

    fn paths_dfs(
        &self,
        offsets: &[usize],
        uses: &mut [usize],
        bound: usize,
        current: &mut Path,
        out: &mut Vec<Path>,
    ) {
        out.push(current.clone());
        let at = current.end();
        for (k, (e, t)) in self.succ[at].iter().enumerate() {
            let id = offsets[at] + k;
            if uses[id] >= bound {
                continue;
            }
            uses[id] += 1;
            current.steps.push(Transition {
                source: at,
                label: e.clone(),
                target: *t,
            });
            self.paths_dfs(offsets, uses, bound, current, out);
            current.steps.pop();
            uses[id] -= 1;
        }
    }

    /// Index of the first transition of each state in a flat numbering of δ.
    pub(crate) fn transition_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.succ.len());
        let mut acc = 0;
        for out in &self.succ {
            offsets.push(acc);
            acc += out.len();
        }
        offsets
    }

    /// Groups outgoing transitions of `q` by event.
    pub fn successor_map(&self, q: StateIx) -> BTreeMap<Event, Vec<StateIx>> {
        let mut map: BTreeMap<Event, Vec<StateIx>> = BTreeMap::new();
        for (e, t) in &self.succ[q] {
            map.entry(e.clone()).or_default().push(*t);
        }
        map
    }

    /// Same automaton over a larger alphabet (no new transitions).
    pub fn with_alphabet(mut self, extra: impl IntoIterator<Item = Event>) -> Automaton {
        self.alphabet.extend(extra);
        self
    }

    /// Chain automaton `0 -s1-> 1 -s2-> ... -sn-> n` over the given alphabet
    /// (which is extended with the events of `s`).
    pub fn chain(s: &[Event], alphabet: impl IntoIterator<Item = Event>) -> Automaton {
        let mut alpha: BTreeSet<Event> = alphabet.into_iter().collect();
        alpha.extend(s.iter().cloned());
        let names = (0..=s.len()).map(|k| format!("c{k}")).collect();
        let succ = (0..=s.len())
            .map(|k| {
                s.get(k)
                    .map(|e| vec![(e.clone(), k + 1)])
                    .unwrap_or_default()
            })
            .collect();
        Automaton::from_raw(names, 0, alpha, succ)
    }

    /// Single state with a self-loop on every event of `alphabet`.
    pub fn universal(alphabet: impl IntoIterator<Item = Event>) -> Automaton {
        let alpha: BTreeSet<Event> = alphabet.into_iter().collect();
        let loops = alpha.iter().map(|e| (e.clone(), 0)).collect();
        Automaton::from_raw(vec!["u".to_string()], 0, alpha, vec![loops])
    }
}
