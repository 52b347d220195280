//! Decomposability of a deterministic task automaton with respect to parallel
//! composition and natural projections.
//!
//! `A` is decomposable over `E_1 .. E_n` when `∥ P_i(A)` is bisimilar to `A`.
//! That holds exactly when four conditions hold:
//!
//! * DC1: two events enabled at the same state either share an agent or can
//!   be executed in both orders.
//! * DC2: two successive events that share no agent can be executed in both
//!   orders, and either order leaves the same future behaviour.
//! * DC3: for any two strings from a state whose projections onto some
//!   `E_i ∩ E_j` begin with the same event, the composed projections of the
//!   two-branch automaton they span never produce a string the original
//!   cannot execute from that state.
//! * DC4: whenever a local projection has two distinct `e`-successors of the
//!   same state, those successors are continuation equivalent.
//!
//! DC2 and DC4 are decided with the coinductive continuation relation of
//! [`crate::equivalence`]. DC3 ranges over strings; on cyclic automata the
//! strings are finitized by a per-transition reuse bound.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{compose_all, project_automaton, quotient_classes};
use crate::automaton::{format_word, Automaton, Event, StateIx, Word};
use crate::distribution::EventDistribution;
use crate::equivalence::{
    bisimilar, distinguishing_suffix, inclusion_counterexample, SelfBisimulation,
};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    DC1,
    DC2,
    DC3,
    DC4,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::DC1, Condition::DC2, Condition::DC3, Condition::DC4];
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Concrete evidence that a condition fails. State names refer to the
/// checked automaton, or to the agent's projection for local nondeterminism.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// DC1 or DC2. `first second continuation` can be executed from `state`
    /// while `second first continuation` cannot (for DC1 neither order may
    /// be possible, and `continuation` is absent).
    Order {
        state: String,
        first: Event,
        second: Event,
        continuation: Option<Word>,
    },
    /// DC3. The composed projections of the two branches from `state`
    /// accept `offending`, which the automaton rejects from `state`.
    Interleaving {
        state: String,
        branch: Word,
        other_branch: Word,
        agents: (usize, usize),
        shared: Event,
        offending: Word,
    },
    /// DC4. In the projection for `agent`, `local_state` has two distinct
    /// `event`-successors that are not continuation equivalent. `suffix`,
    /// when present, is executable from exactly one of them.
    LocalNondeterminism {
        agent: usize,
        local_state: String,
        event: Event,
        successors: (String, String),
        suffix: Option<Word>,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Order {
                state,
                first,
                second,
                continuation: None,
            } => write!(f, "at {state}: {first} and {second} share no agent and cannot occur in both orders"),
            Witness::Order {
                state,
                first,
                second,
                continuation: Some(s),
            } => {
                let tail = if s.is_empty() {
                    String::new()
                } else {
                    format!(" {}", format_word(s))
                };
                write!(f, "at {state}: {first} {second}{tail} is possible but {second} {first}{tail} is not")
            }
            Witness::Interleaving {
                state,
                branch,
                other_branch,
                agents,
                shared,
                offending,
            } => write!(
                f,
                "at {state}: branches [{}] and [{}] synchronize on {shared} (agents {} and {}) and generate [{}], which is not allowed",
                format_word(branch),
                format_word(other_branch),
                agents.0,
                agents.1,
                format_word(offending)
            ),
            Witness::LocalNondeterminism {
                agent,
                local_state,
                event,
                successors,
                suffix,
            } => {
                write!(
                    f,
                    "agent {agent}: {local_state} has {event}-successors {} and {} that are not continuation equivalent",
                    successors.0, successors.1
                )?;
                if let Some(t) = suffix {
                    write!(f, " (suffix [{}] is possible from only one)", format_word(t))?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: Condition,
    pub holds: bool,
    pub witnesses: Vec<Witness>,
}

impl ConditionVerdict {
    fn from_witnesses(condition: Condition, mut witnesses: Vec<Witness>) -> Self {
        witnesses.sort();
        witnesses.dedup();
        ConditionVerdict {
            condition,
            holds: witnesses.is_empty(),
            witnesses,
        }
    }
}

/// Knobs for [`check_decomposable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// How many times a DC3 branch may reuse one transition.
    pub bound: usize,
    /// Also compute the direct bisimulation check and compare.
    pub oracle: bool,
    /// Fan independent work out over threads (needs the `parallel` feature).
    pub parallel: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            bound: 1,
            oracle: false,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposabilityReport {
    pub verdicts: Vec<ConditionVerdict>,
    pub overall: bool,
    pub projections: Vec<Automaton>,
    pub composed: Automaton,
    pub oracle_agrees: Option<bool>,
    /// DC3 reuse bound the verdict was computed with.
    pub bound: usize,
    pub cyclic: bool,
}

impl DecomposabilityReport {
    pub fn verdict(&self, condition: Condition) -> &ConditionVerdict {
        &self.verdicts[condition as usize]
    }

    pub fn failing(&self) -> Vec<Condition> {
        self.verdicts
            .iter()
            .filter(|v| !v.holds)
            .map(|v| v.condition)
            .collect()
    }
}

fn prepare(a: &Automaton, dist: &EventDistribution) -> Result<()> {
    a.require_deterministic()?;
    dist.validate_for(a)
}

/// `P_i(A)` for every agent, in agent order.
pub fn projections(a: &Automaton, dist: &EventDistribution) -> Vec<Automaton> {
    dist.sets().iter().map(|e| project_automaton(a, e)).collect()
}

fn projections_with(a: &Automaton, dist: &EventDistribution, parallel: bool) -> Vec<Automaton> {
    par::map(parallel, dist.sets(), |e| project_automaton(a, e))
}

fn unordered_pairs(events: &[Event]) -> impl Iterator<Item = (&Event, &Event)> {
    events
        .iter()
        .enumerate()
        .flat_map(move |(k, e1)| events[k + 1..].iter().map(move |e2| (e1, e2)))
}

/// DC1 over all states and adjacent event pairs.
pub fn check_dc1(a: &Automaton, dist: &EventDistribution) -> Result<ConditionVerdict> {
    prepare(a, dist)?;
    let mut witnesses = Vec::new();
    for q in 0..a.num_states() {
        let enabled: Vec<Event> = a.enabled(q).into_iter().collect();
        for (e1, e2) in unordered_pairs(&enabled) {
            if dist.share_agent(e1, e2) {
                continue;
            }
            let forward = a.defined(q, &[e1.clone(), e2.clone()]);
            let backward = a.defined(q, &[e2.clone(), e1.clone()]);
            if forward && backward {
                continue;
            }
            let (first, second) = if backward { (e2, e1) } else { (e1, e2) };
            witnesses.push(Witness::Order {
                state: a.state_name(q).to_string(),
                first: first.clone(),
                second: second.clone(),
                continuation: None,
            });
        }
    }
    Ok(ConditionVerdict::from_witnesses(Condition::DC1, witnesses))
}

/// DC2 over all states and successive event pairs.
pub fn check_dc2(a: &Automaton, dist: &EventDistribution) -> Result<ConditionVerdict> {
    prepare(a, dist)?;
    Ok(dc2(a, dist))
}

fn dc2(a: &Automaton, dist: &EventDistribution) -> ConditionVerdict {
    let mut eq: Option<SelfBisimulation> = None;
    let mut witnesses = Vec::new();
    for q in 0..a.num_states() {
        let mut pairs: BTreeSet<(Event, Event)> = BTreeSet::new();
        for (e1, q1) in a.successors(q) {
            for (e2, _) in a.successors(*q1) {
                if e1 != e2 {
                    let pair = if e1 < e2 {
                        (e1.clone(), e2.clone())
                    } else {
                        (e2.clone(), e1.clone())
                    };
                    pairs.insert(pair);
                }
            }
        }
        for (e1, e2) in pairs {
            if dist.share_agent(&e1, &e2) {
                continue;
            }
            let after12 = a.run(q, &[e1.clone(), e2.clone()]).expect("valid state");
            let after21 = a.run(q, &[e2.clone(), e1.clone()]).expect("valid state");
            let witness = match (after12.first(), after21.first()) {
                (Some(&x1), Some(&x2)) => {
                    let eq = eq.get_or_insert_with(|| SelfBisimulation::new(a));
                    if eq.related(x1, x2) {
                        continue;
                    }
                    let s = distinguishing_suffix(a, x1, x2)
                        .expect("valid states")
                        .expect("deterministic states that are not bisimilar have different languages");
                    let (first, second) = if a.defined(x1, &s) { (e1, e2) } else { (e2, e1) };
                    Witness::Order {
                        state: a.state_name(q).to_string(),
                        first,
                        second,
                        continuation: Some(s),
                    }
                }
                (Some(_), None) => Witness::Order {
                    state: a.state_name(q).to_string(),
                    first: e1,
                    second: e2,
                    continuation: Some(Vec::new()),
                },
                (None, Some(_)) => Witness::Order {
                    state: a.state_name(q).to_string(),
                    first: e2,
                    second: e1,
                    continuation: Some(Vec::new()),
                },
                (None, None) => unreachable!("pair was collected from an existing successive run"),
            };
            witnesses.push(witness);
        }
    }
    ConditionVerdict::from_witnesses(Condition::DC2, witnesses)
}

/// Per-agent projections of a string: the branch signature that DC3
/// obligations depend on.
type Signature = Vec<Word>;

fn dominated(small: &Signature, big: &Signature) -> bool {
    small
        .iter()
        .zip(big)
        .all(|(s, b)| b.len() >= s.len() && b[..s.len()] == s[..])
}

/// First agent pair `i < j` whose shared events occur in both signatures and
/// begin with the same event.
fn shared_start(
    shared: &[((usize, usize), BTreeSet<Event>)],
    x: &Signature,
    y: &Signature,
) -> Option<((usize, usize), Event)> {
    shared.iter().find_map(|(pair, common)| {
        let first = |sig: &Signature| sig[pair.0 - 1].iter().find(|e| common.contains(*e)).cloned();
        match (first(x), first(y)) {
            (Some(a), Some(b)) if a == b => Some((*pair, a)),
            _ => None,
        }
    })
}

struct BranchNode {
    state: StateIx,
    sig: Signature,
    path: Word,
    uses: Vec<u16>,
}

/// Branches from `q` under the reuse bound, one representative per
/// (end state, signature). Returns the representatives together with how many
/// distinct runs were seen for each signature.
fn branch_signatures(
    a: &Automaton,
    dist: &EventDistribution,
    q: StateIx,
    bound: usize,
) -> (Vec<BranchNode>, HashMap<Signature, usize>) {
    let offsets = a.transition_offsets();
    let total = a.num_transitions();
    let root = BranchNode {
        state: q,
        sig: vec![Vec::new(); dist.len()],
        path: Vec::new(),
        uses: vec![0; total],
    };
    let mut seen: HashMap<(StateIx, Signature), usize> = HashMap::new();
    let mut runs: HashMap<Signature, usize> = HashMap::new();
    seen.insert((root.state, root.sig.clone()), 0);
    runs.insert(root.sig.clone(), 1);
    let mut nodes = vec![root];
    let mut queue = VecDeque::from([0usize]);
    while let Some(at) = queue.pop_front() {
        let state = nodes[at].state;
        for (k, (e, target)) in a.successors(state).iter().enumerate() {
            let id = offsets[state] + k;
            if nodes[at].uses[id] as usize >= bound {
                continue;
            }
            let mut sig = nodes[at].sig.clone();
            for (agent, set) in dist.sets().iter().enumerate() {
                if set.contains(e) {
                    sig[agent].push(e.clone());
                }
            }
            *runs.entry(sig.clone()).or_default() += 1;
            let key = (*target, sig);
            if seen.contains_key(&key) {
                continue;
            }
            let mut uses = nodes[at].uses.clone();
            uses[id] += 1;
            let mut path = nodes[at].path.clone();
            path.push(e.clone());
            seen.insert(key.clone(), nodes.len());
            nodes.push(BranchNode {
                state: *target,
                sig: key.1,
                path,
                uses,
            });
            queue.push_back(nodes.len() - 1);
        }
    }
    (nodes, runs)
}

/// Root with two disjoint branches spelling `s` and `s_prime`.
fn two_branch(a: &Automaton, s: &[Event], s_prime: &[Event]) -> Automaton {
    let mut names = vec!["root".to_string()];
    let mut succ: Vec<Vec<(Event, StateIx)>> = vec![Vec::new()];
    for (tag, branch) in [("l", s), ("r", s_prime)] {
        let mut at = 0;
        for (k, e) in branch.iter().enumerate() {
            names.push(format!("{tag}{}", k + 1));
            succ.push(Vec::new());
            let next = names.len() - 1;
            succ[at].push((e.clone(), next));
            at = next;
        }
    }
    Automaton::from_raw(names, 0, a.alphabet().clone(), succ)
}

fn dc3_at(
    a: &Automaton,
    dist: &EventDistribution,
    shared: &[((usize, usize), BTreeSet<Event>)],
    q: StateIx,
    bound: usize,
) -> Vec<Witness> {
    let (nodes, runs) = branch_signatures(a, dist, q, bound);
    let mut representative: HashMap<&Signature, &Word> = HashMap::new();
    for node in &nodes {
        representative.entry(&node.sig).or_insert(&node.path);
    }
    let mut sigs: Vec<&Signature> = representative.keys().copied().collect();
    sigs.sort();
    let maximal: Vec<&Signature> = sigs
        .iter()
        .copied()
        .filter(|s| !sigs.iter().any(|t| t != s && dominated(s, t)))
        .collect();

    // The composed language only grows with the branches, so checking the
    // maximal signatures covers every dominated pair.
    let mut obligations = Vec::new();
    for (k, m1) in maximal.iter().enumerate() {
        for m2 in &maximal[k + 1..] {
            if let Some(found) = shared_start(shared, m1, m2) {
                obligations.push((*m1, *m2, found));
            }
        }
        if let Some(found) = shared_start(shared, m1, m1) {
            // Two distinct runs whose signatures both fall under m1 yield the
            // same composed language as (m1, m1).
            let repeated = runs.get(*m1).copied().unwrap_or(0) >= 2
                || sigs.iter().any(|t| {
                    t != m1 && dominated(t, m1) && shared_start(shared, t, m1).is_some()
                });
            if repeated {
                obligations.push((*m1, *m1, found));
            }
        }
    }

    let target = a.rooted(q).expect("valid state");
    for (m1, m2, (agents, event)) in obligations {
        let s = representative[m1];
        let s_prime = representative[m2];
        if let Some(offending) = branch_violation(&target, dist, s, s_prime) {
            // One witness per state is enough for the verdict and keeps
            // badly broken models from producing thousands of variants.
            return vec![Witness::Interleaving {
                state: a.state_name(q).to_string(),
                branch: s.clone(),
                other_branch: s_prime.clone(),
                agents,
                shared: event,
                offending,
            }];
        }
    }
    Vec::new()
}

/// A string generated by the composed projections of the two branches that
/// `target` cannot execute, extended as far as the composition allows.
fn branch_violation(
    target: &Automaton,
    dist: &EventDistribution,
    s: &[Event],
    s_prime: &[Event],
) -> Option<Word> {
    let branches = two_branch(target, s, s_prime);
    let locals: Vec<Automaton> = dist
        .sets()
        .iter()
        .map(|e| project_automaton(&branches, e))
        .collect();
    let refs: Vec<&Automaton> = locals.iter().collect();
    let composed = compose_all(&refs).expect("at least one agent");
    let mut offending = inclusion_counterexample(&composed, target)?;
    let mut at = composed
        .run(composed.initial(), &offending)
        .expect("valid state");
    for _ in 0..composed.num_states() {
        let next = at
            .iter()
            .flat_map(|&x| composed.successors(x))
            .map(|(e, _)| e)
            .min()
            .cloned();
        let Some(e) = next else { break };
        at = at
            .iter()
            .flat_map(|&x| composed.successors(x))
            .filter(|(f, _)| *f == e)
            .map(|(_, y)| *y)
            .collect();
        offending.push(e);
    }
    Some(offending)
}

/// DC3 with the given transition reuse bound.
pub fn check_dc3(a: &Automaton, dist: &EventDistribution, bound: usize) -> Result<ConditionVerdict> {
    prepare(a, dist)?;
    if bound == 0 {
        return Err(Error::InvalidBound);
    }
    Ok(dc3(a, dist, bound, true))
}

fn dc3(a: &Automaton, dist: &EventDistribution, bound: usize, parallel: bool) -> ConditionVerdict {
    let mut shared = Vec::new();
    for i in 1..=dist.len() {
        for j in i + 1..=dist.len() {
            let common = dist.shared(i, j);
            if !common.is_empty() {
                shared.push(((i, j), common));
            }
        }
    }
    let states: Vec<StateIx> = (0..a.num_states()).collect();
    let per_state = par::map(parallel, &states, |&q| dc3_at(a, dist, &shared, q, bound));
    ConditionVerdict::from_witnesses(Condition::DC3, per_state.into_iter().flatten().collect())
}

/// DC4 over every agent's projection.
pub fn check_dc4(a: &Automaton, dist: &EventDistribution) -> Result<ConditionVerdict> {
    prepare(a, dist)?;
    let locals = projections(a, dist);
    Ok(dc4(&locals, true))
}

fn dc4_local(agent: usize, local: &Automaton) -> Vec<Witness> {
    if local.is_deterministic() {
        return Vec::new();
    }
    let eq = SelfBisimulation::new(local);
    let mut witnesses = Vec::new();
    for x in 0..local.num_states() {
        for (event, targets) in local.successor_map(x) {
            for (k, &x1) in targets.iter().enumerate() {
                for &x2 in &targets[k + 1..] {
                    if eq.related(x1, x2) {
                        continue;
                    }
                    let suffix = distinguishing_suffix(local, x1, x2).expect("valid states");
                    witnesses.push(Witness::LocalNondeterminism {
                        agent,
                        local_state: local.state_name(x).to_string(),
                        event: event.clone(),
                        successors: (
                            local.state_name(x1).to_string(),
                            local.state_name(x2).to_string(),
                        ),
                        suffix,
                    });
                }
            }
        }
    }
    witnesses
}

fn dc4(locals: &[Automaton], parallel: bool) -> ConditionVerdict {
    let indexed: Vec<(usize, &Automaton)> = locals.iter().enumerate().map(|(k, p)| (k + 1, p)).collect();
    let per_agent = par::map(parallel, &indexed, |(agent, local)| dc4_local(*agent, local));
    ConditionVerdict::from_witnesses(Condition::DC4, per_agent.into_iter().flatten().collect())
}

/// `∥ P_i(A) ≅ A`, decided by building the composition and checking
/// bisimilarity directly.
pub fn direct_oracle(a: &Automaton, dist: &EventDistribution) -> Result<bool> {
    prepare(a, dist)?;
    let locals = projections(a, dist);
    let refs: Vec<&Automaton> = locals.iter().collect();
    let composed = compose_all(&refs)?;
    Ok(bisimilar(a, &composed).is_some())
}

/// Runs all four conditions (none is skipped when an earlier one fails) and
/// assembles the report.
pub fn check_decomposable(
    a: &Automaton,
    dist: &EventDistribution,
    options: CheckOptions,
) -> Result<DecomposabilityReport> {
    prepare(a, dist)?;
    if options.bound == 0 {
        return Err(Error::InvalidBound);
    }
    let parallel = options.parallel;
    let locals = projections_with(a, dist, parallel);
    let ((dc1, dc2), (dc3, dc4)) = par::join(
        parallel,
        || {
            (
                check_dc1(a, dist).expect("inputs validated"),
                dc2(a, dist),
            )
        },
        || par::join(parallel, || dc3(a, dist, options.bound, parallel), || dc4(&locals, parallel)),
    );
    let verdicts = vec![dc1, dc2, dc3, dc4];
    let overall = verdicts.iter().all(|v| v.holds);
    let refs: Vec<&Automaton> = locals.iter().collect();
    let composed = compose_all(&refs)?;
    let oracle_agrees = options
        .oracle
        .then(|| bisimilar(a, &composed).is_some() == overall);
    Ok(DecomposabilityReport {
        verdicts,
        overall,
        projections: locals,
        composed,
        oracle_agrees,
        bound: options.bound,
        cyclic: !a.is_acyclic(),
    })
}

/// A proposed change to the event distribution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairSuggestion {
    pub event: Event,
    pub add_to_agents: BTreeSet<usize>,
    pub condition: Condition,
    pub rationale: String,
    /// With this and all earlier suggestions applied, the violation it
    /// targets is gone.
    pub verified: bool,
}

impl fmt::Display for RepairSuggestion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let agents: Vec<String> = self.add_to_agents.iter().map(|i| format!("E{i}")).collect();
        write!(
            f,
            "add {} to {} [{}; {}] ({})",
            self.event,
            agents.join(", "),
            self.condition,
            if self.verified { "verified" } else { "unverified" },
            self.rationale
        )
    }
}

/// Suggestions in the order they were applied, and the outcome of applying
/// all of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub suggestions: Vec<RepairSuggestion>,
    pub amended: EventDistribution,
    pub decomposable_after: bool,
}

type Candidate = (Event, BTreeSet<usize>);

fn agents_by_size(dist: &EventDistribution, owners: &BTreeSet<usize>) -> Vec<usize> {
    let mut agents: Vec<usize> = owners.iter().copied().collect();
    agents.sort_by_key(|&i| (dist.agent(i).map(BTreeSet::len).unwrap_or(0), i));
    agents
}

fn order_candidates(dist: &EventDistribution, first: &Event, second: &Event) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (give, to_owners_of) in [(first, second), (second, first)] {
        for agent in agents_by_size(dist, &dist.loc(to_owners_of)) {
            out.push((give.clone(), BTreeSet::from([agent])));
        }
    }
    out
}

fn interleaving_candidates(
    dist: &EventDistribution,
    branch: &[Event],
    other: &[Event],
    agents: (usize, usize),
) -> Vec<Candidate> {
    // First events of both branches, then the remaining events in order.
    let mut ordered: Vec<&Event> = Vec::new();
    ordered.extend(branch.first());
    ordered.extend(other.first());
    ordered.extend(branch.iter().chain(other));
    let mut out: Vec<Candidate> = Vec::new();
    for e in ordered {
        let missing: BTreeSet<usize> = [agents.0, agents.1]
            .into_iter()
            .filter(|&i| dist.agent(i).map(|s| !s.contains(e)).unwrap_or(false))
            .collect();
        if !missing.is_empty() && !out.iter().any(|(seen, _)| seen == e) {
            out.push((e.clone(), missing));
        }
    }
    out
}

/// Events on the private path that merged the two sources of a
/// nondeterministic local choice.
fn nondeterminism_candidates(
    a: &Automaton,
    dist: &EventDistribution,
    agent: usize,
    local_state: &str,
    event: &Event,
    successors: &(String, String),
) -> Vec<Candidate> {
    let keep = match dist.agent(agent) {
        Ok(set) => set.clone(),
        Err(_) => return Vec::new(),
    };
    let local = project_automaton(a, &keep);
    let quotient = quotient_classes(a, &keep);
    let (Some(x), Some(x1), Some(x2)) = (
        local.state_index(local_state),
        local.state_index(&successors.0),
        local.state_index(&successors.1),
    ) else {
        return Vec::new();
    };
    let source_into = |class: usize| {
        a.transitions().find(|t| {
            &t.label == event
                && quotient.class_of(t.source) == x
                && quotient.class_of(t.target) == class
        })
    };
    let (Some(t1), Some(t2)) = (source_into(x1), source_into(x2)) else {
        return Vec::new();
    };
    // Undirected search over hidden transitions from one source to the other.
    let mut hidden: Vec<Vec<(StateIx, Event)>> = vec![Vec::new(); a.num_states()];
    for t in a.transitions() {
        if !keep.contains(&t.label) {
            hidden[t.source].push((t.target, t.label.clone()));
            hidden[t.target].push((t.source, t.label));
        }
    }
    let mut back: Vec<Option<(StateIx, Event)>> = vec![None; a.num_states()];
    let mut visited = vec![false; a.num_states()];
    visited[t1.source] = true;
    let mut queue = VecDeque::from([t1.source]);
    while let Some(p) = queue.pop_front() {
        if p == t2.source {
            break;
        }
        for (r, e) in &hidden[p] {
            if !visited[*r] {
                visited[*r] = true;
                back[*r] = Some((p, e.clone()));
                queue.push_back(*r);
            }
        }
    }
    let mut labels = Vec::new();
    let mut at = t2.source;
    while let Some((prev, e)) = back[at].clone() {
        labels.push(e);
        at = prev;
    }
    labels.reverse();
    let mut out: Vec<Candidate> = Vec::new();
    for e in labels {
        if !out.iter().any(|(seen, _)| *seen == e) {
            out.push((e, BTreeSet::from([agent])));
        }
    }
    out
}

fn candidates(a: &Automaton, dist: &EventDistribution, witness: &Witness) -> Vec<Candidate> {
    match witness {
        Witness::Order { first, second, .. } => order_candidates(dist, first, second),
        Witness::Interleaving {
            branch,
            other_branch,
            agents,
            ..
        } => interleaving_candidates(dist, branch, other_branch, *agents),
        Witness::LocalNondeterminism {
            agent,
            local_state,
            event,
            successors,
            ..
        } => nondeterminism_candidates(a, dist, *agent, local_state, event, successors),
    }
}

/// Whether the violation behind `witness` is still present under `dist`.
fn persists(a: &Automaton, dist: &EventDistribution, witness: &Witness) -> bool {
    match witness {
        Witness::Order { first, second, .. } => !dist.share_agent(first, second),
        Witness::Interleaving {
            state,
            branch,
            other_branch,
            ..
        } => {
            let Some(q) = a.state_index(state) else {
                return false;
            };
            let target = a.rooted(q).expect("valid state");
            branch_violation(&target, dist, branch, other_branch).is_some()
        }
        Witness::LocalNondeterminism { agent, .. } => match dist.agent(*agent) {
            Ok(keep) => !dc4_local(*agent, &project_automaton(a, keep)).is_empty(),
            Err(_) => false,
        },
    }
}

/// Proposes event-sharing changes for the violations in `report`: order
/// conflicts are resolved by letting one agent observe both events, and
/// branch conflicts by sharing the first events of the offending branches
/// between the two agents. Each suggestion is applied and re-checked before
/// the next violation is addressed.
pub fn diagnose(
    a: &Automaton,
    dist: &EventDistribution,
    report: &DecomposabilityReport,
) -> Result<Diagnosis> {
    let options = CheckOptions {
        bound: report.bound,
        ..CheckOptions::default()
    };
    let mut current = dist.clone();
    let mut latest = report.clone();
    let mut suggestions = Vec::new();
    let limit = a.alphabet().len() * dist.len() + 1;
    for _ in 0..limit {
        if latest.overall {
            break;
        }
        let Some((condition, witness)) = latest
            .verdicts
            .iter()
            .find_map(|v| v.witnesses.first().map(|w| (v.condition, w.clone())))
        else {
            break;
        };
        let mut chosen: Option<(Candidate, DecomposabilityReport)> = None;
        let mut fallback: Option<(Candidate, DecomposabilityReport)> = None;
        for candidate in candidates(a, &current, &witness) {
            let amended = current.with_event(&candidate.0, &candidate.1)?;
            let rechecked = check_decomposable(a, &amended, options)?;
            if rechecked.overall {
                chosen = Some((candidate, rechecked));
                break;
            }
            if fallback.is_none() && !persists(a, &amended, &witness) {
                fallback = Some((candidate, rechecked));
            }
        }
        let Some(((event, agents), rechecked)) = chosen.or(fallback) else {
            break;
        };
        current = current.with_event(&event, &agents)?;
        suggestions.push(RepairSuggestion {
            verified: !persists(a, &current, &witness),
            rationale: witness.to_string(),
            event,
            add_to_agents: agents,
            condition,
        });
        latest = rechecked;
    }
    Ok(Diagnosis {
        suggestions,
        amended: current,
        decomposable_after: latest.overall,
    })
}
