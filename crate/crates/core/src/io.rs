//! Line-based model files, DOT rendering and report documents.
//!
//! ```text
//! automaton example
//! events a b c
//! agents 2
//! agent 1: a b
//! agent 2: a c
//! states q0 q1 q2
//! initial q0
//! trans q0 a q1
//! trans q1 b q2
//! ```
//!
//! `#` starts a comment. Events must be listed before agents and transitions
//! use them. If a `states` line is present, every state must be declared
//! before it is used; otherwise states are declared by `initial` and `trans`.
//! Without an `agents` section the model has a single agent owning all
//! events. Without `initial`, the first declared state is initial.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::automaton::{format_word, Automaton, Event};
use crate::decomposability::{DecomposabilityReport, Diagnosis};
use crate::distribution::EventDistribution;
use crate::error::{Error, Result};
use crate::tasking::{TeamReport, TeamVerdict};

/// A named task automaton together with its event distribution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub name: String,
    pub automaton: Automaton,
    pub distribution: EventDistribution,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn at_line(line: usize, err: Error) -> Error {
    match err {
        Error::Parse { .. } => err,
        other => parse_err(line, other.to_string()),
    }
}

pub fn parse_model(text: &str) -> Result<ModelDocument> {
    let mut name: Option<String> = None;
    let mut events: Vec<String> = Vec::new();
    let mut event_set: HashSet<String> = HashSet::new();
    let mut agent_count: Option<(usize, usize)> = None;
    let mut agents: Vec<Option<BTreeSet<Event>>> = Vec::new();
    let mut states: Vec<String> = Vec::new();
    let mut state_set: HashSet<String> = HashSet::new();
    let mut explicit_states = false;
    let mut initial: Option<String> = None;
    let mut transitions: Vec<(String, String, String)> = Vec::new();
    let mut last_line = 0;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .map(|(k, r)| (k, r.trim()))
            .unwrap_or((content, ""));
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        let known_state = |q: &str, state_set: &HashSet<String>| {
            if explicit_states && !state_set.contains(q) {
                Err(parse_err(line, format!("unknown state {q}")))
            } else {
                Ok(())
            }
        };
        match keyword {
            "automaton" => {
                if name.is_some() {
                    return Err(parse_err(line, "duplicate automaton line"));
                }
                if tokens.len() != 1 {
                    return Err(parse_err(line, "expected `automaton <name>`"));
                }
                name = Some(tokens[0].to_string());
            }
            "events" => {
                for e in tokens {
                    Event::new(e).map_err(|err| at_line(line, err))?;
                    if !event_set.insert(e.to_string()) {
                        return Err(parse_err(line, format!("duplicate event {e}")));
                    }
                    events.push(e.to_string());
                }
            }
            "agents" => {
                if agent_count.is_some() {
                    return Err(parse_err(line, "duplicate agents line"));
                }
                let n: usize = match tokens.as_slice() {
                    [n] => n
                        .parse()
                        .map_err(|_| parse_err(line, format!("invalid agent count {n}")))?,
                    _ => return Err(parse_err(line, "expected `agents <n>`")),
                };
                if n == 0 {
                    return Err(parse_err(line, "agent count must be positive"));
                }
                agent_count = Some((n, line));
                agents = vec![None; n];
            }
            "agent" => {
                let Some((n, _)) = agent_count else {
                    return Err(parse_err(line, "`agent` before `agents <n>`"));
                };
                let (index, list) = rest
                    .split_once(':')
                    .ok_or_else(|| parse_err(line, "expected `agent <i>: <events>`"))?;
                let i: usize = index
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line, format!("invalid agent index {}", index.trim())))?;
                if i == 0 || i > n {
                    return Err(parse_err(line, format!("agent {i} out of range 1..={n}")));
                }
                if agents[i - 1].is_some() {
                    return Err(parse_err(line, format!("duplicate agent {i}")));
                }
                let mut set = BTreeSet::new();
                for e in list.split_whitespace() {
                    if !event_set.contains(e) {
                        return Err(parse_err(line, format!("unknown event {e}")));
                    }
                    set.insert(Event::new(e).map_err(|err| at_line(line, err))?);
                }
                agents[i - 1] = Some(set);
            }
            "states" => {
                explicit_states = true;
                for q in tokens {
                    if !state_set.insert(q.to_string()) {
                        return Err(parse_err(line, format!("duplicate state {q}")));
                    }
                    states.push(q.to_string());
                }
            }
            "initial" => {
                if initial.is_some() {
                    return Err(parse_err(line, "duplicate initial line"));
                }
                let [q] = tokens.as_slice() else {
                    return Err(parse_err(line, "expected `initial <state>`"));
                };
                known_state(q, &state_set)?;
                initial = Some(q.to_string());
            }
            "trans" => {
                let [p, e, q] = tokens.as_slice() else {
                    return Err(parse_err(line, "expected `trans <state> <event> <state>`"));
                };
                if !event_set.contains(*e) {
                    return Err(parse_err(line, format!("unknown event {e}")));
                }
                known_state(p, &state_set)?;
                known_state(q, &state_set)?;
                transitions.push((p.to_string(), e.to_string(), q.to_string()));
            }
            other => return Err(parse_err(line, format!("unknown keyword {other}"))),
        }
    }

    let end = last_line.max(1);
    if states.is_empty() && initial.is_none() && transitions.is_empty() {
        return Err(parse_err(end, "automaton has no states"));
    }
    let mut builder = Automaton::builder()
        .states(states.iter().map(String::as_str))
        .events(events.iter().map(String::as_str));
    if let Some(q) = &initial {
        builder = builder.initial(q);
    } else if let Some((p, _, _)) = transitions.first().filter(|_| states.is_empty()) {
        builder = builder.initial(p);
    }
    for (p, e, q) in &transitions {
        builder = builder.transition(p, e, q);
    }
    let automaton = builder.build().map_err(|err| at_line(end, err))?;

    let distribution = match agent_count {
        None => EventDistribution::single(automaton.alphabet()),
        Some((_, line)) => {
            let sets = agents
                .into_iter()
                .enumerate()
                .map(|(k, s)| s.ok_or_else(|| parse_err(line, format!("agent {} not listed", k + 1))))
                .collect::<Result<Vec<_>>>()?;
            EventDistribution::new(sets)
        }
    }
    .map_err(|err| at_line(end, err))?;
    distribution
        .validate_for(&automaton)
        .map_err(|err| at_line(end, err))?;

    Ok(ModelDocument {
        name: name.unwrap_or_else(|| "model".to_string()),
        automaton,
        distribution,
    })
}

fn write_body(out: &mut String, a: &Automaton) {
    let _ = writeln!(out, "states {}", a.state_names().join(" "));
    let _ = writeln!(out, "initial {}", a.state_name(a.initial()));
    for t in a.transitions() {
        let _ = writeln!(
            out,
            "trans {} {} {}",
            a.state_name(t.source),
            t.label,
            a.state_name(t.target)
        );
    }
}

fn event_list(events: &BTreeSet<Event>) -> String {
    events.iter().map(Event::name).collect::<Vec<_>>().join(" ")
}

/// Renders a model in the line format; [`parse_model`] reads it back.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "automaton {}", doc.name);
    let _ = writeln!(out, "events {}", event_list(doc.automaton.alphabet()));
    let _ = writeln!(out, "agents {}", doc.distribution.len());
    for (i, set) in doc.distribution.iter() {
        let _ = writeln!(out, "agent {i}: {}", event_list(set));
    }
    write_body(&mut out, &doc.automaton);
    out
}

/// Renders a standalone automaton (single agent) in the line format.
pub fn serialize_automaton(name: &str, a: &Automaton) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "automaton {name}");
    let _ = writeln!(out, "events {}", event_list(a.alphabet()));
    write_body(&mut out, a);
    out
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz digraph with states in index order and the initial state
/// marked by an incoming arrow from an invisible node.
pub fn emit_dot(a: &Automaton) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
    out.push_str("  __start [shape=point, style=invis];\n");
    for q in 0..a.num_states() {
        let _ = writeln!(out, "  {};", dot_id(a.state_name(q)));
    }
    let _ = writeln!(out, "  __start -> {};", dot_id(a.state_name(a.initial())));
    for t in a.transitions() {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            dot_id(a.state_name(t.source)),
            dot_id(a.state_name(t.target)),
            dot_id(t.label.name())
        );
    }
    out.push_str("}\n");
    out
}

/// Witnesses listed per condition in text reports; JSON lists all of them.
pub const TEXT_WITNESSES: usize = 10;

/// Report as written by the command-line tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub model: String,
    pub report: DecomposabilityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnosis: Option<Diagnosis>,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let r = &self.report;
        let mut out = String::new();
        let _ = writeln!(out, "model: {}", self.model);
        for v in &r.verdicts {
            let _ = writeln!(
                out,
                "{}: {}",
                v.condition,
                if v.holds { "holds" } else { "fails" }
            );
            for w in v.witnesses.iter().take(TEXT_WITNESSES) {
                let _ = writeln!(out, "  - {w}");
            }
            if v.witnesses.len() > TEXT_WITNESSES {
                let _ = writeln!(
                    out,
                    "  ... and {} more",
                    v.witnesses.len() - TEXT_WITNESSES
                );
            }
        }
        let _ = writeln!(
            out,
            "decomposable: {}",
            if r.overall { "yes" } else { "no" }
        );
        if let Some(agree) = r.oracle_agrees {
            let _ = writeln!(out, "oracle agrees: {}", if agree { "yes" } else { "no" });
        }
        if r.cyclic {
            let _ = writeln!(out, "path reuse bound: {}", r.bound);
        }
        if let Some(d) = &self.diagnosis {
            if d.suggestions.is_empty() {
                let _ = writeln!(out, "suggestions: none");
            } else {
                let _ = writeln!(out, "suggestions:");
                for s in &d.suggestions {
                    let _ = writeln!(out, "  - {s}");
                }
            }
            let _ = writeln!(
                out,
                "decomposable after suggestions: {}",
                if d.decomposable_after { "yes" } else { "no" }
            );
        }
        out
    }
}

/// Text rendering of a team verification outcome.
pub fn team_report_text(report: &TeamReport) -> String {
    let mode = match report.mode {
        crate::tasking::TeamCheck::Bisimulation => "bisimulation",
        crate::tasking::TeamCheck::Simulation => "simulation",
    };
    let mut out = format!(
        "closed loop: {} states, {} transitions\n",
        report.closed_loop.num_states(),
        report.closed_loop.num_transitions()
    );
    match &report.verdict {
        TeamVerdict::Bisimilar(w) => {
            let _ = writeln!(out, "{mode}: holds ({} related pairs)", w.pairs.len());
        }
        TeamVerdict::Simulated(r) => {
            let _ = writeln!(out, "{mode}: holds ({} related pairs)", r.pairs.len());
        }
        TeamVerdict::Violated { counterexample } => {
            let _ = writeln!(out, "{mode}: fails");
            match counterexample {
                Some(w) => {
                    let _ = writeln!(out, "  distinguishing string: {}", format_word(w));
                }
                None => {
                    let _ = writeln!(out, "  languages agree; branching structure differs");
                }
            }
        }
    }
    out
}
