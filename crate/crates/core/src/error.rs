use thiserror::Error;

/// Errors produced while building, querying or checking automata.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid event name {0:?}: names must be nonempty and contain no whitespace")]
    InvalidEventName(String),
    #[error("invalid state name {0:?}: names must be nonempty and contain no whitespace")]
    InvalidStateName(String),
    #[error("automaton has no states")]
    EmptyAutomaton,
    #[error("duplicate state {0}")]
    DuplicateState(String),
    #[error("duplicate event {0}")]
    DuplicateEvent(String),
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("state index {0} is out of range")]
    StateOutOfRange(usize),
    #[error("unknown event {0}")]
    UnknownEvent(String),
    #[error("automaton is nondeterministic: state {state} has several {event}-successors")]
    Nondeterministic { state: String, event: String },
    #[error("event distribution has no agents")]
    NoAgents,
    #[error("agent {0} has an empty event set")]
    EmptyAgentAlphabet(usize),
    #[error("agent {0} does not exist")]
    UnknownAgent(usize),
    #[error("distribution does not cover the alphabet (missing: {missing:?}, extra: {extra:?})")]
    Coverage {
        missing: Vec<String>,
        extra: Vec<String>,
    },
    #[error("cannot compose an empty list of automata")]
    EmptyComposition,
    #[error("agent index mismatch: controller {controller}, plant {plant}")]
    AgentMismatch { controller: usize, plant: usize },
    #[error("expected {expected} {what}, got {actual}")]
    Arity {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("path reuse bound must be at least 1")]
    InvalidBound,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
