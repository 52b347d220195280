//! Decomposition of global task automata into local tasks for a team of
//! agents.
//!
//! A deterministic task automaton over `E = E_1 ∪ .. ∪ E_n` is decomposable
//! when the parallel composition of its natural projections onto the local
//! event sets is bisimilar to it. [`check_decomposable`] decides this through
//! four structural conditions, reports concrete witnesses for each failure,
//! and [`diagnose`] suggests event-sharing changes that remove them.
//!
//! ```
//! use taskdecomp::{check_decomposable, io::parse_model, CheckOptions};
//!
//! let doc = parse_model(
//!     "events a b c\nagents 2\nagent 1: a b\nagent 2: b c\n\
//!      initial q0\ntrans q0 a q1\ntrans q1 b q2\ntrans q2 c q3\n",
//! )
//! .unwrap();
//! let report = check_decomposable(&doc.automaton, &doc.distribution, CheckOptions::default()).unwrap();
//! assert!(report.overall);
//! ```

pub mod algebra;
pub mod automaton;
pub mod decomposability;
pub mod distribution;
pub mod equivalence;
pub mod error;
pub mod generate;
pub mod io;
mod par;
pub mod tasking;

pub use algebra::{compose, compose_all, interleave, project_automaton, project_string};
pub use automaton::{format_word, word, Automaton, AutomatonBuilder, Event, StateIx, Word};
pub use decomposability::{
    check_decomposable, diagnose, direct_oracle, projections, CheckOptions, Condition,
    ConditionVerdict, DecomposabilityReport, Diagnosis, RepairSuggestion, Witness,
};
pub use distribution::EventDistribution;
pub use equivalence::{bisimilar, continuation_equivalent, simulates};
pub use error::{Error, Result};
pub use par::parallel_available;
pub use tasking::{
    closed_loop, synthesize_controllers, verify_team, AgentPlant, LocalController, TeamCheck,
    TeamVerdict,
};
