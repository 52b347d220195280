//! Cooperative tasking: local controllers obtained by projecting a
//! decomposable global task, and verification that the controlled team
//! satisfies the task.

use serde::{Deserialize, Serialize};

use crate::algebra::compose_all;
use crate::automaton::{Automaton, Word};
use crate::decomposability::projections;
use crate::distribution::EventDistribution;
use crate::equivalence::{
    bisimilar, inclusion_counterexample, language_difference, simulates, BisimulationWitness,
    SimulationRelation,
};
use crate::error::{Error, Result};

/// Behaviour of one agent, over (at least) its local events.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentPlant {
    pub agent: usize,
    pub model: Automaton,
}

impl AgentPlant {
    /// A plant that never restricts the agent.
    pub fn universal(dist: &EventDistribution, agent: usize) -> Result<Self> {
        Ok(AgentPlant {
            agent,
            model: Automaton::universal(dist.agent(agent)?.iter().cloned()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalController {
    pub agent: usize,
    pub model: Automaton,
}

/// One controller per agent: the projection of the task onto its events.
pub fn synthesize_controllers(
    task: &Automaton,
    dist: &EventDistribution,
) -> Result<Vec<LocalController>> {
    task.require_deterministic()?;
    dist.validate_for(task)?;
    Ok(projections(task, dist)
        .into_iter()
        .enumerate()
        .map(|(k, model)| LocalController { agent: k + 1, model })
        .collect())
}

/// `∥ (S_i ∥ A_i)`. Controllers and plants are paired by position and must
/// name the same agents in the same order.
pub fn closed_loop(controllers: &[LocalController], plants: &[AgentPlant]) -> Result<Automaton> {
    if controllers.len() != plants.len() {
        return Err(Error::Arity {
            what: "plants",
            expected: controllers.len(),
            actual: plants.len(),
        });
    }
    let mut operands = Vec::with_capacity(2 * controllers.len());
    for (c, p) in controllers.iter().zip(plants) {
        if c.agent != p.agent {
            return Err(Error::AgentMismatch {
                controller: c.agent,
                plant: p.agent,
            });
        }
        operands.push(&c.model);
        operands.push(&p.model);
    }
    compose_all(&operands)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TeamCheck {
    /// The closed loop must be bisimilar to the task.
    Bisimulation,
    /// The closed loop must be simulated by the task.
    Simulation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TeamVerdict {
    Bisimilar(BisimulationWitness),
    /// Pairs `(p, q)` with closed-loop state `p` simulated by task state `q`.
    Simulated(SimulationRelation),
    /// A string in exactly one of the two languages (bisimulation), or in
    /// the closed loop but not in the task (simulation). `None` when the
    /// languages agree but the branching structure does not.
    Violated { counterexample: Option<Word> },
}

impl TeamVerdict {
    pub fn holds(&self) -> bool {
        !matches!(self, TeamVerdict::Violated { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamReport {
    pub mode: TeamCheck,
    pub closed_loop: Automaton,
    pub verdict: TeamVerdict,
}

/// Builds the closed loop and checks it against the task. Missing plants
/// default to universal ones.
pub fn verify_team(
    task: &Automaton,
    dist: &EventDistribution,
    controllers: &[LocalController],
    plants: Option<&[AgentPlant]>,
    mode: TeamCheck,
) -> Result<TeamReport> {
    let defaults;
    let plants = match plants {
        Some(p) => p,
        None => {
            defaults = (1..=dist.len())
                .map(|i| AgentPlant::universal(dist, i))
                .collect::<Result<Vec<_>>>()?;
            &defaults
        }
    };
    let closed = closed_loop(controllers, plants)?;
    let verdict = match mode {
        TeamCheck::Bisimulation => match bisimilar(&closed, task) {
            Some(w) => TeamVerdict::Bisimilar(w),
            None => TeamVerdict::Violated {
                counterexample: language_difference(&closed, task),
            },
        },
        TeamCheck::Simulation => match simulates(&closed, task) {
            Some(r) => TeamVerdict::Simulated(r),
            None => TeamVerdict::Violated {
                counterexample: inclusion_counterexample(&closed, task),
            },
        },
    };
    Ok(TeamReport {
        mode,
        closed_loop: closed,
        verdict,
    })
}
