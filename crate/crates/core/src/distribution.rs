use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::automaton::{Automaton, Event};
use crate::error::{Error, Result};

/// The local event sets `E_1 .. E_n` of a team of agents.
///
/// Agents are numbered from 1 in every public API, matching how they are
/// written in model files and reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BTreeSet<Event>>", into = "Vec<BTreeSet<Event>>")]
pub struct EventDistribution {
    agents: Vec<BTreeSet<Event>>,
}

impl EventDistribution {
    pub fn new(agents: Vec<BTreeSet<Event>>) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::NoAgents);
        }
        if let Some(i) = agents.iter().position(BTreeSet::is_empty) {
            return Err(Error::EmptyAgentAlphabet(i + 1));
        }
        Ok(EventDistribution { agents })
    }

    /// Convenience constructor from whitespace-separated event lists.
    pub fn from_words(agents: &[&str]) -> Result<Self> {
        let sets = agents
            .iter()
            .map(|list| list.split_whitespace().map(Event::new).collect())
            .collect::<Result<Vec<BTreeSet<Event>>>>()?;
        EventDistribution::new(sets)
    }

    /// A single agent owning the whole alphabet.
    pub fn single(alphabet: &BTreeSet<Event>) -> Result<Self> {
        EventDistribution::new(vec![alphabet.clone()])
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Event set of agent `i` (1-based).
    pub fn agent(&self, i: usize) -> Result<&BTreeSet<Event>> {
        i.checked_sub(1)
            .and_then(|k| self.agents.get(k))
            .ok_or(Error::UnknownAgent(i))
    }

    /// Iterates `(agent number, event set)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &BTreeSet<Event>)> {
        self.agents.iter().enumerate().map(|(k, s)| (k + 1, s))
    }

    pub fn sets(&self) -> &[BTreeSet<Event>] {
        &self.agents
    }

    pub fn union(&self) -> BTreeSet<Event> {
        self.agents.iter().flatten().cloned().collect()
    }

    /// `loc(e)`: the agents whose event set contains `e`.
    pub fn loc(&self, e: &Event) -> BTreeSet<usize> {
        self.iter()
            .filter(|(_, set)| set.contains(e))
            .map(|(i, _)| i)
            .collect()
    }

    /// Whether some single agent owns both events.
    pub fn share_agent(&self, e1: &Event, e2: &Event) -> bool {
        self.agents
            .iter()
            .any(|set| set.contains(e1) && set.contains(e2))
    }

    /// `E_i ∩ E_j` for 1-based agents.
    pub fn shared(&self, i: usize, j: usize) -> BTreeSet<Event> {
        self.agents[i - 1]
            .intersection(&self.agents[j - 1])
            .cloned()
            .collect()
    }

    /// Requires `∪ E_i` to equal the alphabet of `a`.
    pub fn validate_for(&self, a: &Automaton) -> Result<()> {
        let union = self.union();
        let missing: Vec<String> = a
            .alphabet()
            .difference(&union)
            .map(|e| e.to_string())
            .collect();
        let extra: Vec<String> = union
            .difference(a.alphabet())
            .map(|e| e.to_string())
            .collect();
        if missing.is_empty() && extra.is_empty() {
            Ok(())
        } else {
            Err(Error::Coverage { missing, extra })
        }
    }

    /// Copy with `event` added to each listed agent.
    pub fn with_event(&self, event: &Event, agents: &BTreeSet<usize>) -> Result<Self> {
        let mut next = self.clone();
        for &i in agents {
            if i == 0 || i > next.agents.len() {
                return Err(Error::UnknownAgent(i));
            }
            next.agents[i - 1].insert(event.clone());
        }
        Ok(next)
    }
}

impl TryFrom<Vec<BTreeSet<Event>>> for EventDistribution {
    type Error = Error;

    fn try_from(value: Vec<BTreeSet<Event>>) -> Result<Self> {
        EventDistribution::new(value)
    }
}

impl From<EventDistribution> for Vec<BTreeSet<Event>> {
    fn from(value: EventDistribution) -> Self {
        value.agents
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::word;

    #[test]
    fn loc_and_sharing() {
        let d = EventDistribution::from_words(&["a c d e1 e5", "a b d e2", "b c e3"]).unwrap();
        let a = &word("a")[0];
        assert_eq!(d.loc(a), BTreeSet::from([1, 2]));
        assert!(d.share_agent(&word("b")[0], &word("e3")[0]));
        assert!(!d.share_agent(&word("e1")[0], &word("e2")[0]));
        assert_eq!(d.shared(1, 3), word("c").into_iter().collect());
        assert!(d.agent(4).is_err());
        assert!(d.agent(0).is_err());
    }

    #[test]
    fn rejects_empty() {
        assert_eq!(EventDistribution::new(vec![]), Err(Error::NoAgents));
        assert_eq!(
            EventDistribution::from_words(&["a", ""]),
            Err(Error::EmptyAgentAlphabet(2))
        );
    }

    #[test]
    fn coverage() {
        let a = Automaton::builder()
            .events(["a", "b"])
            .initial("q")
            .transition("q", "a", "q")
            .build()
            .unwrap();
        let d = EventDistribution::from_words(&["a"]).unwrap();
        assert_eq!(
            d.validate_for(&a),
            Err(Error::Coverage {
                missing: vec!["b".into()],
                extra: vec![]
            })
        );
        assert!(EventDistribution::from_words(&["a", "b"])
            .unwrap()
            .validate_for(&a)
            .is_ok());
    }
}
