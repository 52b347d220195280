mod common;

use common::*;
use taskdecomp::io::{parse_model, serialize_model};
use taskdecomp::{
    bisimilar, check_decomposable, compose_all, diagnose, synthesize_controllers, verify_team,
    word, Automaton, CheckOptions, Condition, TeamCheck, TeamVerdict, Witness,
};

const ALL: [&str; 15] = [
    "example1",
    "example1-p1",
    "example1-p2",
    "example1-p3",
    "a1",
    "a2",
    "a3",
    "a4",
    "remark5",
    "remark5-fixed",
    "mrs",
    "mrs-p1",
    "mrs-p2",
    "mrs-p3",
    "mrs-broken",
];

fn oracle() -> CheckOptions {
    CheckOptions {
        oracle: true,
        ..CheckOptions::default()
    }
}

fn failing(name: &str) -> Vec<Condition> {
    let doc = fixture(name);
    check_decomposable(&doc.automaton, &doc.distribution, oracle())
        .unwrap()
        .failing()
}

#[test]
fn every_fixture_round_trips() {
    for name in ALL {
        let doc = fixture(name);
        let again = parse_model(&serialize_model(&doc)).unwrap();
        assert_eq!(again, doc, "{name}");
    }
}

#[test]
fn decomposable_fixtures() {
    for name in ["example1", "remark5-fixed", "mrs"] {
        let doc = fixture(name);
        let report = check_decomposable(&doc.automaton, &doc.distribution, oracle()).unwrap();
        assert!(report.overall, "{name}: {:?}", report.failing());
        assert_eq!(report.oracle_agrees, Some(true), "{name}");
        assert!(bisimilar(&report.composed, &doc.automaton).is_some());
    }
}

#[test]
fn counterexample_fixtures_fail_their_condition() {
    assert_eq!(failing("a1"), vec![Condition::DC1]);
    assert_eq!(failing("a3"), vec![Condition::DC3]);
    assert_eq!(failing("a4"), vec![Condition::DC4]);
    assert!(failing("a2").contains(&Condition::DC2));
}

// The drawn a2 also has local nondeterminism for agent 2 once e1 is hidden.
#[test]
fn a2_also_fails_local_determinism() {
    assert_eq!(failing("a2"), vec![Condition::DC2, Condition::DC4]);
}

#[test]
fn witnesses_replay() {
    for name in ["a1", "a2", "a3", "a4", "remark5", "mrs-broken"] {
        let doc = fixture(name);
        let report = check_decomposable(&doc.automaton, &doc.distribution, oracle()).unwrap();
        assert_eq!(report.oracle_agrees, Some(true), "{name}");
        for v in &report.verdicts {
            assert_eq!(v.holds, v.witnesses.is_empty());
            for w in &v.witnesses {
                assert!(replays(&doc.automaton, &doc.distribution, w), "{name}: {w}");
            }
        }
    }
}

#[test]
fn a2_witness_breaks_on_e2() {
    let doc = fixture("a2");
    let report = check_decomposable(&doc.automaton, &doc.distribution, oracle()).unwrap();
    let dc2 = report.verdict(Condition::DC2);
    assert!(dc2.witnesses.iter().any(|w| matches!(
        w,
        Witness::Order { continuation: Some(c), .. } if *c == word("e2")
    )));
}

#[test]
fn a3_offending_string() {
    let doc = fixture("a3");
    let report = check_decomposable(&doc.automaton, &doc.distribution, oracle()).unwrap();
    let w = &report.verdict(Condition::DC3).witnesses;
    assert_eq!(w.len(), 1);
    match &w[0] {
        Witness::Interleaving { offending, .. } => assert_eq!(*offending, word("e1 a b e2")),
        other => panic!("unexpected witness {other}"),
    }
    assert!(report.composed.accepts(&word("e1 a b e2")));
    assert!(!doc.automaton.accepts(&word("e1 a b e2")));
}

#[test]
fn a4_suffix_mentions_e3() {
    let doc = fixture("a4");
    let report = check_decomposable(&doc.automaton, &doc.distribution, oracle()).unwrap();
    let w = &report.verdict(Condition::DC4).witnesses;
    assert!(!w.is_empty());
    assert!(w.iter().all(|w| matches!(
        w,
        Witness::LocalNondeterminism { suffix: Some(s), .. } if s.contains(&ev("e3"))
    )));
}

#[test]
fn remark5_repair() {
    let doc = fixture("remark5");
    let report = check_decomposable(&doc.automaton, &doc.distribution, oracle()).unwrap();
    assert_eq!(report.failing(), vec![Condition::DC3, Condition::DC4]);
    let diagnosis = diagnose(&doc.automaton, &doc.distribution, &report).unwrap();
    assert!(diagnosis.decomposable_after);
    let first = &diagnosis.suggestions[0];
    assert_eq!(first.event, ev("e1"));
    assert!(first.add_to_agents.contains(&2));
    assert!(first.verified);
    let fixed = fixture("remark5-fixed");
    assert_eq!(diagnosis.amended, fixed.distribution);
}

#[test]
fn example1_projections_match_drawings() {
    let doc = fixture("example1");
    let locals = taskdecomp::projections(&doc.automaton, &doc.distribution);
    for (k, p) in locals.iter().enumerate() {
        let drawn = fixture(&format!("example1-p{}", k + 1)).automaton;
        assert!(bisimilar(p, &drawn).is_some(), "agent {}", k + 1);
    }
    let refs: Vec<&Automaton> = locals.iter().collect();
    assert!(bisimilar(&compose_all(&refs).unwrap(), &doc.automaton).is_some());
}

#[test]
fn mrs_projections_match_drawings() {
    let doc = fixture("mrs");
    let locals = taskdecomp::projections(&doc.automaton, &doc.distribution);
    assert_eq!(locals.len(), 3);
    for (k, p) in locals.iter().enumerate() {
        let drawn = fixture(&format!("mrs-p{}", k + 1)).automaton;
        assert!(bisimilar(p, &drawn).is_some(), "agent {}", k + 1);
    }
    // Counted as drawn: every transition including the return on r.
    let counts: Vec<usize> = (1..=3)
        .map(|k| fixture(&format!("mrs-p{k}")).automaton.num_transitions())
        .collect();
    assert_eq!(counts, vec![9, 7, 13]);
}

#[test]
fn mrs_broken_repair() {
    let doc = fixture("mrs-broken");
    let report = check_decomposable(&doc.automaton, &doc.distribution, oracle()).unwrap();
    assert!(report.failing().contains(&Condition::DC2));
    let diagnosis = diagnose(&doc.automaton, &doc.distribution, &report).unwrap();
    let s = &diagnosis.suggestions[0];
    assert_eq!(s.event, ev("D1opened"));
    assert!(s.add_to_agents.contains(&2));
    assert!(doc.distribution.loc(&ev("D1opened")).contains(&1));
    assert!(diagnosis.decomposable_after);
    assert_eq!(diagnosis.amended, fixture("mrs").distribution);
}

#[test]
fn teams_from_decomposable_fixtures_realize_their_task() {
    for name in ["example1", "remark5-fixed", "mrs"] {
        let doc = fixture(name);
        let cs = synthesize_controllers(&doc.automaton, &doc.distribution).unwrap();
        for mode in [TeamCheck::Bisimulation, TeamCheck::Simulation] {
            let r = verify_team(&doc.automaton, &doc.distribution, &cs, None, mode).unwrap();
            assert!(r.verdict.holds(), "{name} {mode:?}");
        }
    }
}

#[test]
fn team_from_remark5_does_not_realize_task() {
    let doc = fixture("remark5");
    let cs = synthesize_controllers(&doc.automaton, &doc.distribution).unwrap();
    let r = verify_team(&doc.automaton, &doc.distribution, &cs, None, TeamCheck::Bisimulation).unwrap();
    match r.verdict {
        TeamVerdict::Violated {
            counterexample: Some(s),
        } => {
            assert!(r.closed_loop.accepts(&s) != doc.automaton.accepts(&s));
        }
        other => panic!("expected a counterexample, got {other:?}"),
    }
}

#[test]
fn paths_around_a_return_loop() {
    let a = Automaton::builder()
        .initial("i")
        .events(["go", "done", "r"])
        .transition("i", "go", "w")
        .transition("w", "done", "i")
        .transition("w", "r", "i")
        .build()
        .unwrap();
    let words = |bound| {
        let mut w: Vec<String> = a
            .enumerate_paths(0, bound)
            .unwrap()
            .iter()
            .map(|p| taskdecomp::format_word(&p.labels()))
            .collect();
        w.sort();
        w
    };
    // With bound 1 no transition repeats, so the loop is entered once.
    assert_eq!(words(1), vec!["go", "go done", "go r", "ε"]);
    assert_eq!(
        words(2),
        vec![
            "go",
            "go done",
            "go done go",
            "go done go done",
            "go done go r",
            "go r",
            "go r go",
            "go r go done",
            "go r go r",
            "ε",
        ]
    );
    let mrs = fixture("mrs").automaton;
    assert!(!mrs.is_acyclic());
    let p1 = fixture("mrs-p1").automaton;
    assert_eq!(p1.enumerate_paths(p1.initial(), 1).unwrap().len(), 10);
}
