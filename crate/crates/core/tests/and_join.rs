mod common;

use std::collections::BTreeSet;

use ca2om_core::carm::{Endpoint, EventId};
use ca2om_core::dm::{state_name, EventStep, StateKind, StdBuilder, PRE_CREATION};

use common::oracles::and_join_matrix;

fn step(event: &str) -> EventStep {
    EventStep {
        event: EventId::new(event),
        service: format!("svc_{}", event.to_lowercase()),
        agents: vec!["Clerk".to_string()],
    }
}

type Edge = (String, String, String);

/// Builds `R`, then `k` independent events each preceded by `R`, then the
/// and-join `J` of all of them.
fn build(k: usize) -> (StdBuilder, Vec<String>) {
    let precedents: Vec<String> = (1..=k).map(|i| format!("P{i}")).collect();
    let mut builder = StdBuilder::new("CLASS");
    builder.transform_event(&step("R"), &[Endpoint::Start]).unwrap();
    for p in &precedents {
        builder.transform_event(&step(p), &[Endpoint::Event(EventId::new("R"))]).unwrap();
    }
    let ids: Vec<EventId> = precedents.iter().map(EventId::new).collect();
    builder.transform_and_join(&step("J"), &ids).unwrap();
    (builder, precedents)
}

fn expected(precedents: &[String]) -> (BTreeSet<String>, BTreeSet<Edge>) {
    let (sets, links) = and_join_matrix(precedents);
    let name = |set: &BTreeSet<String>| match set.len() {
        0 => state_name("R"),
        1 => state_name(set.iter().next().unwrap()),
        _ => set.iter().cloned().collect::<Vec<_>>().join("+"),
    };
    let full: BTreeSet<String> = precedents.iter().cloned().collect();
    let mut states: BTreeSet<String> = sets.iter().map(name).collect();
    states.insert(PRE_CREATION.to_string());
    states.insert(state_name("J"));
    let mut edges: BTreeSet<Edge> = links
        .iter()
        .map(|(a, b, e)| (name(a), name(b), format!("svc_{}", e.to_lowercase())))
        .collect();
    edges.insert((PRE_CREATION.to_string(), state_name("R"), "svc_r".to_string()));
    edges.insert((name(&full), state_name("J"), "svc_j".to_string()));
    (states, edges)
}

fn check(k: usize) {
    let (builder, precedents) = build(k);
    let std = builder.diagram();
    let states: BTreeSet<String> = std.states.iter().map(|s| s.name.clone()).collect();
    let edges: BTreeSet<Edge> = std
        .transitions
        .iter()
        .map(|t| (t.from.clone(), t.to.clone(), t.service.clone()))
        .collect();
    assert_eq!(edges.len(), std.transitions.len(), "duplicate transitions for k={k}");
    let (want_states, want_edges) = expected(&precedents);
    assert_eq!(states, want_states, "states for k={k}");
    assert_eq!(edges, want_edges, "transitions for k={k}");

    // lattice: 2^k sets including the root; k * 2^(k-1) moves plus the final one
    let lattice_states = states.len() - 2;
    assert_eq!(lattice_states, 1 << k);
    let lattice_edges = edges.len() - 1;
    assert_eq!(lattice_edges, k * (1 << (k - 1)) + 1);
    let auxiliary = std.states.iter().filter(|s| s.kind == StateKind::Auxiliary).count();
    assert_eq!(auxiliary, (1 << k) - 1 - k);
}

#[test]
fn lattice_for_two_precedents() {
    check(2);
}

#[test]
fn lattice_for_three_precedents() {
    check(3);
}

#[test]
fn lattice_for_four_precedents() {
    check(4);
}

#[test]
fn single_precedent_is_a_plain_transition() {
    let mut builder = StdBuilder::new("CLASS");
    builder.transform_event(&step("P1"), &[Endpoint::Start]).unwrap();
    builder.transform_and_join(&step("J"), &[EventId::new("P1")]).unwrap();
    let std = builder.diagram();
    assert_eq!(std.states.len(), 3);
    assert_eq!(std.transitions.len(), 2);
}

#[test]
fn precedents_from_different_states_are_rejected() {
    let mut builder = StdBuilder::new("CLASS");
    builder.transform_event(&step("P1"), &[Endpoint::Start]).unwrap();
    builder.transform_event(&step("P2"), &[Endpoint::Event(EventId::new("P1"))]).unwrap();
    let err = builder
        .transform_and_join(&step("J"), &[EventId::new("P1"), EventId::new("P2")])
        .unwrap_err();
    assert_eq!(err.rule, "DM4");
}
