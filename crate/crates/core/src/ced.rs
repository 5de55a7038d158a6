//! Communicative event diagrams as graphs: extension across processes,
//! topological ordering and per-class sub-diagrams.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};

use crate::carm::model::{Endpoint, EventId, MergeKind, RequirementsModel};
use crate::trace::TraceMap;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    /// `Endpoint::Start` or an event; never `End`.
    pub from: Endpoint,
    pub to: EventId,
    pub merge: MergeKind,
    pub loopback: bool,
}

/// Events plus an implicit START node. END nodes are not represented.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventGraph {
    pub nodes: BTreeSet<EventId>,
    pub edges: BTreeSet<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("precedence `{from} -> {to}` names event `{missing}`, which is not in the model")]
    DanglingPrecedence {
        from: String,
        to: String,
        missing: String,
    },
    #[error("precedences form a cycle through {}", .0.iter().map(|e| format!("`{e}`")).collect::<Vec<_>>().join(", "))]
    Cycle(Vec<EventId>),
    #[error("class `{0}` does not appear in the trace")]
    UnknownClass(String),
}

impl EventGraph {
    /// Non-loopback edges entering `event`.
    pub fn incoming<'a>(&'a self, event: &'a EventId) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| &e.to == event && !e.loopback)
    }

    /// Merge kind of the non-loopback edges entering `event`.
    pub fn merge_of(&self, event: &EventId) -> MergeKind {
        self.incoming(event).next().map_or(MergeKind::Plain, |e| e.merge)
    }

    pub fn loopbacks(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.loopback)
    }

    /// Adds a START edge to every event without non-loopback precedents.
    fn attach_start(&mut self) {
        let initial: Vec<EventId> = self
            .nodes
            .iter()
            .filter(|n| self.incoming(n).next().is_none())
            .cloned()
            .collect();
        for event in initial {
            self.edges.insert(Edge {
                from: Endpoint::Start,
                to: event,
                merge: MergeKind::Plain,
                loopback: false,
            });
        }
    }
}

fn model_edges(model: &RequirementsModel) -> Result<Vec<Edge>, GraphError> {
    let ids: HashSet<&EventId> = model.events().map(|e| &e.id).collect();
    let mut edges = Vec::new();
    for prec in model.precedences() {
        for end in [&prec.from, &prec.to] {
            if let Endpoint::Event(id) = end {
                if !ids.contains(id) {
                    return Err(GraphError::DanglingPrecedence {
                        from: prec.from.to_string(),
                        to: prec.to.to_string(),
                        missing: id.to_string(),
                    });
                }
            }
        }
        if let Endpoint::Event(to) = &prec.to {
            edges.push(Edge {
                from: prec.from.clone(),
                to: to.clone(),
                merge: prec.merge,
                loopback: prec.loopback,
            });
        }
    }
    Ok(edges)
}

fn close_over_precedents(
    edges: &[Edge],
    mut nodes: BTreeSet<EventId>,
) -> EventGraph {
    loop {
        let before = nodes.len();
        for edge in edges.iter().filter(|e| !e.loopback) {
            if let Endpoint::Event(from) = &edge.from {
                if nodes.contains(&edge.to) && !nodes.contains(from) {
                    nodes.insert(from.clone());
                }
            }
        }
        if nodes.len() == before {
            break;
        }
    }
    let mut graph = EventGraph {
        edges: edges
            .iter()
            .filter(|e| {
                nodes.contains(&e.to)
                    && match &e.from {
                        Endpoint::Event(from) => nodes.contains(from),
                        _ => true,
                    }
            })
            .cloned()
            .collect(),
        nodes,
    };
    graph.attach_start();
    graph
}

/// The extended diagram of `root_process`: its events plus, transitively,
/// every event of any process that precedes an included event. Every edge
/// between included events is kept; a START edge is attached to each event
/// left without precedents.
pub fn extend_diagram(model: &RequirementsModel, root_process: &str) -> Result<EventGraph, GraphError> {
    let process = model
        .process(root_process)
        .ok_or_else(|| GraphError::UnknownProcess(root_process.to_string()))?;
    let edges = model_edges(model)?;
    let nodes = process.events.iter().map(|e| e.id.clone()).collect();
    Ok(close_over_precedents(&edges, nodes))
}

/// The diagram of every process of the model together.
pub fn full_diagram(model: &RequirementsModel) -> Result<EventGraph, GraphError> {
    let edges = model_edges(model)?;
    let nodes = model.events().map(|e| e.id.clone()).collect();
    Ok(close_over_precedents(&edges, nodes))
}

/// Kahn's algorithm over the non-loopback edges. Among the events ready at
/// each step the lexicographically smallest id is taken first.
pub fn sort_events(graph: &EventGraph) -> Result<Vec<EventId>, GraphError> {
    let mut in_degree: BTreeMap<&EventId, usize> = graph.nodes.iter().map(|n| (n, 0)).collect();
    let mut successors: BTreeMap<&EventId, Vec<&EventId>> = BTreeMap::new();
    for edge in graph.edges.iter().filter(|e| !e.loopback) {
        if let Endpoint::Event(from) = &edge.from {
            if in_degree.contains_key(from) && in_degree.contains_key(&edge.to) {
                *in_degree.get_mut(&edge.to).expect("node present") += 1;
                successors.entry(from).or_default().push(&edge.to);
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<&EventId>> = in_degree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&n, _)| Reverse(n))
        .collect();
    let mut order = Vec::with_capacity(graph.nodes.len());
    while let Some(Reverse(node)) = ready.pop() {
        order.push(node.clone());
        for &next in successors.get(node).into_iter().flatten() {
            let d = in_degree.get_mut(next).expect("node present");
            *d -= 1;
            if *d == 0 {
                ready.push(Reverse(next));
            }
        }
    }
    if order.len() < graph.nodes.len() {
        let residual: Vec<EventId> = in_degree
            .into_iter()
            .filter(|(_, d)| *d > 0)
            .map(|(n, _)| n.clone())
            .collect();
        return Err(GraphError::Cycle(residual));
    }
    Ok(order)
}

/// The sub-diagram of the events that created or extended `class`. Removed
/// events are contracted: a kept event keeps an edge from every kept event
/// that reached it through removed events only. Loopbacks are dropped and
/// START edges attached to the events left without precedents.
pub fn sub_diagram_for_class(
    graph: &EventGraph,
    trace: &TraceMap,
    class: &str,
) -> Result<EventGraph, GraphError> {
    if !trace.has_class(class) {
        return Err(GraphError::UnknownClass(class.to_string()));
    }
    let kept: BTreeSet<EventId> = trace
        .events_of_class(class)
        .into_iter()
        .filter(|e| graph.nodes.contains(e))
        .collect();
    let mut sub = EventGraph {
        nodes: kept.clone(),
        edges: BTreeSet::new(),
    };
    for target in &kept {
        let merge = graph.merge_of(target);
        let mut stack: Vec<&EventId> = vec![target];
        let mut visited: HashSet<&EventId> = HashSet::new();
        while let Some(current) = stack.pop() {
            for edge in graph.incoming(current) {
                match &edge.from {
                    Endpoint::Event(p) if kept.contains(p) => {
                        sub.edges.insert(Edge {
                            from: edge.from.clone(),
                            to: target.clone(),
                            merge,
                            loopback: false,
                        });
                    }
                    Endpoint::Event(p) if visited.insert(p) => stack.push(p),
                    _ => {}
                }
            }
        }
    }
    sub.attach_start();
    Ok(sub)
}
