//! Browser bindings: derive a model from `.carm` text, draw event graphs and
//! the and-join lattice.

pub mod svg;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use ca2om_core::carm::{parse_files, Endpoint, EventId};
use ca2om_core::ced::{self, EventGraph};
use ca2om_core::dm::{EventStep, StateKind, StateTransitionDiagram, StdBuilder};
use ca2om_core::emit::{render_class_dot, render_std_dot, render_trace};
use ca2om_core::pipeline::{self, Options};

use svg::{Link, Node, NodeStyle};

/// Largest and-join the demo draws.
pub const MAX_JOIN: u32 = 5;

/// Derives `carm` (plus `annotations`, ignored when blank) and returns a JSON
/// document: `ok`, `diagnostics`, and on success `model`, `order`,
/// `classes_dot`, `trace`, and per class `diagrams` with `dot` and `svg`.
#[wasm_bindgen]
pub fn derive(carm: &str, annotations: &str, self_loops: bool) -> String {
    let ann = (!annotations.trim().is_empty()).then_some(("annotations", annotations));
    let result = pipeline::load(&[("model.carm", carm)], ann).and_then(|model| {
        pipeline::derive(
            &model,
            &Options {
                self_loops,
                ..Options::default()
            },
        )
    });
    let value = match result {
        Err(diags) => json!({
            "ok": false,
            "diagnostics": diags.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }),
        Ok(out) => {
            let diagrams: Vec<Value> = out
                .diagrams
                .iter()
                .map(|d| {
                    json!({
                        "class": d.class_name,
                        "dot": render_std_dot(d),
                        "svg": std_svg(d),
                    })
                })
                .collect();
            json!({
                "ok": true,
                "diagnostics": out.diagnostics.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "order": out.order.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "model": out.object_model,
                "classes_dot": render_class_dot(&out.object_model),
                "diagrams": diagrams,
                "trace": render_trace(&out.trace),
            })
        }
    };
    value.to_string()
}

/// The state diagram of an and-join of `k` independent events (clamped to
/// 2..=MAX_JOIN), as SVG.
#[wasm_bindgen]
pub fn and_join_lattice_svg(k: u32) -> String {
    std_svg(&and_join_lattice(k))
}

pub fn and_join_lattice(k: u32) -> StateTransitionDiagram {
    let k = k.clamp(2, MAX_JOIN);
    let step = |id: &str| EventStep {
        event: EventId::new(id),
        service: format!("s_{}", id.to_lowercase()),
        agents: Vec::new(),
    };
    let mut builder = StdBuilder::new("JOIN");
    let lattice = |builder: &mut StdBuilder| -> Result<(), ca2om_core::dm::DmError> {
        builder.transform_event(&step("R"), &[Endpoint::Start])?;
        let precedents: Vec<EventId> = (1..=k).map(|i| EventId::new(format!("P{i}"))).collect();
        for p in &precedents {
            builder.transform_event(&step(p.as_str()), &[Endpoint::Event(EventId::new("R"))])?;
        }
        builder.transform_and_join(&step("J"), &precedents)
    };
    lattice(&mut builder).expect("independent precedents always join");
    builder.finish().0
}

/// The event graph of `process` (with its preceding events) or, when
/// `process` is blank, of the whole model, as SVG. Parse and graph errors
/// come back as a one-line SVG message.
#[wasm_bindgen]
pub fn event_graph_svg(carm: &str, process: &str) -> String {
    let graph = parse_files([("model.carm", carm)])
        .map_err(|d| d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
        .and_then(|model| {
            let graph = if process.trim().is_empty() {
                ced::full_diagram(&model)
            } else {
                ced::extend_diagram(&model, process.trim())
            };
            graph.map_err(|e| e.to_string())
        });
    match graph {
        Ok(g) => graph_svg(&g),
        Err(msg) => error_svg(&msg),
    }
}

fn error_svg(message: &str) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="40"><text x="10" y="25" fill="firebrick" font-family="Helvetica, sans-serif" font-size="12">{}</text></svg>"#,
        svg::escape(message)
    )
}

pub fn graph_svg(graph: &EventGraph) -> String {
    let mut nodes = vec![Node {
        id: "START".into(),
        label: "START".into(),
        style: NodeStyle::Dot,
    }];
    nodes.extend(graph.nodes.iter().map(|e| Node {
        id: e.to_string(),
        label: e.to_string(),
        style: NodeStyle::Box,
    }));
    let links: Vec<Link> = graph
        .edges
        .iter()
        .map(|e| Link {
            from: e.from.to_string(),
            to: e.to.to_string(),
            label: match e.merge {
                ca2om_core::carm::MergeKind::AndJoin => "and".into(),
                ca2om_core::carm::MergeKind::OrMerge => "or".into(),
                ca2om_core::carm::MergeKind::Plain => String::new(),
            },
            back: e.loopback,
        })
        .collect();
    svg::render(&nodes, &links)
}

pub fn std_svg(std: &StateTransitionDiagram) -> String {
    let nodes: Vec<Node> = std
        .states
        .iter()
        .map(|s| Node {
            id: s.name.clone(),
            label: s.name.clone(),
            style: match s.kind {
                StateKind::PreCreation => NodeStyle::Dot,
                StateKind::Intermediate => NodeStyle::Box,
                StateKind::Auxiliary => NodeStyle::Dashed,
            },
        })
        .collect();
    let links: Vec<Link> = std
        .transitions
        .iter()
        .map(|t| Link {
            from: t.from.clone(),
            to: t.to.clone(),
            label: t.label(),
            back: false,
        })
        .collect();
    svg::render(&nodes, &links)
}
