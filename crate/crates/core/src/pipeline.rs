//! The whole derivation: validate, build and sort the event graph, derive the
//! Object Model, then the Dynamic Model.

use crate::carm::{parse_annotations, parse_files, validate_model, EventId, RequirementsModel};
use crate::ced::{self, EventGraph};
use crate::diag::{has_errors, sort_diagnostics, Diagnostic, Loc};
use crate::dm::{derive_dynamic_model, DmOptions, StateTransitionDiagram};
use crate::om::{derive_object_model, DeriveOptions, ObjectModel};
use crate::trace::TraceMap;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Options {
    pub strict: bool,
    pub self_loops: bool,
    /// Derive only this process, extended with its precedent events.
    pub process: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub graph: EventGraph,
    pub order: Vec<EventId>,
    pub object_model: ObjectModel,
    pub diagrams: Vec<StateTransitionDiagram>,
    /// Object Model and Dynamic Model links together.
    pub trace: TraceMap,
    /// Warnings, sorted.
    pub diagnostics: Vec<Diagnostic>,
}

/// Parses `.carm` sources plus an optional annotations source into one model.
pub fn load(sources: &[(&str, &str)], annotations: Option<(&str, &str)>) -> Result<RequirementsModel, Vec<Diagnostic>> {
    let mut model = parse_files(sources.iter().copied())?;
    if let Some((file, text)) = annotations {
        let set = parse_annotations(file, text)?;
        model.annotations.entries.extend(set.entries);
    }
    Ok(model)
}

/// Validates `model` and derives both models from it. On failure returns
/// every diagnostic gathered, sorted, with at least one error among them.
pub fn derive(model: &RequirementsModel, options: &Options) -> Result<Output, Vec<Diagnostic>> {
    let mut diags = validate_model(model);
    let fail = |mut diags: Vec<Diagnostic>| {
        sort_diagnostics(&mut diags);
        diags
    };
    if has_errors(&diags) {
        return Err(fail(diags));
    }
    let graph_error = |e: ced::GraphError| {
        let code = match e {
            ced::GraphError::DanglingPrecedence { .. } => "OM1",
            ced::GraphError::Cycle(_) => "OM3",
            _ => "PROCESS",
        };
        Diagnostic::error(Loc::synthetic(), code, e.to_string())
    };
    let graph = match &options.process {
        Some(p) => ced::extend_diagram(model, p),
        None => ced::full_diagram(model),
    };
    let graph = match graph {
        Ok(g) => g,
        Err(e) => {
            diags.push(graph_error(e));
            return Err(fail(diags));
        }
    };
    let order = match ced::sort_events(&graph) {
        Ok(o) => o,
        Err(e) => {
            diags.push(graph_error(e));
            return Err(fail(diags));
        }
    };
    let derivation = match derive_object_model(model, &order, DeriveOptions { strict: options.strict }) {
        Ok(d) => d,
        Err(more) => {
            diags.extend(more);
            return Err(fail(diags));
        }
    };
    diags.extend(derivation.diagnostics);
    let mut trace = derivation.trace;
    let dynamic = match derive_dynamic_model(
        model,
        &derivation.object_model,
        &graph,
        &trace,
        DmOptions {
            self_loops: options.self_loops,
        },
    ) {
        Ok(d) => d,
        Err(more) => {
            diags.extend(more);
            return Err(fail(diags));
        }
    };
    diags.extend(dynamic.diagnostics);
    for link in dynamic.trace.links() {
        trace.add(&link.rule, link.source.clone(), link.derived.clone());
    }
    if has_errors(&diags) {
        return Err(fail(diags));
    }
    sort_diagnostics(&mut diags);
    Ok(Output {
        graph,
        order,
        object_model: derivation.object_model,
        diagrams: dynamic.diagrams,
        trace,
        diagnostics: diags,
    })
}
