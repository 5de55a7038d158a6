//! Model validation: type invariants and cross-checks.

use std::collections::{HashMap, HashSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::carm::annotations::check_annotations;
use crate::carm::model::*;
use crate::diag::{sort_diagnostics, Diagnostic, Loc};
use crate::naming;

/// Errors detected while parsing a syntactically valid model: duplicate
/// event ids, reference fields naming undeclared business objects and mixed
/// merge kinds.
pub(crate) fn parse_level_errors(model: &RequirementsModel) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    let mut seen: HashMap<&EventId, &Loc> = HashMap::new();
    for event in model.events() {
        if let Some(first) = seen.insert(&event.id, &event.loc) {
            diags.push(Diagnostic::error(
                event.loc.clone(),
                "DUPLICATE_EVENT",
                format!("event `{}` is already defined at {first}", event.id),
            ));
        }
    }

    for event in model.events() {
        for (_, field) in event.fields() {
            if let Some(object) = field.referenced_object() {
                if model.business_object(object).is_none() {
                    diags.push(Diagnostic::error(
                        field.loc.clone(),
                        "UNKNOWN_OBJECT",
                        format!(
                            "reference field `{}` names `{object}`, which is not a declared business object",
                            field.name
                        ),
                    ));
                }
            }
        }
    }

    let mut incoming: HashMap<&Endpoint, Vec<&PrecedenceRelation>> = HashMap::new();
    for prec in model.precedences().filter(|p| !p.loopback) {
        incoming.entry(&prec.to).or_default().push(prec);
    }
    let mut targets: Vec<_> = incoming.into_iter().collect();
    targets.sort_by(|a, b| a.0.cmp(b.0));
    for (target, precs) in targets {
        let first = precs[0].merge;
        if let Some(odd) = precs.iter().find(|p| p.merge != first) {
            diags.push(Diagnostic::error(
                odd.loc.clone(),
                "MIXED_MERGE",
                format!(
                    "incoming precedences of `{target}` mix merge kinds `{first}` and `{}`",
                    odd.merge
                ),
            ));
        }
    }

    sort_diagnostics(&mut diags);
    diags
}

/// Returns every invariant violation and cross-check failure of `model`,
/// sorted by file, line and code. An empty list (or warnings only) means the
/// model is derivable. Validation is pure.
pub fn validate_model(model: &RequirementsModel) -> Vec<Diagnostic> {
    let mut diags = parse_level_errors(model);
    check_processes(model, &mut diags);
    check_structures(model, &mut diags);
    check_precedences(model, &mut diags);
    check_cycles(model, &mut diags);
    diags.extend(check_annotations(model));
    sort_diagnostics(&mut diags);
    diags
}

fn check_processes(model: &RequirementsModel, diags: &mut Vec<Diagnostic>) {
    for process in &model.processes {
        for event in &process.events {
            if !event.id.as_str().starts_with(process.id.as_str()) {
                diags.push(Diagnostic::warning(
                    event.loc.clone(),
                    "EVENT_PREFIX",
                    format!(
                        "event id `{}` does not carry the prefix of process `{}`",
                        event.id, process.id
                    ),
                ));
            }
        }
    }
}

fn check_structures(model: &RequirementsModel, diags: &mut Vec<Diagnostic>) {
    for event in model.events() {
        let aggs = event.aggregations();
        for agg in &aggs {
            let mut names = HashSet::new();
            for member in &agg.agg.members {
                let name = Aggregation::member_name(member);
                if !names.insert(naming::match_key(name)) {
                    let loc = match member {
                        Member::Field(f) => f.loc.clone(),
                        Member::Substructure(Substructure::Aggregation(a)) => a.loc.clone(),
                        Member::Substructure(Substructure::Iteration(i)) => i.loc.clone(),
                    };
                    diags.push(Diagnostic::error(
                        loc,
                        "DUPLICATE_MEMBER",
                        format!("`{name}` appears twice in aggregation `{}`", agg.agg.name),
                    ));
                }
            }
            let marked: Vec<&Field> = agg.agg.marked_fields().collect();
            if marked.len() > 1 {
                diags.push(Diagnostic::error(
                    marked[1].loc.clone(),
                    "OM2",
                    format!(
                        "aggregation `{}` marks {} reference fields as extending a business object ({}); only one may be marked",
                        agg.agg.name,
                        marked.len(),
                        marked.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join(", ")
                    ),
                ));
            }
            for field in agg.agg.fields() {
                if let OpCode::Other(op) = &field.op {
                    diags.push(Diagnostic::warning(
                        field.loc.clone(),
                        "UNKNOWN_OP",
                        format!("unknown operation code `{op}` on field `{}` (kept as is)", field.name),
                    ));
                }
            }
        }

        let field_names: HashSet<String> = event
            .fields()
            .iter()
            .map(|(_, f)| naming::match_key(&f.name))
            .collect();
        let mut variant_ids = HashSet::new();
        for variant in &event.variants {
            if !variant_ids.insert(variant.id.as_str()) {
                diags.push(Diagnostic::error(
                    variant.loc.clone(),
                    "DM3",
                    format!("variant `{}` is declared twice in `{}`", variant.id, event.id),
                ));
            }
            for name in variant.condition.fields() {
                if !field_names.contains(&naming::match_key(name)) {
                    diags.push(Diagnostic::error(
                        variant.loc.clone(),
                        "DM3",
                        format!(
                            "condition of variant `{}` names `{name}`, which is not a field of `{}`",
                            variant.id, event.id
                        ),
                    ));
                }
            }
        }

        if let Some(ident) = &event.identifier {
            let found = aggs.iter().any(|agg| {
                let data: HashSet<String> = agg
                    .agg
                    .data_fields()
                    .map(|(f, _)| naming::match_key(&f.name))
                    .collect();
                ident.fields.iter().all(|f| data.contains(&naming::match_key(f)))
            });
            if !found {
                diags.push(Diagnostic::error(
                    ident.loc.clone(),
                    "OM8",
                    format!(
                        "identifier restriction ({}) does not name data fields of one aggregation of `{}`",
                        ident.fields.join(", "),
                        event.id
                    ),
                ));
            }
        }

        for restriction in &event.restrictions {
            let subjects = restriction_subjects(event, &restriction.subject);
            let problem = match subjects {
                0 => Some(format!(
                    "restriction subject `{}` is neither a reference field nor a nested substructure of `{}`",
                    restriction.subject, event.id
                )),
                1 => None,
                _ => Some(format!(
                    "restriction subject `{}` is ambiguous in `{}`",
                    restriction.subject, event.id
                )),
            };
            if let Some(problem) = problem {
                diags.push(Diagnostic::error(restriction.loc.clone(), "RESTRICTION", problem));
            }
        }
    }
}

/// Counts the elements a restriction subject can stand for: reference fields
/// and nested aggregations (or the iterations around them), by name.
pub(crate) fn restriction_subjects(event: &CommunicativeEvent, subject: &str) -> usize {
    let key = naming::match_key(subject);
    let aggs = event.aggregations();
    let mut count = 0;
    for agg in &aggs {
        count += agg
            .agg
            .reference_fields()
            .filter(|f| naming::match_key(&f.name) == key)
            .count();
        if agg.parent.is_some() && subject_matches_nesting(&agg.path, agg.agg, &key) {
            count += 1;
        }
    }
    count
}

/// A nested aggregation is named by its own name or by the iteration that
/// directly encloses it (the last path segment before its name).
pub(crate) fn subject_matches_nesting(path: &str, agg: &Aggregation, key: &str) -> bool {
    if naming::match_key(&agg.name) == key {
        return true;
    }
    let mut segments = path.rsplit('/');
    segments.next();
    segments.next().is_some_and(|s| naming::match_key(s) == key)
}

fn check_precedences(model: &RequirementsModel, diags: &mut Vec<Diagnostic>) {
    let ids: HashSet<&EventId> = model.events().map(|e| &e.id).collect();
    for prec in model.precedences() {
        for end in [&prec.from, &prec.to] {
            if let Endpoint::Event(id) = end {
                if !ids.contains(id) {
                    diags.push(Diagnostic::error(
                        prec.loc.clone(),
                        "OM1",
                        format!("precedence `{} -> {}` names unknown event `{id}`", prec.from, prec.to),
                    ));
                }
            }
        }
    }
}

/// One OM3 error per strongly connected component of the non-loopback
/// precedence graph that contains a cycle.
fn check_cycles(model: &RequirementsModel, diags: &mut Vec<Diagnostic>) {
    let mut graph: DiGraph<&EventId, &PrecedenceRelation> = DiGraph::new();
    let mut nodes = HashMap::new();
    for event in model.events() {
        nodes.entry(&event.id).or_insert_with(|| graph.add_node(&event.id));
    }
    for prec in model.precedences().filter(|p| !p.loopback) {
        if let (Some(from), Some(to)) = (prec.from.event(), prec.to.event()) {
            if let (Some(&a), Some(&b)) = (nodes.get(from), nodes.get(to)) {
                graph.add_edge(a, b, prec);
            }
        }
    }
    for scc in tarjan_scc(&graph) {
        let cyclic = scc.len() > 1 || graph.find_edge(scc[0], scc[0]).is_some();
        if !cyclic {
            continue;
        }
        let members: HashSet<_> = scc.iter().copied().collect();
        let mut events: Vec<&EventId> = scc.iter().map(|&n| graph[n]).collect();
        events.sort();
        let loc = graph
            .edge_indices()
            .filter(|&e| {
                let (a, b) = graph.edge_endpoints(e).expect("edge exists");
                members.contains(&a) && members.contains(&b)
            })
            .map(|e| &graph[e].loc)
            .min_by(|a, b| (&a.file, a.line, a.col).cmp(&(&b.file, b.line, b.col)))
            .cloned()
            .unwrap_or_default();
        diags.push(Diagnostic::error(
            loc,
            "OM3",
            format!(
                "precedences form a cycle through {} (mark one relation as `loopback`)",
                events.iter().map(|e| format!("`{e}`")).collect::<Vec<_>>().join(", ")
            ),
        ));
    }
}
