//! Dynamic Model derivation: one state-transition diagram per class, built
//! from the class's event sub-diagram.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::carm::model::{CommunicativeEvent, Endpoint, EventId, MergeKind, RequirementsModel};
use crate::ced::{self, EventGraph};
use crate::diag::{Diagnostic, Loc};
use crate::naming;
use crate::om::model::{ObjectModel, ServiceKind};
use crate::trace::{DerivedRef, SourceRef, TraceMap};

pub const PRE_CREATION: &str = "Pre_creation";
pub const DEFAULT_MESSAGE: &str = "This action cannot be executed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    PreCreation,
    Intermediate,
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State {
    pub name: String,
    pub kind: StateKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub to: String,
    pub service: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub condition: Option<String>,
    pub agents: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub message: Option<String>,
}

impl Transition {
    /// `service` or `service when condition`.
    pub fn label(&self) -> String {
        match &self.condition {
            Some(c) => format!("{} when {c}", self.service),
            None => self.service.clone(),
        }
    }

    /// `from-[service]->to`, the path segment used in trace links.
    pub fn key(&self) -> String {
        format!("{}-[{}]->{}", self.from, self.service, self.to)
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} --{}--> {}", self.from, self.label(), self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateTransitionDiagram {
    pub class_name: String,
    pub states: Vec<State>,
    pub transitions: Vec<Transition>,
}

impl StateTransitionDiagram {
    pub fn state(&self, name: &str) -> Option<&State> {
        self.states.iter().find(|s| s.name == name)
    }
}

/// Name of the state reached after `event` (or an event variant) occurs.
pub fn state_name(id: &str) -> String {
    format!("{id}ed")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct DmError {
    pub rule: &'static str,
    pub message: String,
}

impl DmError {
    fn new(rule: &'static str, message: impl Into<String>) -> Self {
        DmError {
            rule,
            message: message.into(),
        }
    }
}

/// What an event contributes to one class's diagram: the service labelling
/// its transitions and the agents allowed to fire them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStep {
    pub event: EventId,
    pub service: String,
    pub agents: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantStep {
    pub id: String,
    /// The specialisation condition over service arguments.
    pub condition: String,
}

/// Builds one state-transition diagram, tracking which states each
/// processed event led to.
#[derive(Debug, Clone)]
pub struct StdBuilder {
    diagram: StateTransitionDiagram,
    states_of: BTreeMap<Endpoint, Vec<String>>,
    trace: TraceMap,
}

impl StdBuilder {
    /// A diagram holding only the pre-creation state, reached from START.
    pub fn new(class: &str) -> Self {
        let mut builder = StdBuilder {
            diagram: StateTransitionDiagram {
                class_name: class.to_string(),
                states: Vec::new(),
                transitions: Vec::new(),
            },
            states_of: BTreeMap::new(),
            trace: TraceMap::new(),
        };
        builder.add_state(PRE_CREATION, StateKind::PreCreation, "DM2-INIT", SourceRef::Start);
        builder.states_of.insert(Endpoint::Start, vec![PRE_CREATION.to_string()]);
        builder
    }

    pub fn diagram(&self) -> &StateTransitionDiagram {
        &self.diagram
    }

    /// States reached by `endpoint`; START maps to the pre-creation state.
    pub fn states_of(&self, endpoint: &Endpoint) -> &[String] {
        self.states_of.get(endpoint).map_or(&[], Vec::as_slice)
    }

    pub fn finish(self) -> (StateTransitionDiagram, TraceMap) {
        (self.diagram, self.trace)
    }

    fn class(&self) -> String {
        self.diagram.class_name.clone()
    }

    fn add_state(&mut self, name: &str, kind: StateKind, rule: &str, source: SourceRef) {
        if self.diagram.state(name).is_none() {
            self.diagram.states.push(State {
                name: name.to_string(),
                kind,
            });
        }
        let class = self.class();
        self.trace.add(
            rule,
            source,
            DerivedRef::State {
                class,
                name: name.to_string(),
            },
        );
    }

    fn add_transition(&mut self, transition: Transition, rule: &str, source: SourceRef) {
        let key = transition.key();
        if !self.diagram.transitions.iter().any(|t| t.key() == key) {
            self.diagram.transitions.push(transition);
        }
        let class = self.class();
        self.trace.add(rule, source, DerivedRef::Transition { class, key });
    }

    fn fresh_state(&self, name: &str) -> Result<(), DmError> {
        match self.diagram.state(name) {
            Some(_) => Err(DmError::new("DM2", format!("state `{name}` already exists"))),
            None => Ok(()),
        }
    }

    fn source_states(&self, precedents: &[Endpoint], event: &EventId) -> Result<Vec<String>, DmError> {
        let mut sources = Vec::new();
        for p in precedents {
            let states = self.states_of(p);
            if states.is_empty() {
                return Err(DmError::new(
                    "DM2",
                    format!("precedent `{p}` of `{event}` has no state yet; events are out of order"),
                ));
            }
            sources.extend(states.iter().cloned());
        }
        Ok(sources)
    }

    /// A new state `<event>ed` and one transition into it from the state of
    /// each precedent.
    pub fn transform_event(&mut self, step: &EventStep, precedents: &[Endpoint]) -> Result<(), DmError> {
        let target = state_name(step.event.as_str());
        self.fresh_state(&target)?;
        let sources = self.source_states(precedents, &step.event)?;
        let source = SourceRef::Event(step.event.clone());
        self.add_state(&target, StateKind::Intermediate, "DM2", source.clone());
        for from in sources {
            let t = Transition {
                from,
                to: target.clone(),
                service: step.service.clone(),
                condition: None,
                agents: step.agents.clone(),
                message: None,
            };
            self.add_transition(t, "DM2", source.clone());
        }
        self.states_of.insert(Endpoint::Event(step.event.clone()), vec![target]);
        Ok(())
    }

    /// One state per variant, entered from every precedent state under the
    /// variant's condition.
    pub fn transform_specialized(
        &mut self,
        step: &EventStep,
        precedents: &[Endpoint],
        variants: &[VariantStep],
    ) -> Result<(), DmError> {
        let sources = self.source_states(precedents, &step.event)?;
        let mut reached = Vec::new();
        for variant in variants {
            let target = state_name(&variant.id);
            if self.diagram.state(&target).is_some() {
                return Err(DmError::new(
                    "DM3",
                    format!("variant state `{target}` of `{}` already exists", step.event),
                ));
            }
            let source = SourceRef::Variant {
                event: step.event.clone(),
                variant: variant.id.clone(),
            };
            self.add_state(&target, StateKind::Intermediate, "DM3", source.clone());
            for from in &sources {
                let t = Transition {
                    from: from.clone(),
                    to: target.clone(),
                    service: step.service.clone(),
                    condition: Some(variant.condition.clone()),
                    agents: step.agents.clone(),
                    message: Some(DEFAULT_MESSAGE.to_string()),
                };
                self.add_transition(t, "DM3", source.clone());
            }
            reached.push(target);
        }
        self.states_of.insert(Endpoint::Event(step.event.clone()), reached);
        Ok(())
    }

    /// The and-join lattice: every set of precedents that may have occurred
    /// becomes a state (the empty set is the common root, singletons are the
    /// precedents' own states, larger sets are auxiliary), linked by the
    /// transitions of the precedent that occurs next. The state of the full
    /// set leads to `<event>ed`.
    pub fn transform_and_join(&mut self, step: &EventStep, precedents: &[EventId]) -> Result<(), DmError> {
        let mut precedents: Vec<EventId> = precedents.to_vec();
        precedents.sort();
        precedents.dedup();
        if precedents.len() < 2 {
            let plain: Vec<Endpoint> = precedents.into_iter().map(Endpoint::Event).collect();
            return self.transform_event(step, &plain);
        }
        let target = state_name(step.event.as_str());
        self.fresh_state(&target)?;

        // Each precedent must have one state, entered from one common root.
        let mut root: Option<String> = None;
        let mut moves: Vec<(String, Vec<String>)> = Vec::new();
        for p in &precedents {
            let states = self.states_of(&Endpoint::Event(p.clone()));
            let [own] = states else {
                return Err(DmError::new(
                    "DM4",
                    format!("and-join precedent `{p}` of `{}` must lead to exactly one state", step.event),
                ));
            };
            let entering: Vec<&Transition> = self.diagram.transitions.iter().filter(|t| &t.to == own).collect();
            let sources: BTreeSet<&str> = entering.iter().map(|t| t.from.as_str()).collect();
            let [source] = sources.into_iter().collect::<Vec<_>>()[..] else {
                return Err(DmError::new(
                    "DM4",
                    format!("and-join precedent `{p}` of `{}` is entered from several states", step.event),
                ));
            };
            match &root {
                None => root = Some(source.to_string()),
                Some(r) if r == source => {}
                Some(r) => {
                    return Err(DmError::new(
                        "DM4",
                        format!(
                            "and-join precedents of `{}` start from different states (`{r}`, `{source}`)",
                            step.event
                        ),
                    ))
                }
            }
            let t = entering[0];
            moves.push((t.service.clone(), t.agents.clone()));
        }
        let root = root.expect("at least two precedents");

        let k = precedents.len();
        let full = (1u32 << k) - 1;
        let name_of = |set: u32| -> String {
            match set.count_ones() {
                0 => root.clone(),
                1 => state_name(precedents[set.trailing_zeros() as usize].as_str()),
                _ => (0..k)
                    .filter(|i| set & (1 << i) != 0)
                    .map(|i| precedents[i].as_str())
                    .collect::<Vec<_>>()
                    .join("+"),
            }
        };
        let source = SourceRef::Event(step.event.clone());
        for set in 3..=full {
            if set.count_ones() >= 2 {
                self.add_state(&name_of(set), StateKind::Auxiliary, "DM4", source.clone());
            }
        }
        for set in 0..full {
            for (j, (service, agents)) in moves.iter().enumerate() {
                if set & (1 << j) != 0 {
                    continue;
                }
                let t = Transition {
                    from: name_of(set),
                    to: name_of(set | (1 << j)),
                    service: service.clone(),
                    condition: None,
                    agents: agents.clone(),
                    message: None,
                };
                self.add_transition(t, "DM4", SourceRef::Event(precedents[j].clone()));
            }
        }
        self.add_state(&target, StateKind::Intermediate, "DM4", source.clone());
        let t = Transition {
            from: name_of(full),
            to: target.clone(),
            service: step.service.clone(),
            condition: None,
            agents: step.agents.clone(),
            message: None,
        };
        self.add_transition(t, "DM4", source);
        self.states_of.insert(Endpoint::Event(step.event.clone()), vec![target]);
        Ok(())
    }

    /// A self-loop on each of `states` for `service`.
    pub fn add_self_loops(&mut self, event: &EventId, service: &str, agents: &[String], states: &[String]) {
        for state in states {
            let t = Transition {
                from: state.clone(),
                to: state.clone(),
                service: service.to_string(),
                condition: None,
                agents: agents.to_vec(),
                message: None,
            };
            self.add_transition(t, "DM-SELF", SourceRef::Event(event.clone()));
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DmOptions {
    /// Add self-loop transitions for edit and shared services.
    pub self_loops: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicModel {
    pub diagrams: Vec<StateTransitionDiagram>,
    /// Links from requirements elements to states and transitions.
    pub trace: TraceMap,
    pub diagnostics: Vec<Diagnostic>,
}

/// Derives the diagram of every class of `om`, in class order.
pub fn derive_dynamic_model(
    model: &RequirementsModel,
    om: &ObjectModel,
    graph: &EventGraph,
    trace: &TraceMap,
    options: DmOptions,
) -> Result<DynamicModel, Vec<Diagnostic>> {
    let mut out = DynamicModel {
        diagrams: Vec::new(),
        trace: TraceMap::new(),
        diagnostics: Vec::new(),
    };
    let mut errors = Vec::new();
    for class in &om.classes {
        match derive_class_diagram(model, om, graph, trace, &class.name, options, &mut out.diagnostics) {
            Ok((diagram, links)) => {
                for link in links.links() {
                    out.trace.add(&link.rule, link.source.clone(), link.derived.clone());
                }
                out.diagrams.push(diagram);
            }
            Err(err) => errors.push(err),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        out.diagnostics.extend(errors);
        Err(out.diagnostics)
    }
}

/// The diagram of one class.
pub fn derive_class_diagram(
    model: &RequirementsModel,
    om: &ObjectModel,
    graph: &EventGraph,
    trace: &TraceMap,
    class: &str,
    options: DmOptions,
    warnings: &mut Vec<Diagnostic>,
) -> Result<(StateTransitionDiagram, TraceMap), Diagnostic> {
    let in_class = |msg: String| format!("in the diagram of `{class}`: {msg}");
    let sub = ced::sub_diagram_for_class(graph, trace, class)
        .map_err(|e| Diagnostic::error(Loc::synthetic(), "DM1", in_class(e.to_string())))?;
    let dropped: Vec<String> = graph
        .loopbacks()
        .filter(|e| e.from.event().is_some_and(|f| sub.nodes.contains(f)) && sub.nodes.contains(&e.to))
        .map(|e| format!("{} -> {}", e.from, e.to))
        .collect();
    if !dropped.is_empty() {
        warnings.push(Diagnostic::warning(
            Loc::synthetic(),
            "DM1",
            in_class(format!("loopbacks dropped: {}", dropped.join(", "))),
        ));
    }
    let order = ced::sort_events(&sub).map_err(|e| Diagnostic::error(Loc::synthetic(), "DM1", in_class(e.to_string())))?;

    let mut builder = StdBuilder::new(class);
    for id in &order {
        let Some(event) = model.event(id) else {
            return Err(Diagnostic::error(Loc::synthetic(), "DM1", in_class(format!("unknown event `{id}`"))));
        };
        let fail = |e: DmError| Diagnostic::error(event.loc.clone(), e.rule, in_class(format!("event `{id}`: {e}")));
        let step = event_step(om, trace, event, class).map_err(fail)?;
        let precedents: Vec<Endpoint> = sub.incoming(id).map(|e| e.from.clone()).collect();
        let joined: Vec<EventId> = precedents.iter().filter_map(|p| p.event().cloned()).collect();
        if sub.merge_of(id) == MergeKind::AndJoin && joined.len() >= 2 {
            if event.is_specialized() {
                return Err(fail(DmError::new(
                    "DM4",
                    "a specialised event cannot be the target of an and-join",
                )));
            }
            builder.transform_and_join(&step, &joined).map_err(fail)?;
        } else if event.is_specialized() {
            let variants = variant_steps(event, trace, om, class, &step.service).map_err(fail)?;
            builder.transform_specialized(&step, &precedents, &variants).map_err(fail)?;
        } else {
            builder.transform_event(&step, &precedents).map_err(fail)?;
        }
    }

    if options.self_loops {
        add_self_loops(&mut builder, om, trace, class);
    }
    Ok(builder.finish())
}

fn event_step(om: &ObjectModel, trace: &TraceMap, event: &CommunicativeEvent, class: &str) -> Result<EventStep, DmError> {
    let services = trace.event_services(&event.id, class);
    let rank = |(rule, name): &(&str, &str)| -> u8 {
        if *rule == "OM26" {
            return 0;
        }
        match om.class(class).and_then(|c| c.service(name)).map(|s| s.kind) {
            Some(ServiceKind::EndOfEditing) => 1,
            Some(ServiceKind::Creation) => 2,
            Some(ServiceKind::Edit) => 3,
            Some(ServiceKind::SharedInsert) => 4,
            Some(ServiceKind::SharedDelete) => 5,
            None => 6,
        }
    };
    let (_, service) = services
        .iter()
        .filter(|s| rank(s) < 6)
        .min_by_key(|s| rank(s))
        .ok_or_else(|| DmError::new("DM2", format!("no service of `{class}` traces to the event")))?;
    Ok(EventStep {
        event: event.id.clone(),
        service: service.to_string(),
        agents: vec![naming::agent_name(&event.interface_actor)],
    })
}

/// Renders each variant's condition over the arguments derived from the
/// fields it mentions.
fn variant_steps(
    event: &CommunicativeEvent,
    trace: &TraceMap,
    om: &ObjectModel,
    class: &str,
    label: &str,
) -> Result<Vec<VariantStep>, DmError> {
    let preferred: Vec<String> = match om.transactions.iter().find(|t| t.owner_class == class && t.name == label) {
        Some(tx) => tx.components.clone(),
        None => vec![label.to_string()],
    };
    let fields = event.fields();
    let argument_for = |name: &str| -> Option<String> {
        let key = naming::match_key(name);
        let (path, field) = fields.iter().find(|(_, f)| naming::match_key(&f.name) == key)?;
        if field.extends() {
            return Some(format!("p_this{}", naming::camel(class)));
        }
        let own = trace.field_arguments(path, class);
        own.iter()
            .find(|(svc, _)| preferred.iter().any(|p| p == svc))
            .or_else(|| own.first())
            .map(|(_, arg)| arg.to_string())
            .or_else(|| {
                trace.links().iter().find_map(|l| match (&l.source, &l.derived) {
                    (SourceRef::Field(p), DerivedRef::Argument { name, .. }) if p == path => Some(name.clone()),
                    _ => None,
                })
            })
    };
    let mut steps = Vec::new();
    for variant in &event.variants {
        let mut mapping = BTreeMap::new();
        for field in variant.condition.fields() {
            let arg = argument_for(field).ok_or_else(|| {
                DmError::new(
                    "DM3",
                    format!("condition of variant `{}` refers to `{field}`, which has no derived argument", variant.id),
                )
            })?;
            mapping.insert(field.to_string(), arg);
        }
        steps.push(VariantStep {
            id: variant.id.clone(),
            condition: variant.condition.render_with(|f| mapping[f].clone()),
        });
    }
    Ok(steps)
}

/// Edit and shared services loop on the states of the event that introduced
/// them, or on every intermediate state when that event has no state here.
fn add_self_loops(builder: &mut StdBuilder, om: &ObjectModel, trace: &TraceMap, class: &str) {
    let Some(cls) = om.class(class) else { return };
    for service in cls.services.iter().filter(|s| matches!(s.kind, ServiceKind::Edit) || s.kind.is_shared()) {
        let introducing = trace.links().iter().find_map(|l| match &l.derived {
            DerivedRef::Service { class: c, name } if c == class && name == &service.name => {
                l.source.event_id().map(EventId::new)
            }
            _ => None,
        });
        let Some(event) = introducing else { continue };
        let mut states = builder.states_of(&Endpoint::Event(event.clone())).to_vec();
        if states.is_empty() {
            states = builder
                .diagram()
                .states
                .iter()
                .filter(|s| s.kind == StateKind::Intermediate)
                .map(|s| s.name.clone())
                .collect();
        }
        builder.add_self_loops(&event, &service.name, &service.agents, &states);
    }
}
