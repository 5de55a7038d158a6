//! Traceability links between requirements elements and derived elements.
//!
//! Every link records the rule that created it. Sources are requirements
//! elements (the start node, events, aggregations, fields, event variants);
//! derived elements are Object Model and Dynamic Model elements. Paths:
//!
//! | element      | path                                            |
//! |--------------|-------------------------------------------------|
//! | event        | `TREAT 1`                                       |
//! | aggregation  | `TREAT 1/MEDICAL TREATMENT`                     |
//! | field        | `TREAT 1/MEDICAL TREATMENT/Comments`            |
//! | variant      | `TREAT 1~A1`                                    |
//! | class        | `MEDICAL_TREATMENT`                             |
//! | attribute    | `MEDICAL_TREATMENT.comments`                    |
//! | relationship | `MEDICAL_TREATMENT--PATIENT[Patient]`           |
//! | service      | `MEDICAL_TREATMENT::new_medical_treatment`      |
//! | argument     | `MEDICAL_TREATMENT::new_medical_treatment/p_atrcomments` |
//! | transaction  | `MEDICAL_TREATMENT::Treat2_assign_dispensary`   |
//! | state        | `MEDICAL_TREATMENT@TREAT 1ed`                   |
//! | transition   | `MEDICAL_TREATMENT@Pre_creation-[svc]->TREAT 1ed` |

use std::collections::BTreeSet;
use std::fmt;

use crate::carm::model::{EventId, START};
use crate::om::model::ObjectModel;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceRef {
    Start,
    Event(EventId),
    Aggregation(String),
    Field(String),
    Variant { event: EventId, variant: String },
}

impl SourceRef {
    /// The event a source element belongs to.
    pub fn event_id(&self) -> Option<&str> {
        match self {
            SourceRef::Start => None,
            SourceRef::Event(id) => Some(id.as_str()),
            SourceRef::Variant { event, .. } => Some(event.as_str()),
            SourceRef::Aggregation(path) | SourceRef::Field(path) => path.split('/').next(),
        }
    }
}

impl fmt::Display for SourceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceRef::Start => f.write_str(START),
            SourceRef::Event(id) => write!(f, "{id}"),
            SourceRef::Aggregation(path) | SourceRef::Field(path) => f.write_str(path),
            SourceRef::Variant { event, variant } => write!(f, "{event}~{variant}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DerivedRef {
    Class(String),
    Attribute { class: String, name: String },
    Relationship(String),
    Service { class: String, name: String },
    Argument { class: String, service: String, name: String },
    Transaction { class: String, name: String },
    State { class: String, name: String },
    Transition { class: String, key: String },
}

impl DerivedRef {
    pub fn class(&self) -> Option<&str> {
        match self {
            DerivedRef::Class(c)
            | DerivedRef::Attribute { class: c, .. }
            | DerivedRef::Service { class: c, .. }
            | DerivedRef::Argument { class: c, .. }
            | DerivedRef::Transaction { class: c, .. }
            | DerivedRef::State { class: c, .. }
            | DerivedRef::Transition { class: c, .. } => Some(c),
            DerivedRef::Relationship(_) => None,
        }
    }
}

impl fmt::Display for DerivedRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivedRef::Class(c) => f.write_str(c),
            DerivedRef::Attribute { class, name } => write!(f, "{class}.{name}"),
            DerivedRef::Relationship(key) => f.write_str(key),
            DerivedRef::Service { class, name } | DerivedRef::Transaction { class, name } => {
                write!(f, "{class}::{name}")
            }
            DerivedRef::Argument { class, service, name } => write!(f, "{class}::{service}/{name}"),
            DerivedRef::State { class, name } => write!(f, "{class}@{name}"),
            DerivedRef::Transition { class, key } => write!(f, "{class}@{key}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceLink {
    pub rule: String,
    pub source: SourceRef,
    pub derived: DerivedRef,
}

impl fmt::Display for TraceLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.rule, self.source, self.derived)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceMap {
    links: Vec<TraceLink>,
}

impl TraceMap {
    pub fn new() -> Self {
        TraceMap::default()
    }

    pub fn add(&mut self, rule: &str, source: SourceRef, derived: DerivedRef) {
        let link = TraceLink {
            rule: rule.to_string(),
            source,
            derived,
        };
        if !self.links.contains(&link) {
            self.links.push(link);
        }
    }

    pub fn links(&self) -> &[TraceLink] {
        &self.links
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Classes created or extended by `event`, in derivation order.
    pub fn classes_of_event(&self, event: &EventId) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for link in &self.links {
            if let (SourceRef::Event(e), DerivedRef::Class(c)) = (&link.source, &link.derived) {
                if e == event && !out.contains(&c.as_str()) {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Events that created or extended `class`.
    pub fn events_of_class(&self, class: &str) -> BTreeSet<EventId> {
        self.links
            .iter()
            .filter_map(|l| match (&l.source, &l.derived) {
                (SourceRef::Event(e), DerivedRef::Class(c)) if c == class => Some(e.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn has_class(&self, class: &str) -> bool {
        self.links
            .iter()
            .any(|l| matches!(&l.derived, DerivedRef::Class(c) if c == class))
    }

    /// The class derived from (or extended through) the aggregation at `path`.
    pub fn class_of_aggregation(&self, path: &str) -> Option<&str> {
        self.links.iter().find_map(|l| match (&l.source, &l.derived) {
            (SourceRef::Aggregation(p), DerivedRef::Class(c)) if p == path => Some(c.as_str()),
            _ => None,
        })
    }

    /// Services and transactions of `class` that `event` traces to, as
    /// `(rule, name)` pairs in derivation order.
    pub fn event_services(&self, event: &EventId, class: &str) -> Vec<(&str, &str)> {
        self.links
            .iter()
            .filter_map(|l| match (&l.source, &l.derived) {
                (SourceRef::Event(e), DerivedRef::Service { class: c, name })
                | (SourceRef::Event(e), DerivedRef::Transaction { class: c, name })
                    if e == event && c == class =>
                {
                    Some((l.rule.as_str(), name.as_str()))
                }
                _ => None,
            })
            .collect()
    }

    /// Arguments derived from the field at `field_path` within `class`,
    /// as `(service, argument)` pairs.
    pub fn field_arguments(&self, field_path: &str, class: &str) -> Vec<(&str, &str)> {
        self.links
            .iter()
            .filter_map(|l| match (&l.source, &l.derived) {
                (SourceRef::Field(p), DerivedRef::Argument { class: c, service, name })
                    if p == field_path && c == class =>
                {
                    Some((service.as_str(), name.as_str()))
                }
                _ => None,
            })
            .collect()
    }

    /// Every link whose source or derived path equals `element`.
    pub fn touching(&self, element: &str) -> Vec<&TraceLink> {
        let mut out: Vec<&TraceLink> = self
            .links
            .iter()
            .filter(|l| l.source.to_string() == element || l.derived.to_string() == element)
            .collect();
        out.sort();
        out
    }

    /// Links as sorted `rule\tsource\tderived` rows.
    pub fn rows(&self) -> Vec<String> {
        let mut rows: Vec<String> = self.links.iter().map(ToString::to_string).collect();
        rows.sort();
        rows.dedup();
        rows
    }

    /// Derived Object Model elements with no inbound link, and classes that
    /// trace to no event. Empty when the trace is total.
    pub fn untraced(&self, om: &ObjectModel) -> Vec<String> {
        let derived: BTreeSet<String> = self.links.iter().map(|l| l.derived.to_string()).collect();
        let mut missing = Vec::new();
        let mut check = |d: DerivedRef| {
            let path = d.to_string();
            if !derived.contains(&path) {
                missing.push(path);
            }
        };
        for class in &om.classes {
            check(DerivedRef::Class(class.name.clone()));
            for attr in &class.attributes {
                check(DerivedRef::Attribute {
                    class: class.name.clone(),
                    name: attr.name.clone(),
                });
            }
            for svc in &class.services {
                check(DerivedRef::Service {
                    class: class.name.clone(),
                    name: svc.name.clone(),
                });
                for arg in &svc.arguments {
                    check(DerivedRef::Argument {
                        class: class.name.clone(),
                        service: svc.name.clone(),
                        name: arg.name.clone(),
                    });
                }
            }
        }
        for rel in &om.relationships {
            check(DerivedRef::Relationship(rel.key()));
        }
        for tx in &om.transactions {
            check(DerivedRef::Transaction {
                class: tx.owner_class.clone(),
                name: tx.name.clone(),
            });
        }
        for class in &om.classes {
            if self.events_of_class(&class.name).is_empty() {
                missing.push(format!("{} (no event)", class.name));
            }
        }
        missing
    }
}
