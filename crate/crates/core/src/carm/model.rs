//! Requirements-model types: business processes, communicative events and
//! their message structures.

use std::fmt;
use std::str::FromStr;

use crate::carm::condition::Condition;
use crate::diag::Loc;
use crate::naming;

pub const START: &str = "START";
pub const END: &str = "END";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventId(pub String);

impl EventId {
    pub fn new(id: impl Into<String>) -> Self {
        EventId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RequirementsModel {
    pub business_objects: Vec<BusinessObject>,
    pub processes: Vec<BusinessProcess>,
    pub annotations: AnnotationSet,
}

impl RequirementsModel {
    pub fn events(&self) -> impl Iterator<Item = &CommunicativeEvent> {
        self.processes.iter().flat_map(|p| p.events.iter())
    }

    pub fn event(&self, id: &EventId) -> Option<&CommunicativeEvent> {
        self.events().find(|e| &e.id == id)
    }

    pub fn process(&self, id: &str) -> Option<&BusinessProcess> {
        self.processes.iter().find(|p| p.id == id)
    }

    pub fn precedences(&self) -> impl Iterator<Item = &PrecedenceRelation> {
        self.processes.iter().flat_map(|p| p.precedences.iter())
    }

    pub fn business_object(&self, name: &str) -> Option<&BusinessObject> {
        let key = naming::match_key(name);
        self.business_objects
            .iter()
            .find(|o| naming::match_key(&o.name) == key)
    }

    /// Appends the contents of `other`; used to combine several input files.
    pub fn merge(&mut self, other: RequirementsModel) {
        for object in other.business_objects {
            if self.business_object(&object.name).is_none() {
                self.business_objects.push(object);
            }
        }
        self.processes.extend(other.processes);
        self.annotations.entries.extend(other.annotations.entries);
    }
}

/// A declared business object. `binding` optionally names the aggregation
/// (`EVENT/AGGREGATION`) whose class represents the object; without it the
/// object matches the class-creating aggregation with the same name.
#[derive(Debug, Clone, PartialEq)]
pub struct BusinessObject {
    pub name: String,
    pub binding: Option<String>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BusinessProcess {
    pub id: String,
    pub name: String,
    pub events: Vec<CommunicativeEvent>,
    pub precedences: Vec<PrecedenceRelation>,
    pub loc: Loc,
}

impl BusinessProcess {
    pub fn has_start_node(&self) -> bool {
        self.precedences.iter().any(|p| p.from == Endpoint::Start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Start,
    End,
    Event(EventId),
}

impl Endpoint {
    pub fn event(&self) -> Option<&EventId> {
        match self {
            Endpoint::Event(id) => Some(id),
            _ => None,
        }
    }

    pub fn parse(text: &str) -> Endpoint {
        match text {
            START => Endpoint::Start,
            END => Endpoint::End,
            other => Endpoint::Event(EventId::new(other)),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Start => f.write_str(START),
            Endpoint::End => f.write_str(END),
            Endpoint::Event(id) => write!(f, "{id}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MergeKind {
    Plain,
    OrMerge,
    AndJoin,
}

impl fmt::Display for MergeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MergeKind::Plain => "plain",
            MergeKind::OrMerge => "or",
            MergeKind::AndJoin => "and",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecedenceRelation {
    pub from: Endpoint,
    pub to: Endpoint,
    /// Composition of the target's incoming precedences.
    pub merge: MergeKind,
    pub loopback: bool,
    pub loc: Loc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProseKey {
    Goals,
    Description,
    Channel,
    Treatments,
    Linked,
}

impl ProseKey {
    pub const ALL: [ProseKey; 5] = [
        ProseKey::Goals,
        ProseKey::Description,
        ProseKey::Channel,
        ProseKey::Treatments,
        ProseKey::Linked,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ProseKey::Goals => "goals",
            ProseKey::Description => "description",
            ProseKey::Channel => "channel",
            ProseKey::Treatments => "treatments",
            ProseKey::Linked => "linked",
        }
    }
}

/// Template prose carried verbatim and never interpreted.
#[derive(Debug, Clone, PartialEq)]
pub struct Prose {
    pub key: ProseKey,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunicativeEvent {
    pub id: EventId,
    pub name: String,
    pub primary_actor: String,
    /// The support actor who enters the message into the system.
    pub interface_actor: String,
    pub prose: Vec<Prose>,
    pub message: Aggregation,
    pub restrictions: Vec<CardinalityRestriction>,
    pub identifier: Option<IdentifierRestriction>,
    pub variants: Vec<EventVariant>,
    pub loc: Loc,
}

impl CommunicativeEvent {
    pub fn linked_communications(&self) -> impl Iterator<Item = &str> {
        self.prose
            .iter()
            .filter(|p| p.key == ProseKey::Linked)
            .map(|p| p.text.as_str())
    }

    /// Aggregations of the message structure in pre-order.
    pub fn aggregations(&self) -> Vec<AggregationRef<'_>> {
        let mut out = Vec::new();
        let root_path = format!("{}/{}", self.id, self.message.name);
        collect_aggregations(&self.message, root_path, None, false, &mut out);
        out
    }

    /// Every field of the message structure with its path, in pre-order.
    pub fn fields(&self) -> Vec<(String, &Field)> {
        self.aggregations()
            .into_iter()
            .flat_map(|agg| {
                agg.agg
                    .fields()
                    .map(|f| (format!("{}/{}", agg.path, f.name), f))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn is_specialized(&self) -> bool {
        !self.variants.is_empty()
    }
}

/// An aggregation located in an event's message structure.
#[derive(Debug, Clone)]
pub struct AggregationRef<'a> {
    pub agg: &'a Aggregation,
    pub path: String,
    /// Index of the enclosing aggregation in the pre-order list.
    pub parent: Option<usize>,
    /// An iteration lies between this aggregation and its parent.
    pub via_iteration: bool,
}

fn collect_aggregations<'a>(
    agg: &'a Aggregation,
    path: String,
    parent: Option<usize>,
    via_iteration: bool,
    out: &mut Vec<AggregationRef<'a>>,
) {
    let index = out.len();
    out.push(AggregationRef {
        agg,
        path: path.clone(),
        parent,
        via_iteration,
    });
    for member in &agg.members {
        if let Member::Substructure(sub) = member {
            walk_substructure(sub, &path, index, false, out);
        }
    }
}

fn walk_substructure<'a>(
    sub: &'a Substructure,
    parent_path: &str,
    parent: usize,
    via_iteration: bool,
    out: &mut Vec<AggregationRef<'a>>,
) {
    match sub {
        Substructure::Aggregation(agg) => collect_aggregations(
            agg,
            format!("{parent_path}/{}", agg.name),
            Some(parent),
            via_iteration,
            out,
        ),
        Substructure::Iteration(it) => {
            let path = format!("{parent_path}/{}", it.name);
            walk_substructure(&it.body, &path, parent, true, out);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregation {
    pub name: String,
    pub members: Vec<Member>,
    pub loc: Loc,
}

impl Aggregation {
    pub fn new(name: impl Into<String>, members: Vec<Member>, loc: Loc) -> Self {
        Aggregation {
            name: name.into(),
            members,
            loc,
        }
    }

    pub fn fields(&self) -> impl Iterator<Item = &Field> {
        self.members.iter().filter_map(|m| match m {
            Member::Field(f) => Some(f),
            Member::Substructure(_) => None,
        })
    }

    pub fn data_fields(&self) -> impl Iterator<Item = (&Field, BasicDomain)> {
        self.fields().filter_map(|f| match &f.kind {
            FieldKind::Data(domain) => Some((f, *domain)),
            FieldKind::Reference { .. } => None,
        })
    }

    pub fn reference_fields(&self) -> impl Iterator<Item = &Field> {
        self.fields().filter(|f| f.is_reference())
    }

    /// Reference fields marked as extending a business object.
    pub fn marked_fields(&self) -> impl Iterator<Item = &Field> {
        self.fields().filter(|f| f.extends())
    }

    pub fn member_name(member: &Member) -> &str {
        match member {
            Member::Field(f) => &f.name,
            Member::Substructure(Substructure::Aggregation(a)) => &a.name,
            Member::Substructure(Substructure::Iteration(i)) => &i.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Member {
    Field(Field),
    Substructure(Substructure),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Substructure {
    Aggregation(Aggregation),
    Iteration(Iteration),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Iteration {
    pub name: String,
    pub body: Box<Substructure>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub name: String,
    pub op: OpCode,
    pub kind: FieldKind,
    pub example: String,
    pub loc: Loc,
}

impl Field {
    pub fn is_reference(&self) -> bool {
        matches!(self.kind, FieldKind::Reference { .. })
    }

    pub fn extends(&self) -> bool {
        matches!(self.kind, FieldKind::Reference { extends: true, .. })
    }

    pub fn referenced_object(&self) -> Option<&str> {
        match &self.kind {
            FieldKind::Reference { object, .. } => Some(object),
            FieldKind::Data(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    Data(BasicDomain),
    Reference { object: String, extends: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasicDomain {
    Number,
    Text,
    Date,
    Time,
    Money,
}

impl BasicDomain {
    pub const ALL: [BasicDomain; 5] = [
        BasicDomain::Number,
        BasicDomain::Text,
        BasicDomain::Date,
        BasicDomain::Time,
        BasicDomain::Money,
    ];

    pub fn parse(text: &str) -> Option<BasicDomain> {
        match text.trim().to_lowercase().as_str() {
            "number" => Some(BasicDomain::Number),
            "text" => Some(BasicDomain::Text),
            "date" => Some(BasicDomain::Date),
            "time" => Some(BasicDomain::Time),
            "money" => Some(BasicDomain::Money),
            _ => None,
        }
    }
}

impl fmt::Display for BasicDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasicDomain::Number => "number",
            BasicDomain::Text => "text",
            BasicDomain::Date => "date",
            BasicDomain::Time => "time",
            BasicDomain::Money => "money",
        })
    }
}

/// The OP column of a message structure: `g` (generated), `i` (input) or blank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpCode {
    Generated,
    Input,
    Blank,
    Other(String),
}

impl OpCode {
    pub fn parse(text: &str) -> OpCode {
        match text.trim() {
            "" => OpCode::Blank,
            "g" => OpCode::Generated,
            "i" => OpCode::Input,
            other => OpCode::Other(other.to_string()),
        }
    }
}

impl fmt::Display for OpCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpCode::Generated => f.write_str("g"),
            OpCode::Input => f.write_str("i"),
            OpCode::Blank => Ok(()),
            OpCode::Other(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Max {
    One,
    Many,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cardinality {
    pub min: u8,
    pub max: Max,
}

impl Cardinality {
    pub const ZERO_ONE: Cardinality = Cardinality { min: 0, max: Max::One };
    pub const ONE_ONE: Cardinality = Cardinality { min: 1, max: Max::One };
    pub const ZERO_MANY: Cardinality = Cardinality { min: 0, max: Max::Many };
    pub const ONE_MANY: Cardinality = Cardinality { min: 1, max: Max::Many };

    pub fn new(min: u8, max: Max) -> Self {
        Cardinality { min, max }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let max = match self.max {
            Max::One => "1",
            Max::Many => "M",
        };
        write!(f, "{}:{}", self.min, max)
    }
}

impl FromStr for Cardinality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (min, max) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| format!("cardinality `{s}` is not of the form min:max"))?;
        let min = match min.trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(format!("minimum cardinality must be 0 or 1, found `{other}`")),
        };
        let max = match max.trim() {
            "1" => Max::One,
            "M" | "m" | "N" | "*" => Max::Many,
            "0" => return Err("maximum cardinality cannot be below the minimum".into()),
            other => return Err(format!("maximum cardinality must be 1 or M, found `{other}`")),
        };
        Ok(Cardinality { min, max })
    }
}

/// A structural restriction formalized as cardinalities. The subject is a
/// reference field or a nested aggregation; `referenced_side` constrains the
/// subject's class, `referrer_side` the containing aggregation's class.
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityRestriction {
    pub subject: String,
    pub referenced_side: Cardinality,
    pub referrer_side: Option<Cardinality>,
    pub text: Option<String>,
    pub loc: Loc,
}

/// Contextual restriction naming the fields that identify a business object.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentifierRestriction {
    pub fields: Vec<String>,
    pub text: Option<String>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventVariant {
    pub id: String,
    pub condition: Condition,
    pub loc: Loc,
}

/// Analyst decisions that the requirements model leaves open, keyed by the
/// path of the requirements element they apply to.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationSet {
    pub entries: Vec<Annotation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnnotationTarget {
    /// An aggregation path: class name, identifier, service names.
    Class,
    /// A field path: attribute properties.
    Field,
    /// A reference field or nested aggregation path: cardinalities.
    Relationship,
    /// An event id: end-of-editing service name.
    Event,
}

impl AnnotationTarget {
    pub fn keyword(self) -> &'static str {
        match self {
            AnnotationTarget::Class => "class",
            AnnotationTarget::Field => "field",
            AnnotationTarget::Relationship => "relationship",
            AnnotationTarget::Event => "event",
        }
    }

    pub fn parse(word: &str) -> Option<Self> {
        match word {
            "class" => Some(AnnotationTarget::Class),
            "field" => Some(AnnotationTarget::Field),
            "relationship" => Some(AnnotationTarget::Relationship),
            "event" => Some(AnnotationTarget::Event),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub target: AnnotationTarget,
    pub path: String,
    pub settings: Vec<Setting>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub key: String,
    pub value: String,
    pub loc: Loc,
}
