//! Incremental view integration: each event, in sorted order, contributes a
//! class-diagram view that is merged into the Object Model.

use crate::carm::annotations::{identifier_fields, parse_bool, parse_size, AnnotationIndex};
use crate::carm::model::*;
use crate::carm::validate::subject_matches_nesting;
use crate::diag::{Diagnostic, Loc};
use crate::naming;
use crate::om::model::*;
use crate::trace::{DerivedRef, SourceRef, TraceMap};

/// Size given to String attributes whose size no annotation decides.
pub const DEFAULT_STRING_SIZE: u32 = 100;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeriveOptions {
    /// Analyst-decision fallbacks become errors instead of warnings.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub object_model: ObjectModel,
    pub trace: TraceMap,
    /// Warnings about applied defaults and overridden annotations.
    pub diagnostics: Vec<Diagnostic>,
}

/// Folds [`derive_event_view`] over `order`, starting from an empty Object
/// Model. On failure returns the diagnostics gathered so far, including the
/// error that stopped the derivation.
pub fn derive_object_model(
    model: &RequirementsModel,
    order: &[EventId],
    options: DeriveOptions,
) -> Result<Derivation, Vec<Diagnostic>> {
    let mut deriver = Deriver::new(model, options);
    for id in order {
        let Some(event) = model.event(id) else {
            deriver.diags.push(Diagnostic::error(
                Loc::synthetic(),
                "OM3",
                format!("ordered event `{id}` is not in the model"),
            ));
            return Err(deriver.diags);
        };
        if let Err(mut err) = deriver.event_view(event) {
            err.message = format!("in event `{id}`: {}", err.message);
            deriver.diags.push(err);
        }
        if deriver.diags.iter().any(Diagnostic::is_error) {
            return Err(deriver.diags);
        }
    }
    Ok(Derivation {
        object_model: deriver.om,
        trace: deriver.trace,
        diagnostics: deriver.diags,
    })
}

/// Integrates the view of a single event into `om` and `trace`.
pub fn derive_event_view(
    model: &RequirementsModel,
    event: &CommunicativeEvent,
    om: ObjectModel,
    trace: TraceMap,
    options: DeriveOptions,
) -> Result<(ObjectModel, TraceMap, Vec<Diagnostic>), Vec<Diagnostic>> {
    let mut deriver = Deriver::new(model, options);
    deriver.om = om;
    deriver.trace = trace;
    if let Err(mut err) = deriver.event_view(event) {
        err.message = format!("in event `{}`: {}", event.id, err.message);
        deriver.diags.push(err);
    }
    if deriver.diags.iter().any(Diagnostic::is_error) {
        return Err(deriver.diags);
    }
    Ok((deriver.om, deriver.trace, deriver.diags))
}

/// The data type and size chosen for an attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeChoice {
    pub data_type: DataType,
    pub size: Option<u32>,
    /// No size was given for a String, so the default size was used.
    pub default_size: bool,
}

/// Data types a field domain converts to. Bool, Image and Blob correspond to
/// no domain and are accepted for any of them.
pub fn conversions(domain: BasicDomain) -> &'static [DataType] {
    match domain {
        BasicDomain::Number => &[DataType::Nat, DataType::Int, DataType::Real, DataType::Autonumeric],
        BasicDomain::Text => &[DataType::String, DataType::Text],
        BasicDomain::Date | BasicDomain::Time => &[DataType::Time, DataType::Date, DataType::DateTime],
        BasicDomain::Money => &[DataType::Real],
    }
}

/// Chooses the data type of an attribute: the annotated type when it is a
/// legal conversion of the domain, else the recommended one (number: Real,
/// or Autonumeric for a generated constant; text: String; date and time:
/// DateTime; money: Real).
pub fn map_data_type(
    domain: BasicDomain,
    op: &OpCode,
    attr_type: AttrType,
    annotated: Option<DataType>,
    annotated_size: Option<u32>,
) -> Result<TypeChoice, String> {
    let data_type = match annotated {
        Some(t) if conversions(domain).contains(&t)
            || matches!(t, DataType::Bool | DataType::Image | DataType::Blob) =>
        {
            t
        }
        Some(t) => {
            return Err(format!(
                "data type {t} is not a conversion of domain `{domain}` (expected one of {})",
                conversions(domain).iter().map(|t| t.name()).collect::<Vec<_>>().join(", ")
            ))
        }
        None => match domain {
            BasicDomain::Number if *op == OpCode::Generated && attr_type == AttrType::Constant => {
                DataType::Autonumeric
            }
            BasicDomain::Number | BasicDomain::Money => DataType::Real,
            BasicDomain::Text => DataType::String,
            BasicDomain::Date | BasicDomain::Time => DataType::DateTime,
        },
    };
    if data_type == DataType::Autonumeric && attr_type != AttrType::Constant {
        return Err("Autonumeric attributes must be constant".into());
    }
    if data_type == DataType::String {
        Ok(TypeChoice {
            data_type,
            size: Some(annotated_size.unwrap_or(DEFAULT_STRING_SIZE)),
            default_size: annotated_size.is_none(),
        })
    } else {
        Ok(TypeChoice {
            data_type,
            size: None,
            default_size: false,
        })
    }
}

type Step<T> = Result<T, Diagnostic>;

struct Deriver<'m> {
    model: &'m RequirementsModel,
    ann: AnnotationIndex<'m>,
    options: DeriveOptions,
    om: ObjectModel,
    trace: TraceMap,
    diags: Vec<Diagnostic>,
}

/// Cardinalities of one relationship and whether any came from the model
/// or an annotation.
struct Sides {
    referrer: Cardinality,
    referenced: Cardinality,
    informed: bool,
}

impl<'m> Deriver<'m> {
    fn new(model: &'m RequirementsModel, options: DeriveOptions) -> Self {
        Deriver {
            model,
            ann: AnnotationIndex::new(model),
            options,
            om: ObjectModel::default(),
            trace: TraceMap::new(),
            diags: Vec::new(),
        }
    }

    /// Records an analyst-decision fallback: a warning, or an error in strict mode.
    fn fallback(&mut self, loc: &Loc, code: &str, message: String) {
        let diag = if self.options.strict {
            Diagnostic::error(loc.clone(), code, message)
        } else {
            Diagnostic::warning(loc.clone(), code, message)
        };
        self.diags.push(diag);
    }

    fn warn(&mut self, loc: &Loc, code: &str, message: String) {
        self.diags.push(Diagnostic::warning(loc.clone(), code, message));
    }

    fn event_view(&mut self, event: &'m CommunicativeEvent) -> Step<()> {
        let aggs = event.aggregations();
        let mut agg_classes: Vec<String> = Vec::with_capacity(aggs.len());
        for (i, agg) in aggs.iter().enumerate() {
            let class = if agg.agg.marked_fields().next().is_some() {
                self.extend_class_view(event, agg)?
            } else {
                self.create_class_view(event, &aggs, i, &agg_classes)?
            };
            agg_classes.push(class);
        }
        let mut distinct = agg_classes.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() > 1 {
            self.end_of_editing(event, &agg_classes[0]);
        }
        Ok(())
    }

    fn event_source(event: &CommunicativeEvent) -> SourceRef {
        SourceRef::Event(event.id.clone())
    }

    fn agents(event: &CommunicativeEvent) -> Vec<String> {
        vec![naming::agent_name(&event.interface_actor)]
    }

    fn self_argument(class: &str) -> Argument {
        Argument::object(format!("p_this{}", naming::camel(class)), class, false)
    }

    fn class_mut(&mut self, name: &str) -> &mut Class {
        self.om.class_mut(name).expect("class was derived earlier")
    }

    /// Class derived for a business object: through the object's binding, or
    /// else through the earliest class-creating aggregation with its name.
    fn class_for_object(&self, object: &str) -> Option<String> {
        let key = naming::match_key(object);
        if let Some(path) = self
            .model
            .business_object(object)
            .and_then(|b| b.binding.as_deref())
        {
            let wanted = crate::carm::annotations::normalize_path(path);
            return self.trace.links().iter().find_map(|l| match (&l.source, &l.derived) {
                (SourceRef::Aggregation(p), DerivedRef::Class(c))
                    if l.rule == "OM5" && crate::carm::annotations::normalize_path(p) == wanted =>
                {
                    Some(c.clone())
                }
                _ => None,
            });
        }
        self.trace.links().iter().find_map(|l| match (&l.source, &l.derived) {
            (SourceRef::Aggregation(p), DerivedRef::Class(c))
                if l.rule == "OM5"
                    && p.rsplit('/').next().is_some_and(|n| naming::match_key(n) == key) =>
            {
                Some(c.clone())
            }
            _ => None,
        })
    }

    fn unique_class_name(&mut self, base: &str, loc: &Loc) -> String {
        let name = naming::uniquify(base, |n| self.om.class(n).is_some());
        if name != base {
            self.warn(loc, "NAME_COLLISION", format!("class `{base}` already exists; named `{name}`"));
        }
        name
    }

    fn unique_attribute_name(&mut self, class: &str, base: &str, loc: &Loc) -> String {
        let existing = self.om.class(class).expect("class exists");
        let name = naming::uniquify(base, |n| existing.attribute(n).is_some());
        if name != base {
            self.warn(
                loc,
                "NAME_COLLISION",
                format!("attribute `{class}.{base}` already exists; named `{name}`"),
            );
        }
        name
    }

    fn unique_member_name(&mut self, classes: &[&str], base: &str, loc: &Loc) -> String {
        let name = naming::uniquify(base, |n| classes.iter().any(|c| self.om.member_name_taken(c, n)));
        if name != base {
            self.warn(
                loc,
                "NAME_COLLISION",
                format!("service `{base}` already exists in `{}`; named `{name}`", classes.join("`, `")),
            );
        }
        name
    }

    fn annotation<T>(
        &mut self,
        target: AnnotationTarget,
        path: &str,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Step<Option<T>> {
        match self.ann.get(target, path, key) {
            None => Ok(None),
            Some(setting) => parse(&setting.value)
                .map(Some)
                .map_err(|e| Diagnostic::error(setting.loc.clone(), "ANNOTATION", e)),
        }
    }

    fn name_annotation(&self, target: AnnotationTarget, path: &str, key: &str) -> Option<String> {
        self.ann.value(target, path, key).map(|v| v.trim().to_string())
    }

    fn restriction_for(
        event: &CommunicativeEvent,
        matches: impl Fn(&str) -> bool,
    ) -> Option<&CardinalityRestriction> {
        event.restrictions.iter().find(|r| matches(&r.subject))
    }

    /// Resolves the two cardinalities of a relationship from the template
    /// restriction, then annotations, then the given defaults.
    fn sides(
        &mut self,
        restriction: Option<&CardinalityRestriction>,
        path: &str,
        default_referenced: Cardinality,
        default_referrer: Cardinality,
    ) -> Step<Sides> {
        let ann_referenced = self.annotation(AnnotationTarget::Relationship, path, "referenced", |v| v.parse())?;
        let ann_referrer = self.annotation(AnnotationTarget::Relationship, path, "referrer", |v| v.parse())?;
        let referenced = restriction.map(|r| r.referenced_side).or(ann_referenced);
        let referrer = restriction.and_then(|r| r.referrer_side).or(ann_referrer);
        Ok(Sides {
            informed: referenced.is_some() || referrer.is_some(),
            referenced: referenced.unwrap_or(default_referenced),
            referrer: referrer.unwrap_or(default_referrer),
        })
    }

    fn create_class_view(
        &mut self,
        event: &'m CommunicativeEvent,
        aggs: &[AggregationRef<'m>],
        index: usize,
        agg_classes: &[String],
    ) -> Step<String> {
        let agg = &aggs[index];
        let path = agg.path.as_str();
        let loc = &agg.agg.loc;

        // OM4, OM5
        let base = self
            .name_annotation(AnnotationTarget::Class, path, "name")
            .unwrap_or_else(|| naming::class_name(&agg.agg.name));
        let class = self.unique_class_name(&base, loc);
        self.om.classes.push(Class::new(&class));
        self.trace.add("OM4", Self::event_source(event), DerivedRef::Class(class.clone()));
        self.trace.add("OM5", SourceRef::Aggregation(path.to_string()), DerivedRef::Class(class.clone()));

        // OM8: the template's identifier restriction applies to the first
        // aggregation holding all its fields.
        let data: Vec<(&Field, BasicDomain)> = agg.agg.data_fields().collect();
        let holds = |a: &AggregationRef, fields: &[String]| {
            fields.iter().all(|f| {
                a.agg
                    .data_fields()
                    .any(|(d, _)| naming::match_key(&d.name) == naming::match_key(f))
            })
        };
        let restriction_here = event.identifier.as_ref().filter(|ident| {
            aggs.iter().position(|a| holds(a, &ident.fields)) == Some(index)
        });
        let id_keys: Option<Vec<String>> = match restriction_here {
            Some(ident) => Some(ident.fields.iter().map(|f| naming::match_key(f)).collect()),
            None => self
                .ann
                .value(AnnotationTarget::Class, path, "identifier")
                .map(|v| identifier_fields(v).into_iter().map(naming::match_key).collect()),
        };
        if let Some(keys) = &id_keys {
            if let Some(missing) = keys
                .iter()
                .find(|k| !data.iter().any(|(f, _)| &naming::match_key(&f.name) == *k))
            {
                return Err(Diagnostic::error(
                    loc.clone(),
                    "OM8",
                    format!("identifier field `{missing}` is not a data field of `{}`", agg.agg.name),
                ));
            }
        } else {
            let id_name = format!("{}_id", class.to_lowercase());
            self.fallback(
                loc,
                "OM8",
                format!("no identifier for class `{class}`; added Autonumeric attribute `{id_name}`"),
            );
            self.class_mut(&class).attributes.push(Attribute {
                name: id_name.clone(),
                id: true,
                attr_type: AttrType::Constant,
                data_type: DataType::Autonumeric,
                size: None,
                requested: true,
                null_allowed: false,
            });
            self.trace.add(
                "OM8",
                SourceRef::Aggregation(path.to_string()),
                DerivedRef::Attribute {
                    class: class.clone(),
                    name: id_name,
                },
            );
        }

        // OM6, OM7, OM9-OM12
        let mut field_attrs: Vec<(&Field, Attribute)> = Vec::new();
        for (field, domain) in data {
            let field_path = format!("{path}/{}", field.name);
            let base = self
                .name_annotation(AnnotationTarget::Field, &field_path, "name")
                .unwrap_or_else(|| naming::attribute_name(&field.name));
            let name = self.unique_attribute_name(&class, &base, &field.loc);
            let id = id_keys
                .as_ref()
                .is_some_and(|keys| keys.contains(&naming::match_key(&field.name)));
            let attr_type = self
                .annotation(AnnotationTarget::Field, &field_path, "type", |v| v.parse::<AttrType>())?
                .unwrap_or(if id { AttrType::Constant } else { AttrType::Variable });
            if id && attr_type != AttrType::Constant {
                return Err(Diagnostic::error(
                    field.loc.clone(),
                    "OM9",
                    format!("identifier attribute `{name}` must be constant"),
                ));
            }
            let null_allowed = self
                .annotation(AnnotationTarget::Field, &field_path, "null", parse_bool)?
                .unwrap_or(!id);
            if id && null_allowed {
                return Err(Diagnostic::error(
                    field.loc.clone(),
                    "OM12",
                    format!("identifier attribute `{name}` cannot allow nulls"),
                ));
            }
            let choice = self.data_type(field, &field_path, domain, attr_type)?;
            let attr = Attribute {
                name: name.clone(),
                id,
                attr_type,
                data_type: choice.data_type,
                size: choice.size,
                requested: true,
                null_allowed,
            };
            self.class_mut(&class).attributes.push(attr.clone());
            self.trace.add(
                "OM6",
                SourceRef::Field(field_path),
                DerivedRef::Attribute {
                    class: class.clone(),
                    name,
                },
            );
            field_attrs.push((field, attr));
        }

        // OM13-OM15
        if let Some(parent) = agg.parent {
            let parent_class = agg_classes[parent].clone();
            let restriction = Self::restriction_for(event, |s| {
                subject_matches_nesting(path, agg.agg, &naming::match_key(s))
            });
            let nested_max = if agg.via_iteration { Max::Many } else { Max::One };
            let default_min = if agg.via_iteration { 0 } else { 1 };
            let mut sides = self.sides(
                restriction,
                path,
                Cardinality::new(default_min, nested_max),
                Cardinality::ONE_ONE,
            )?;
            if sides.referenced.max != nested_max {
                self.warn(
                    loc,
                    "OM14",
                    format!(
                        "maximum cardinality on the side of `{class}` is fixed to {} by the message structure",
                        if nested_max == Max::Many { "M" } else { "1" }
                    ),
                );
                sides.referenced.max = nested_max;
            }
            if !sides.informed {
                self.fallback(
                    loc,
                    "OM15",
                    format!(
                        "no restriction on `{parent_class}`-`{class}`; using {} --- {}",
                        sides.referrer, sides.referenced
                    ),
                );
            }
            let rel = Relationship {
                class_a: parent_class,
                card_a: sides.referrer,
                card_b: sides.referenced,
                class_b: class.clone(),
                origin: Origin::Nesting,
                role: agg.agg.name.clone(),
            };
            self.trace.add(
                "OM13",
                SourceRef::Aggregation(path.to_string()),
                DerivedRef::Relationship(rel.key()),
            );
            self.om.relationships.push(rel);
        }

        // OM16, OM17
        let mut references: Vec<(&Field, String, Cardinality)> = Vec::new();
        for field in agg.agg.reference_fields() {
            let field_path = format!("{path}/{}", field.name);
            let object = field.referenced_object().expect("reference field");
            let target = self.class_for_object(object).ok_or_else(|| {
                Diagnostic::error(
                    field.loc.clone(),
                    "OM16",
                    format!(
                        "no class has been derived for business object `{object}` yet; the requirements model is incomplete (missing event or precedence)"
                    ),
                )
            })?;
            let key = naming::match_key(&field.name);
            let restriction = Self::restriction_for(event, |s| naming::match_key(s) == key);
            let mut sides = self.sides(restriction, &field_path, Cardinality::ONE_ONE, Cardinality::ZERO_MANY)?;
            if sides.referenced.max != Max::One {
                self.warn(
                    &field.loc,
                    "OM17",
                    format!("maximum cardinality on the side of `{target}` is fixed to 1 for reference field `{}`", field.name),
                );
                sides.referenced.max = Max::One;
            }
            if !sides.informed {
                self.fallback(
                    &field.loc,
                    "OM15",
                    format!(
                        "no restriction on `{class}`-`{target}`; using {} --- {}",
                        sides.referrer, sides.referenced
                    ),
                );
            }
            let rel = Relationship {
                class_a: class.clone(),
                card_a: sides.referrer,
                card_b: sides.referenced,
                class_b: target.clone(),
                origin: Origin::Reference,
                role: field.name.clone(),
            };
            self.trace.add("OM16", SourceRef::Field(field_path), DerivedRef::Relationship(rel.key()));
            self.om.relationships.push(rel);
            references.push((field, target, sides.referenced));
        }

        // OM18-OM20
        let base = self
            .name_annotation(AnnotationTarget::Class, path, "creation")
            .unwrap_or_else(|| format!("new_{}", class.to_lowercase()));
        let service = self.unique_member_name(&[&class], &base, loc);
        let mut arguments = Vec::new();
        for (field, attr) in &field_attrs {
            let arg = Argument::data(format!("p_atr{}", attr.name), attr);
            self.trace.add(
                "OM19",
                SourceRef::Field(format!("{path}/{}", field.name)),
                DerivedRef::Argument {
                    class: class.clone(),
                    service: service.clone(),
                    name: arg.name.clone(),
                },
            );
            arguments.push(arg);
        }
        for (field, target, referenced) in &references {
            let arg = Argument::object(
                format!("p_agr{}", naming::camel(&field.name)),
                target.clone(),
                referenced.min == 0,
            );
            self.trace.add(
                "OM20",
                SourceRef::Field(format!("{path}/{}", field.name)),
                DerivedRef::Argument {
                    class: class.clone(),
                    service: service.clone(),
                    name: arg.name.clone(),
                },
            );
            arguments.push(arg);
        }
        self.class_mut(&class).services.push(Service {
            name: service.clone(),
            kind: ServiceKind::Creation,
            arguments,
            agents: Self::agents(event),
            shared_with: None,
        });
        self.trace.add(
            "OM18",
            Self::event_source(event),
            DerivedRef::Service {
                class: class.clone(),
                name: service,
            },
        );
        Ok(class)
    }

    fn data_type(
        &mut self,
        field: &Field,
        field_path: &str,
        domain: BasicDomain,
        attr_type: AttrType,
    ) -> Step<TypeChoice> {
        let annotated = self.annotation(AnnotationTarget::Field, field_path, "datatype", |v| v.parse::<DataType>())?;
        let size = self.annotation(AnnotationTarget::Field, field_path, "size", parse_size)?;
        let choice = map_data_type(domain, &field.op, attr_type, annotated, size)
            .map_err(|e| Diagnostic::error(field.loc.clone(), "OM10", format!("field `{}`: {e}", field.name)))?;
        if choice.default_size {
            self.fallback(
                &field.loc,
                "OM10",
                format!(
                    "no size for String field `{}`; using {DEFAULT_STRING_SIZE}",
                    field.name
                ),
            );
        }
        if size.is_some() && choice.data_type != DataType::String {
            self.warn(
                &field.loc,
                "OM10",
                format!("size of field `{}` ignored: {} takes no size", field.name, choice.data_type),
            );
        }
        Ok(choice)
    }

    fn extend_class_view(&mut self, event: &'m CommunicativeEvent, agg: &AggregationRef<'m>) -> Step<String> {
        let path = agg.path.as_str();
        let marked: Vec<&Field> = agg.agg.marked_fields().collect();
        if marked.len() > 1 {
            return Err(Diagnostic::error(
                marked[1].loc.clone(),
                "OM2",
                format!("aggregation `{}` marks more than one reference field", agg.agg.name),
            ));
        }
        let object = marked[0].referenced_object().expect("marked reference");
        let class = self.class_for_object(object).ok_or_else(|| {
            Diagnostic::error(
                marked[0].loc.clone(),
                "OM23",
                format!(
                    "business object `{object}` has no class derived by a precedent event; the precedences or the event order are invalid"
                ),
            )
        })?;
        self.trace.add("OM23", Self::event_source(event), DerivedRef::Class(class.clone()));
        self.trace.add("OM23", SourceRef::Aggregation(path.to_string()), DerivedRef::Class(class.clone()));

        // OM24
        let mut added: Vec<(&Field, Attribute)> = Vec::new();
        for (field, domain) in agg.agg.data_fields() {
            let field_path = format!("{path}/{}", field.name);
            let base = self
                .name_annotation(AnnotationTarget::Field, &field_path, "name")
                .unwrap_or_else(|| naming::attribute_name(&field.name));
            let name = self.unique_attribute_name(&class, &base, &field.loc);
            for key in ["type", "null"] {
                if let Some(setting) = self.ann.get(AnnotationTarget::Field, &field_path, key) {
                    self.warn(
                        &setting.loc,
                        "OM24",
                        format!("`{key}` of `{name}` is fixed for attributes added by extension; annotation ignored"),
                    );
                }
            }
            let choice = self.data_type(field, &field_path, domain, AttrType::Variable)?;
            let attr = Attribute {
                name: name.clone(),
                id: false,
                attr_type: AttrType::Variable,
                data_type: choice.data_type,
                size: choice.size,
                requested: false,
                null_allowed: true,
            };
            self.class_mut(&class).attributes.push(attr.clone());
            self.trace.add(
                "OM24",
                SourceRef::Field(field_path),
                DerivedRef::Attribute {
                    class: class.clone(),
                    name,
                },
            );
            added.push((field, attr));
        }

        // OM23 steps 4-5
        let mut links: Vec<(&Field, String)> = Vec::new();
        for field in agg.agg.reference_fields().filter(|f| !f.extends()) {
            let field_path = format!("{path}/{}", field.name);
            let object = field.referenced_object().expect("reference field");
            let target = self.class_for_object(object).ok_or_else(|| {
                Diagnostic::error(
                    field.loc.clone(),
                    "OM16",
                    format!(
                        "no class has been derived for business object `{object}` yet; the requirements model is incomplete (missing event or precedence)"
                    ),
                )
            })?;
            let key = naming::match_key(&field.name);
            let restriction = Self::restriction_for(event, |s| naming::match_key(s) == key);
            let mut sides = self.sides(restriction, &field_path, Cardinality::ZERO_ONE, Cardinality::ZERO_MANY)?;
            if sides.referenced != Cardinality::ZERO_ONE {
                self.warn(
                    &field.loc,
                    "OM23",
                    format!(
                        "cardinality on the side of `{target}` is fixed to 0:1 for links added by extension (declared {})",
                        sides.referenced
                    ),
                );
                sides.referenced = Cardinality::ZERO_ONE;
            }
            if !sides.informed {
                self.fallback(
                    &field.loc,
                    "OM15",
                    format!(
                        "no restriction on `{class}`-`{target}`; using {} --- {}",
                        sides.referrer, sides.referenced
                    ),
                );
            }
            let rel = Relationship {
                class_a: class.clone(),
                card_a: sides.referrer,
                card_b: sides.referenced,
                class_b: target.clone(),
                origin: Origin::Extension,
                role: field.name.clone(),
            };
            self.trace.add("OM23", SourceRef::Field(field_path), DerivedRef::Relationship(rel.key()));
            self.om.relationships.push(rel);
            links.push((field, target));
        }

        // OM25
        let mut components = Vec::new();
        if !added.is_empty() {
            let annotated = self.name_annotation(AnnotationTarget::Class, path, "edit");
            let base = match (annotated, added.as_slice()) {
                (Some(name), _) => name,
                (None, [(_, attr)]) => format!("set_{}", attr.name),
                (None, _) => {
                    let name = format!("edit_{}", naming::event_tag(event.id.as_str()).to_lowercase());
                    self.fallback(
                        &agg.agg.loc,
                        "OM25",
                        format!("no name for the edit service of `{class}`; using `{name}`"),
                    );
                    name
                }
            };
            let service = self.unique_member_name(&[&class], &base, &agg.agg.loc);
            let mut arguments = vec![Self::self_argument(&class)];
            self.trace.add(
                "OM22",
                Self::event_source(event),
                DerivedRef::Argument {
                    class: class.clone(),
                    service: service.clone(),
                    name: arguments[0].name.clone(),
                },
            );
            for (field, attr) in &added {
                let arg = Argument::data(format!("p_atr{}", attr.name), attr);
                self.trace.add(
                    "OM25",
                    SourceRef::Field(format!("{path}/{}", field.name)),
                    DerivedRef::Argument {
                        class: class.clone(),
                        service: service.clone(),
                        name: arg.name.clone(),
                    },
                );
                arguments.push(arg);
            }
            self.class_mut(&class).services.push(Service {
                name: service.clone(),
                kind: ServiceKind::Edit,
                arguments,
                agents: Self::agents(event),
                shared_with: None,
            });
            self.trace.add(
                "OM25",
                Self::event_source(event),
                DerivedRef::Service {
                    class: class.clone(),
                    name: service.clone(),
                },
            );
            components.push(service);
        }
        for (field, target) in &links {
            let field_path = format!("{path}/{}", field.name);
            let suffix = target.to_lowercase();
            for (kind, prefix) in [(ServiceKind::SharedInsert, "ins"), (ServiceKind::SharedDelete, "del")] {
                let name = self.unique_member_name(&[&class, target], &format!("{prefix}_{suffix}"), &field.loc);
                let mut ends = vec![(class.clone(), target.clone(), naming::camel(&field.name))];
                if target != &class {
                    ends.push((target.clone(), class.clone(), naming::camel(&class)));
                }
                for (owner, other, role) in ends {
                    let arguments = vec![
                        Self::self_argument(&owner),
                        Argument::object(format!("p_agr{role}"), other.clone(), false),
                    ];
                    self.trace.add(
                        "OM22",
                        Self::event_source(event),
                        DerivedRef::Argument {
                            class: owner.clone(),
                            service: name.clone(),
                            name: arguments[0].name.clone(),
                        },
                    );
                    self.trace.add(
                        "OM25",
                        SourceRef::Field(field_path.clone()),
                        DerivedRef::Argument {
                            class: owner.clone(),
                            service: name.clone(),
                            name: arguments[1].name.clone(),
                        },
                    );
                    self.trace.add(
                        "OM25",
                        SourceRef::Field(field_path.clone()),
                        DerivedRef::Service {
                            class: owner.clone(),
                            name: name.clone(),
                        },
                    );
                    self.class_mut(&owner).services.push(Service {
                        name: name.clone(),
                        kind,
                        arguments,
                        agents: Self::agents(event),
                        shared_with: Some(other),
                    });
                }
                self.trace.add(
                    "OM25",
                    Self::event_source(event),
                    DerivedRef::Service {
                        class: class.clone(),
                        name: name.clone(),
                    },
                );
                if kind == ServiceKind::SharedInsert {
                    components.push(name);
                }
            }
        }

        // OM26
        if components.len() >= 2 {
            let base = match self.name_annotation(AnnotationTarget::Class, path, "transaction") {
                Some(name) => name,
                None => {
                    let name = default_event_service_name(event);
                    self.fallback(
                        &agg.agg.loc,
                        "OM26",
                        format!("no name for the transaction of `{class}`; using `{name}`"),
                    );
                    name
                }
            };
            let name = self.unique_member_name(&[&class], &base, &agg.agg.loc);
            self.trace.add(
                "OM26",
                Self::event_source(event),
                DerivedRef::Transaction {
                    class: class.clone(),
                    name: name.clone(),
                },
            );
            self.om.transactions.push(Transaction {
                name,
                owner_class: class.clone(),
                components,
            });
        }
        Ok(class)
    }

    /// OM21 and OM22 for complex business objects.
    fn end_of_editing(&mut self, event: &CommunicativeEvent, class: &str) {
        let base = match self.name_annotation(AnnotationTarget::Event, event.id.as_str(), "end_of_editing") {
            Some(name) => name,
            None => {
                let name = default_event_service_name(event);
                self.fallback(
                    &event.loc,
                    "OM21",
                    format!("no name for the end-of-editing service of `{class}`; using `{name}`"),
                );
                name
            }
        };
        let name = self.unique_member_name(&[class], &base, &event.loc);
        let this = Self::self_argument(class);
        self.trace.add(
            "OM22",
            Self::event_source(event),
            DerivedRef::Argument {
                class: class.to_string(),
                service: name.clone(),
                name: this.name.clone(),
            },
        );
        self.trace.add(
            "OM21",
            Self::event_source(event),
            DerivedRef::Service {
                class: class.to_string(),
                name: name.clone(),
            },
        );
        self.class_mut(class).services.push(Service {
            name,
            kind: ServiceKind::EndOfEditing,
            arguments: vec![this],
            agents: Self::agents(event),
            shared_with: None,
        });
    }
}

/// `<EventTag>_<event name>`, e.g. `Treat1_a_doctor_prescribes_a_medical_treatment`.
pub fn default_event_service_name(event: &CommunicativeEvent) -> String {
    format!("{}_{}", naming::event_tag(event.id.as_str()), naming::snake(&event.name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table5_defaults() {
        let g = OpCode::Generated;
        let i = OpCode::Input;
        let pick = |d, op: &OpCode, t| map_data_type(d, op, t, None, None).unwrap();
        assert_eq!(pick(BasicDomain::Number, &g, AttrType::Constant).data_type, DataType::Autonumeric);
        assert_eq!(pick(BasicDomain::Number, &g, AttrType::Variable).data_type, DataType::Real);
        assert_eq!(pick(BasicDomain::Number, &i, AttrType::Constant).data_type, DataType::Real);
        assert_eq!(pick(BasicDomain::Money, &OpCode::Blank, AttrType::Variable).data_type, DataType::Real);
        assert_eq!(pick(BasicDomain::Date, &i, AttrType::Variable).data_type, DataType::DateTime);
        assert_eq!(pick(BasicDomain::Time, &i, AttrType::Variable).data_type, DataType::DateTime);
        let text = pick(BasicDomain::Text, &i, AttrType::Variable);
        assert_eq!((text.data_type, text.size, text.default_size), (DataType::String, Some(100), true));
    }

    #[test]
    fn annotated_choices() {
        let c = map_data_type(BasicDomain::Text, &OpCode::Input, AttrType::Variable, Some(DataType::String), Some(200))
            .unwrap();
        assert_eq!((c.data_type, c.size, c.default_size), (DataType::String, Some(200), false));
        let c = map_data_type(BasicDomain::Date, &OpCode::Input, AttrType::Variable, Some(DataType::Date), None).unwrap();
        assert_eq!((c.data_type, c.size), (DataType::Date, None));
        assert!(map_data_type(BasicDomain::Money, &OpCode::Input, AttrType::Variable, Some(DataType::Int), None).is_err());
        assert!(map_data_type(BasicDomain::Number, &OpCode::Input, AttrType::Variable, Some(DataType::Autonumeric), None)
            .is_err());
        let b = map_data_type(BasicDomain::Text, &OpCode::Input, AttrType::Variable, Some(DataType::Bool), None).unwrap();
        assert_eq!(b.data_type, DataType::Bool);
    }
}
