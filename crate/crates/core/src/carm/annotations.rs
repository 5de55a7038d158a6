//! Lookup and checking of analyst annotations.
//!
//! Paths are matched segment by segment, ignoring case and repeated
//! whitespace: `TREAT 1/MEDICAL TREATMENT/Comments` names the Comments field
//! of the root aggregation of TREAT 1. Paths of nested aggregations include
//! the iterations they sit in (`TREAT 1/MEDICAL TREATMENT/MEDICATIONS/MEDICATION`).

use std::collections::{HashMap, HashSet};

use crate::carm::model::{AnnotationTarget, Cardinality, FieldKind, RequirementsModel, Setting};
use crate::diag::Diagnostic;
use crate::naming;
use crate::om::model::{AttrType, DataType};

const ANNOTATION: &str = "ANNOTATION";

pub fn normalize_path(path: &str) -> String {
    path.split('/')
        .map(naming::match_key)
        .collect::<Vec<_>>()
        .join("/")
}

/// Annotation settings indexed by target and normalized path. When a key is
/// set twice for the same element, the later setting wins.
#[derive(Debug, Default)]
pub struct AnnotationIndex<'a> {
    settings: HashMap<(AnnotationTarget, String), Vec<&'a Setting>>,
}

impl<'a> AnnotationIndex<'a> {
    pub fn new(model: &'a RequirementsModel) -> Self {
        let mut settings: HashMap<_, Vec<&Setting>> = HashMap::new();
        for ann in &model.annotations.entries {
            settings
                .entry((ann.target, normalize_path(&ann.path)))
                .or_default()
                .extend(ann.settings.iter());
        }
        AnnotationIndex { settings }
    }

    pub fn get(&self, target: AnnotationTarget, path: &str, key: &str) -> Option<&'a Setting> {
        self.settings
            .get(&(target, normalize_path(path)))?
            .iter()
            .rev()
            .find(|s| s.key == key)
            .copied()
    }

    pub fn value(&self, target: AnnotationTarget, path: &str, key: &str) -> Option<&'a str> {
        self.get(target, path, key).map(|s| s.value.as_str())
    }
}

pub fn parse_bool(value: &str) -> Result<bool, String> {
    match value.trim().to_lowercase().as_str() {
        "yes" | "true" => Ok(true),
        "no" | "false" => Ok(false),
        other => Err(format!("expected yes/no, found `{other}`")),
    }
}

pub fn parse_size(value: &str) -> Result<u32, String> {
    match value.trim().parse::<u32>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("size must be a positive integer, found `{}`", value.trim())),
    }
}

/// Splits an identifier selection `Field one + Field two`.
pub fn identifier_fields(value: &str) -> Vec<&str> {
    value.split('+').map(str::trim).filter(|f| !f.is_empty()).collect()
}

fn allowed_keys(target: AnnotationTarget) -> &'static [&'static str] {
    match target {
        AnnotationTarget::Class => &["name", "identifier", "creation", "edit", "transaction"],
        AnnotationTarget::Field => &["name", "type", "datatype", "size", "null"],
        AnnotationTarget::Relationship => &["referenced", "referrer"],
        AnnotationTarget::Event => &["end_of_editing"],
    }
}

/// Every annotation must name an existing element, use a key that applies to
/// its kind and carry a well-formed value.
pub fn check_annotations(model: &RequirementsModel) -> Vec<Diagnostic> {
    let mut events = HashSet::new();
    // normalized aggregation path -> normalized names of its data fields
    let mut classes: HashMap<String, HashSet<String>> = HashMap::new();
    let mut fields = HashSet::new();
    let mut relationships = HashSet::new();
    for event in model.events() {
        events.insert(normalize_path(event.id.as_str()));
        for agg in event.aggregations() {
            let agg_path = normalize_path(&agg.path);
            if agg.parent.is_some() {
                relationships.insert(agg_path.clone());
            }
            let data = classes.entry(agg_path.clone()).or_default();
            for field in agg.agg.fields() {
                let path = format!("{agg_path}/{}", naming::match_key(&field.name));
                match field.kind {
                    FieldKind::Data(_) => {
                        data.insert(naming::match_key(&field.name));
                        fields.insert(path);
                    }
                    FieldKind::Reference { .. } => {
                        relationships.insert(path);
                    }
                }
            }
        }
    }

    let mut diags = Vec::new();
    for ann in &model.annotations.entries {
        let path = normalize_path(&ann.path);
        let exists = match ann.target {
            AnnotationTarget::Class => classes.contains_key(&path),
            AnnotationTarget::Field => fields.contains(&path),
            AnnotationTarget::Relationship => relationships.contains(&path),
            AnnotationTarget::Event => events.contains(&path),
        };
        if !exists {
            let what = match ann.target {
                AnnotationTarget::Class => "an aggregation substructure",
                AnnotationTarget::Field => "a data field",
                AnnotationTarget::Relationship => "a reference field or nested aggregation",
                AnnotationTarget::Event => "an event",
            };
            diags.push(Diagnostic::error(
                ann.loc.clone(),
                ANNOTATION,
                format!("`{}` does not name {what}", ann.path),
            ));
            continue;
        }
        for setting in &ann.settings {
            if !allowed_keys(ann.target).contains(&setting.key.as_str()) {
                diags.push(Diagnostic::error(
                    setting.loc.clone(),
                    ANNOTATION,
                    format!(
                        "unknown {} annotation key `{}`, expected one of: {}",
                        ann.target.keyword(),
                        setting.key,
                        allowed_keys(ann.target).join(", ")
                    ),
                ));
                continue;
            }
            let value = setting.value.as_str();
            let problem = match setting.key.as_str() {
                "type" => value.parse::<AttrType>().err(),
                "datatype" => value.parse::<DataType>().err(),
                "size" => parse_size(value).err(),
                "null" => parse_bool(value).err(),
                "referenced" | "referrer" => value.parse::<Cardinality>().err(),
                "identifier" => {
                    let known = &classes[&path];
                    let names = identifier_fields(value);
                    if names.is_empty() {
                        Some("identifier names no field".to_string())
                    } else {
                        names
                            .iter()
                            .find(|n| !known.contains(&naming::match_key(n)))
                            .map(|n| format!("identifier field `{n}` is not a data field of `{}`", ann.path))
                    }
                }
                _ if value.trim().is_empty() => Some(format!("`{}` needs a value", setting.key)),
                _ if value.chars().any(char::is_whitespace) => {
                    Some(format!("name `{value}` must not contain whitespace"))
                }
                _ => None,
            };
            if let Some(problem) = problem {
                diags.push(Diagnostic::error(setting.loc.clone(), ANNOTATION, problem));
            }
        }
    }
    diags
}
