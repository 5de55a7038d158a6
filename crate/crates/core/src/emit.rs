//! Output files: `model.json`, `classes.dot`, `std_<CLASS>.dot`, `trace.tsv`.
//!
//! Every renderer is deterministic. Files are written to temporary files in
//! the output directory and renamed into place only once all of them have
//! been written.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::dm::{StateKind, StateTransitionDiagram};
use crate::om::model::{ObjectModel, ServiceKind};
use crate::trace::TraceMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Format {
    ModelJson,
    ClassDot,
    StdDot,
    TraceReport,
}

impl Format {
    pub const ALL: [Format; 4] = [Format::ModelJson, Format::ClassDot, Format::StdDot, Format::TraceReport];
}

/// Parses a comma list of `json`, `dot` (class and state diagrams), `trace`.
pub fn parse_formats(list: &str) -> Result<BTreeSet<Format>, String> {
    let mut formats = BTreeSet::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.to_lowercase().as_str() {
            "json" => {
                formats.insert(Format::ModelJson);
            }
            "dot" => {
                formats.insert(Format::ClassDot);
                formats.insert(Format::StdDot);
            }
            "trace" => {
                formats.insert(Format::TraceReport);
            }
            other => return Err(format!("unknown format `{other}` (expected json, dot, trace)")),
        }
    }
    if formats.is_empty() {
        return Err("no output format selected".into());
    }
    Ok(formats)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitConfig {
    pub formats: BTreeSet<Format>,
    pub out_dir: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("no output format selected")]
    NoFormats,
    #[error("cannot write `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// `model.json`: the Object Model with keys in alphabetical order.
pub fn render_model_json(om: &ObjectModel) -> String {
    let value = serde_json::to_value(om).expect("object model serializes");
    let mut text = serde_json::to_string_pretty(&value).expect("json value serializes");
    text.push('\n');
    text
}

fn quote(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Escapes the characters that structure record labels.
fn record_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if matches!(c, '{' | '}' | '|' | '<' | '>' | '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

/// `classes.dot`, or `None` for a model without classes.
pub fn render_class_dot(om: &ObjectModel) -> Option<String> {
    if om.classes.is_empty() {
        return None;
    }
    let mut out = String::from("graph classes {\n  node [shape=record, fontname=\"Helvetica\"];\n");
    for class in &om.classes {
        let attributes: String = class
            .attributes
            .iter()
            .map(|a| format!("{}\\l", record_text(&a.name)))
            .collect();
        let services: String = class
            .services
            .iter()
            .map(|s| {
                let tag = match s.kind {
                    ServiceKind::Creation => "<<new>> ",
                    ServiceKind::SharedInsert | ServiceKind::SharedDelete => "<<shared>> ",
                    _ => "",
                };
                format!("{}\\l", record_text(&format!("{tag}{}", s.name)))
            })
            .collect();
        let _ = writeln!(
            out,
            "  {} [label=\"{{{}|{}|{}}}\"];",
            quote(&class.name),
            record_text(&class.name),
            attributes,
            services
        );
    }
    for rel in &om.relationships {
        let _ = writeln!(
            out,
            "  {} -- {} [label={}];",
            quote(&rel.class_a),
            quote(&rel.class_b),
            quote(&format!("{} --- {}", rel.card_a, rel.card_b))
        );
    }
    out.push_str("}\n");
    Some(out)
}

/// File name of a class's state diagram.
pub fn std_file_name(class: &str) -> String {
    let safe: String = class
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect();
    format!("std_{safe}.dot")
}

pub fn render_std_dot(std: &StateTransitionDiagram) -> String {
    let mut out = format!(
        "digraph {} {{\n  rankdir=LR;\n  node [shape=box, style=rounded, fontname=\"Helvetica\"];\n",
        quote(&std.class_name)
    );
    for state in &std.states {
        let attrs = match state.kind {
            StateKind::PreCreation => format!(
                "shape=circle, style=filled, fillcolor=black, width=0.25, label=\"\", xlabel={}",
                quote(&state.name)
            ),
            StateKind::Intermediate => String::new(),
            StateKind::Auxiliary => "style=\"rounded,dashed\"".to_string(),
        };
        if attrs.is_empty() {
            let _ = writeln!(out, "  {};", quote(&state.name));
        } else {
            let _ = writeln!(out, "  {} [{attrs}];", quote(&state.name));
        }
    }
    for t in &std.transitions {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&t.from),
            quote(&t.to),
            quote(&t.label())
        );
    }
    out.push_str("}\n");
    out
}

/// `trace.tsv`: sorted `rule<TAB>source<TAB>derived` rows.
pub fn render_trace(trace: &TraceMap) -> String {
    trace.rows().into_iter().map(|r| r + "\n").collect()
}

/// Renders every selected format as `(file name, contents)` pairs.
pub fn render_all(
    om: &ObjectModel,
    stds: &[StateTransitionDiagram],
    trace: &TraceMap,
    formats: &BTreeSet<Format>,
) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for format in formats {
        match format {
            Format::ModelJson => files.push(("model.json".to_string(), render_model_json(om))),
            Format::ClassDot => {
                if let Some(dot) = render_class_dot(om) {
                    files.push(("classes.dot".to_string(), dot));
                }
            }
            Format::StdDot => {
                for std in stds {
                    files.push((std_file_name(&std.class_name), render_std_dot(std)));
                }
            }
            Format::TraceReport => files.push(("trace.tsv".to_string(), render_trace(trace))),
        }
    }
    files
}

/// Writes the selected files into `cfg.out_dir`, creating it if needed, and
/// returns their paths. Nothing is left behind under the final names when
/// any write fails.
pub fn emit_model(
    om: &ObjectModel,
    stds: &[StateTransitionDiagram],
    trace: &TraceMap,
    cfg: &EmitConfig,
) -> Result<Vec<PathBuf>, EmitError> {
    if cfg.formats.is_empty() {
        return Err(EmitError::NoFormats);
    }
    let files = render_all(om, stds, trace, &cfg.formats);
    write_atomically(&cfg.out_dir, &files)
}

fn write_atomically(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>, EmitError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| EmitError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let target = dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io(dir))?;
        tmp.write_all(contents.as_bytes()).map_err(io(&target))?;
        tmp.flush().map_err(io(&target))?;
        staged.push((tmp, target));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (tmp, target) in staged {
        tmp.persist(&target).map_err(|e| EmitError::Io {
            path: target.clone(),
            source: e.error,
        })?;
        written.push(target);
    }
    Ok(written)
}
