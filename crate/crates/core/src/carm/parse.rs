//! Parser for the line-oriented `.carm` requirements format.
//!
//! ```text
//! objects: Patient, Nurse, Medical treatment
//!
//! process TREAT "Medical treatment"
//!   APP 1 -> TREAT 1
//!   TREAT 1 -> TREAT 2 [or]
//!
//!   event TREAT 1 "A doctor prescribes a medical treatment"
//!     primary: Doctor
//!     interface: Doctor
//!     message:
//!       FIELD | OP | DOMAIN | EXAMPLE VALUE
//!       MEDICAL TREATMENT =
//!       < Treatment number + | g | number | 26411
//!       Patient             | i | Patient | 842133-W
//!       >
//!     restriction: Patient 1:1 0:M "One medical treatment is specific for exactly one patient."
//!     identifier: Treatment number
//!   end
//! end
//! ```
//!
//! Message-structure lines keep the tabular layout of event templates: the
//! structure text, then `|`-separated OP, DOMAIN, EXAMPLE and EXTENDS columns.

use std::sync::Arc;

use crate::carm::condition::Condition;
use crate::carm::model::*;
use crate::carm::validate;
use crate::diag::{Diagnostic, Loc};

const SYNTAX: &str = "SYNTAX";

type PResult<T> = Result<T, Diagnostic>;

/// Parses one `.carm` source. On failure returns every error found: the
/// first syntax error, or the model-level errors (duplicate event ids,
/// unknown business objects, mixed merge kinds) of a syntactically valid file.
pub fn parse_model(file: &str, source: &str) -> Result<RequirementsModel, Vec<Diagnostic>> {
    let model = parse_syntax(file, source).map_err(|d| vec![d])?;
    let errors = validate::parse_level_errors(&model);
    if errors.is_empty() {
        Ok(model)
    } else {
        Err(errors)
    }
}

/// Parses several sources into one model.
pub fn parse_files<'a>(
    sources: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<RequirementsModel, Vec<Diagnostic>> {
    let mut model = RequirementsModel::default();
    let mut errors = Vec::new();
    for (file, text) in sources {
        match parse_syntax(file, text) {
            Ok(part) => model.merge(part),
            Err(d) => errors.push(d),
        }
    }
    if errors.is_empty() {
        errors = validate::parse_level_errors(&model);
    }
    if errors.is_empty() {
        Ok(model)
    } else {
        crate::diag::sort_diagnostics(&mut errors);
        Err(errors)
    }
}

/// Parses an annotations file: annotation lines, optionally wrapped in an
/// `annotations` ... `end` block.
pub fn parse_annotations(file: &str, source: &str) -> Result<AnnotationSet, Vec<Diagnostic>> {
    let mut p = Parser::new(file, source);
    let mut set = AnnotationSet::default();
    let mut wrapped = false;
    while let Some(line) = p.next_line() {
        match line.text {
            "annotations" if !wrapped => wrapped = true,
            "end" if wrapped => wrapped = false,
            _ => set.entries.push(p.annotation(&line).map_err(|d| vec![d])?),
        }
    }
    if wrapped {
        return Err(vec![p.eof_error("`end` closing the annotations block")]);
    }
    Ok(set)
}

pub(crate) fn parse_syntax(file: &str, source: &str) -> PResult<RequirementsModel> {
    let mut p = Parser::new(file, source);
    let mut model = RequirementsModel::default();
    while let Some(line) = p.next_line() {
        if let Some(rest) = keyword(line.text, "objects:") {
            for name in rest.split(',').map(str::trim).filter(|n| !n.is_empty()) {
                model.business_objects.push(BusinessObject {
                    name: name.to_string(),
                    binding: None,
                    loc: line.loc(&p.file),
                });
            }
        } else if let Some(rest) = keyword(line.text, "object:") {
            let (name, binding) = match rest.split_once('=') {
                Some((name, binding)) => (name.trim(), Some(binding.trim().to_string())),
                None => (rest.trim(), None),
            };
            if name.is_empty() {
                return Err(line.error(&p.file, "expected a business object name after `object:`"));
            }
            model.business_objects.push(BusinessObject {
                name: name.to_string(),
                binding,
                loc: line.loc(&p.file),
            });
        } else if let Some(rest) = keyword(line.text, "process") {
            model.processes.push(p.process(&line, rest)?);
        } else if line.text == "annotations" {
            loop {
                let inner = p
                    .next_line()
                    .ok_or_else(|| p.eof_error("`end` closing the annotations block"))?;
                if inner.text == "end" {
                    break;
                }
                model.annotations.entries.push(p.annotation(&inner)?);
            }
        } else {
            return Err(line.error(
                &p.file,
                format!(
                    "expected `objects:`, `object:`, `process` or `annotations`, found `{}`",
                    line.text
                ),
            ));
        }
    }
    Ok(model)
}

#[derive(Debug, Clone, Copy)]
struct Line<'a> {
    number: u32,
    indent: u32,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn loc(&self, file: &Arc<str>) -> Loc {
        Loc::new(file, self.number, self.indent + 1)
    }

    fn loc_at(&self, file: &Arc<str>, offset: usize) -> Loc {
        Loc::new(file, self.number, self.indent + 1 + offset as u32)
    }

    fn error(&self, file: &Arc<str>, message: impl Into<String>) -> Diagnostic {
        Diagnostic::error(self.loc(file), SYNTAX, message)
    }
}

struct Parser<'a> {
    file: Arc<str>,
    lines: Vec<Line<'a>>,
    pos: usize,
}

/// Strips `word` from the start of `text` when followed by a word boundary.
fn keyword<'t>(text: &'t str, word: &str) -> Option<&'t str> {
    let rest = text.strip_prefix(word)?;
    if word.ends_with(':') || rest.is_empty() || rest.starts_with(char::is_whitespace) {
        Some(rest.trim())
    } else {
        None
    }
}

/// Splits `ID "Name"` headers.
fn id_and_quoted(rest: &str) -> Option<(&str, &str)> {
    let open = rest.find('"')?;
    let tail = &rest[open + 1..];
    let close = tail.find('"')?;
    if !tail[close + 1..].trim().is_empty() {
        return None;
    }
    let id = rest[..open].trim();
    (!id.is_empty()).then_some((id, &tail[..close]))
}

/// Removes a trailing `"quoted text"` and returns it separately.
fn trailing_quote(text: &str) -> (&str, Option<String>) {
    let trimmed = text.trim_end();
    if let Some(body) = trimmed.strip_suffix('"') {
        if let Some(open) = body.rfind('"') {
            return (body[..open].trim_end(), Some(body[open + 1..].to_string()));
        }
    }
    (trimmed, None)
}

impl<'a> Parser<'a> {
    fn new(file: &str, source: &'a str) -> Self {
        let lines = source
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let text = raw.trim();
                if text.is_empty() || text.starts_with('#') {
                    return None;
                }
                let indent = raw.len() - raw.trim_start().len();
                Some(Line {
                    number: i as u32 + 1,
                    indent: indent as u32,
                    text,
                })
            })
            .collect();
        Parser {
            file: Arc::from(file),
            lines,
            pos: 0,
        }
    }

    fn next_line(&mut self) -> Option<Line<'a>> {
        let line = self.lines.get(self.pos).copied();
        self.pos += 1;
        line
    }

    fn eof_error(&self, expected: &str) -> Diagnostic {
        let line = self.lines.last().map_or(1, |l| l.number + 1);
        Diagnostic::error(
            Loc::new(&self.file, line, 1),
            SYNTAX,
            format!("unexpected end of input, expected {expected}"),
        )
    }

    fn process(&mut self, header: &Line<'a>, rest: &str) -> PResult<BusinessProcess> {
        let (id, name) = id_and_quoted(rest)
            .ok_or_else(|| header.error(&self.file, "expected `process ID \"name\"`"))?;
        let mut process = BusinessProcess {
            id: id.to_string(),
            name: name.to_string(),
            events: Vec::new(),
            precedences: Vec::new(),
            loc: header.loc(&self.file),
        };
        loop {
            let line = self
                .next_line()
                .ok_or_else(|| self.eof_error("`end` closing the process"))?;
            if line.text == "end" {
                return Ok(process);
            }
            if let Some(rest) = keyword(line.text, "event") {
                process.events.push(self.event(&line, rest)?);
            } else if line.text.contains("->") {
                process.precedences.push(self.precedence(&line)?);
            } else {
                return Err(line.error(
                    &self.file,
                    format!("expected `event`, a precedence `A -> B` or `end`, found `{}`", line.text),
                ));
            }
        }
    }

    fn precedence(&self, line: &Line<'a>) -> PResult<PrecedenceRelation> {
        let (body, flags) = match line.text.rfind('[') {
            Some(open) if line.text.ends_with(']') => (
                &line.text[..open],
                Some(&line.text[open + 1..line.text.len() - 1]),
            ),
            _ => (line.text, None),
        };
        let (from, to) = body
            .split_once("->")
            .ok_or_else(|| line.error(&self.file, "expected `->` in precedence"))?;
        let (from, to) = (from.trim(), to.trim());
        if from.is_empty() || to.is_empty() {
            return Err(line.error(&self.file, "precedence needs a source and a target"));
        }
        let from = Endpoint::parse(from);
        let to = Endpoint::parse(to);
        if from == Endpoint::End {
            return Err(line.error(&self.file, "END cannot precede an event"));
        }
        if to == Endpoint::Start {
            return Err(line.error(&self.file, "START cannot have incoming precedences"));
        }
        let mut merge = MergeKind::Plain;
        let mut loopback = false;
        for flag in flags.into_iter().flat_map(|f| f.split(',')).map(str::trim) {
            match flag {
                "or" => merge = MergeKind::OrMerge,
                "and" => merge = MergeKind::AndJoin,
                "loopback" => loopback = true,
                "" => {}
                other => {
                    return Err(line.error(
                        &self.file,
                        format!("unknown precedence flag `{other}`, expected `or`, `and` or `loopback`"),
                    ))
                }
            }
        }
        Ok(PrecedenceRelation {
            from,
            to,
            merge,
            loopback,
            loc: line.loc(&self.file),
        })
    }

    fn event(&mut self, header: &Line<'a>, rest: &str) -> PResult<CommunicativeEvent> {
        let (id, name) = id_and_quoted(rest)
            .ok_or_else(|| header.error(&self.file, "expected `event ID \"name\"`"))?;
        let mut primary = None;
        let mut interface = None;
        let mut message = None;
        let mut prose = Vec::new();
        let mut restrictions = Vec::new();
        let mut identifier = None;
        let mut variants = Vec::new();
        loop {
            let line = self
                .next_line()
                .ok_or_else(|| self.eof_error("`end` closing the event"))?;
            let text = line.text;
            if text == "end" {
                break;
            } else if let Some(v) = keyword(text, "primary:") {
                primary = Some(v.to_string());
            } else if let Some(v) = keyword(text, "interface:") {
                interface = Some(v.to_string());
            } else if text == "message:" {
                if message.is_some() {
                    return Err(line.error(&self.file, "duplicate `message:` block"));
                }
                message = Some(self.message(&line)?);
            } else if let Some(v) = keyword(text, "restriction:") {
                restrictions.push(self.restriction(&line, v)?);
            } else if let Some(v) = keyword(text, "identifier:") {
                let (fields, quote) = trailing_quote(v);
                let fields: Vec<String> = fields
                    .split(',')
                    .map(str::trim)
                    .filter(|f| !f.is_empty())
                    .map(String::from)
                    .collect();
                if fields.is_empty() {
                    return Err(line.error(&self.file, "identifier restriction names no field"));
                }
                identifier = Some(IdentifierRestriction {
                    fields,
                    text: quote,
                    loc: line.loc(&self.file),
                });
            } else if let Some(v) = keyword(text, "variant:") {
                let (vid, cond) = v
                    .split_once(" when ")
                    .ok_or_else(|| line.error(&self.file, "expected `variant: ID when condition`"))?;
                let condition = Condition::parse(cond)
                    .map_err(|e| line.error(&self.file, format!("in variant condition: {e}")))?;
                variants.push(EventVariant {
                    id: vid.trim().to_string(),
                    condition,
                    loc: line.loc(&self.file),
                });
            } else if let Some(key) = ProseKey::ALL
                .into_iter()
                .find(|k| keyword(text, &format!("{}:", k.keyword())).is_some())
            {
                let value = keyword(text, &format!("{}:", key.keyword())).unwrap_or_default();
                prose.push(Prose {
                    key,
                    text: value.to_string(),
                });
            } else {
                return Err(line.error(
                    &self.file,
                    format!("unexpected line in event body: `{text}`"),
                ));
            }
        }
        let missing = |what: &str| header.error(&self.file, format!("event `{id}` has no `{what}`"));
        Ok(CommunicativeEvent {
            id: EventId::new(id),
            name: name.to_string(),
            primary_actor: primary.ok_or_else(|| missing("primary:"))?,
            interface_actor: interface.ok_or_else(|| missing("interface:"))?,
            prose,
            message: message.ok_or_else(|| missing("message:"))?,
            restrictions,
            identifier,
            variants,
            loc: header.loc(&self.file),
        })
    }

    fn restriction(&self, line: &Line<'a>, text: &str) -> PResult<CardinalityRestriction> {
        let (body, quote) = trailing_quote(text);
        let words: Vec<&str> = body.split_whitespace().collect();
        let card = |w: &str| w.parse::<Cardinality>();
        let bad = |msg: String| line.error(&self.file, msg);
        let n = words.len();
        let (subject_len, referenced, referrer) = if n >= 3 && card(words[n - 2]).is_ok() {
            (n - 2, card(words[n - 2]).map_err(bad)?, Some(card(words[n - 1]).map_err(bad)?))
        } else if n >= 2 {
            (n - 1, card(words[n - 1]).map_err(bad)?, None)
        } else {
            return Err(bad("expected `restriction: SUBJECT min:max [min:max]`".into()));
        };
        Ok(CardinalityRestriction {
            subject: words[..subject_len].join(" "),
            referenced_side: referenced,
            referrer_side: referrer,
            text: quote,
            loc: line.loc(&self.file),
        })
    }

    fn annotation(&self, line: &Line<'a>) -> PResult<Annotation> {
        let (word, rest) = line
            .text
            .split_once(char::is_whitespace)
            .ok_or_else(|| line.error(&self.file, "expected `KIND PATH: key = value, ...`"))?;
        let target = AnnotationTarget::parse(word).ok_or_else(|| {
            line.error(
                &self.file,
                format!("unknown annotation kind `{word}`, expected class, field, relationship or event"),
            )
        })?;
        let (path, settings_text) = rest
            .split_once(':')
            .ok_or_else(|| line.error(&self.file, "expected `:` after the annotation path"))?;
        let path = path.trim();
        if path.is_empty() {
            return Err(line.error(&self.file, "annotation path is empty"));
        }
        let settings_offset = line.text.len() - settings_text.len();
        let mut settings = Vec::new();
        let mut offset = settings_offset;
        for part in settings_text.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(|| {
                Diagnostic::error(
                    line.loc_at(&self.file, offset),
                    SYNTAX,
                    format!("expected `key = value`, found `{}`", part.trim()),
                )
            })?;
            settings.push(Setting {
                key: key.trim().to_string(),
                value: value.trim().to_string(),
                loc: line.loc_at(&self.file, offset + (part.len() - part.trim_start().len())),
            });
            offset += part.len() + 1;
        }
        Ok(Annotation {
            target,
            path: path.to_string(),
            settings,
            loc: line.loc(&self.file),
        })
    }

    /// Reads structure lines until the root substructure closes.
    fn message(&mut self, header: &Line<'a>) -> PResult<Aggregation> {
        let mut tokens = Vec::new();
        let mut depth: i32 = 0;
        let mut opened = false;
        let mut first = true;
        while !(opened && depth == 0) {
            let line = self
                .next_line()
                .ok_or_else(|| self.eof_error("the message structure to close"))?;
            if first && line.text.starts_with("FIELD") && line.text.contains('|') {
                first = false;
                continue;
            }
            first = false;
            if line.text == "end" {
                return Err(line.error(&self.file, "message structure is not closed"));
            }
            let before = tokens.len();
            self.tokenize_structure_line(&line, &mut tokens)?;
            for t in &tokens[before..] {
                match t.kind {
                    Tok::LAngle | Tok::LBrace => {
                        depth += 1;
                        opened = true;
                    }
                    Tok::RAngle | Tok::RBrace => depth -= 1,
                    _ => {}
                }
                if depth < 0 {
                    return Err(Diagnostic::error(t.loc.clone(), SYNTAX, "unbalanced closing bracket"));
                }
            }
        }
        let mut stream = TokenStream {
            tokens,
            pos: 0,
            header_loc: header.loc(&self.file),
        };
        let root = stream.substructure()?;
        if let Some(extra) = stream.peek() {
            return Err(Diagnostic::error(
                extra.loc.clone(),
                SYNTAX,
                "unexpected token after the root substructure",
            ));
        }
        match root {
            Substructure::Aggregation(agg) => Ok(agg),
            Substructure::Iteration(it) => Err(Diagnostic::error(
                it.loc,
                SYNTAX,
                "the root of a message structure must be an aggregation `NAME = < ... >`",
            )),
        }
    }

    fn tokenize_structure_line(&self, line: &Line<'a>, out: &mut Vec<Token>) -> PResult<()> {
        let (structure, columns) = match line.text.split_once('|') {
            Some((s, cols)) => (s, Some(cols.split('|').map(str::trim).collect::<Vec<_>>())),
            None => (line.text, None),
        };
        let mut line_tokens: Vec<Token> = Vec::new();
        let mut name_start: Option<usize> = None;
        let flush = |start: &mut Option<usize>, end: usize, toks: &mut Vec<Token>| {
            if let Some(s) = start.take() {
                let name = structure[s..end].trim();
                if !name.is_empty() {
                    toks.push(Token {
                        kind: Tok::Name(name.to_string()),
                        loc: line.loc_at(&self.file, s + (structure[s..].len() - structure[s..].trim_start().len())),
                        columns: None,
                    });
                }
            }
        };
        for (i, c) in structure.char_indices() {
            let sym = match c {
                '=' => Some(Tok::Eq),
                '<' => Some(Tok::LAngle),
                '>' => Some(Tok::RAngle),
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                '+' => Some(Tok::Plus),
                _ => None,
            };
            match sym {
                Some(kind) => {
                    flush(&mut name_start, i, &mut line_tokens);
                    line_tokens.push(Token {
                        kind,
                        loc: line.loc_at(&self.file, i),
                        columns: None,
                    });
                }
                None if name_start.is_none() && !c.is_whitespace() => name_start = Some(i),
                None => {}
            }
        }
        flush(&mut name_start, structure.len(), &mut line_tokens);

        if let Some(columns) = columns {
            let field_positions: Vec<usize> = (0..line_tokens.len())
                .filter(|&i| {
                    matches!(line_tokens[i].kind, Tok::Name(_))
                        && !matches!(line_tokens.get(i + 1).map(|t| &t.kind), Some(Tok::Eq))
                })
                .collect();
            if field_positions.len() != 1 {
                return Err(line.error(
                    &self.file,
                    "a line with OP/DOMAIN columns must hold exactly one field",
                ));
            }
            if columns.len() < 2 || columns[1].is_empty() {
                return Err(line.error(&self.file, "field line needs OP and DOMAIN columns"));
            }
            line_tokens[field_positions[0]].columns = Some(columns.iter().map(|c| c.to_string()).collect());
        }
        out.extend(line_tokens);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Eq,
    LAngle,
    RAngle,
    LBrace,
    RBrace,
    Plus,
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    loc: Loc,
    columns: Option<Vec<String>>,
}

struct TokenStream {
    tokens: Vec<Token>,
    pos: usize,
    header_loc: Loc,
}

impl TokenStream {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error_here(&self, expected: &str) -> Diagnostic {
        match self.peek() {
            Some(t) => Diagnostic::error(
                t.loc.clone(),
                SYNTAX,
                format!("expected {expected}, found {}", describe(&t.kind)),
            ),
            None => Diagnostic::error(
                self.header_loc.clone(),
                SYNTAX,
                format!("expected {expected}, found end of message structure"),
            ),
        }
    }

    fn expect(&mut self, kind: Tok, expected: &str) -> PResult<Token> {
        if self.peek_kind(0) == Some(&kind) {
            Ok(self.bump().expect("peeked"))
        } else {
            Err(self.error_here(expected))
        }
    }

    /// `NAME = < members >` or `NAME = { substructure }`.
    fn substructure(&mut self) -> PResult<Substructure> {
        let name_tok = match self.peek_kind(0) {
            Some(Tok::Name(_)) => self.bump().expect("peeked"),
            _ => return Err(self.error_here("a substructure name")),
        };
        let Tok::Name(name) = name_tok.kind else {
            unreachable!()
        };
        if name_tok.columns.is_some() {
            return Err(Diagnostic::error(
                name_tok.loc,
                SYNTAX,
                "substructure definitions take no OP/DOMAIN columns",
            ));
        }
        self.expect(Tok::Eq, "`=` after the substructure name")?;
        match self.peek_kind(0) {
            Some(Tok::LAngle) => {
                self.bump();
                let members = self.members()?;
                self.expect(Tok::RAngle, "`>` closing the aggregation")?;
                Ok(Substructure::Aggregation(Aggregation::new(name, members, name_tok.loc)))
            }
            Some(Tok::LBrace) => {
                self.bump();
                let body = self.substructure()?;
                self.expect(Tok::RBrace, "`}` closing the iteration")?;
                Ok(Substructure::Iteration(Iteration {
                    name,
                    body: Box::new(body),
                    loc: name_tok.loc,
                }))
            }
            _ => Err(self.error_here("`<` or `{`")),
        }
    }

    fn members(&mut self) -> PResult<Vec<Member>> {
        let mut members = Vec::new();
        loop {
            members.push(self.member()?);
            match self.peek_kind(0) {
                Some(Tok::Plus) => {
                    self.bump();
                    if self.peek_kind(0) == Some(&Tok::RAngle) {
                        return Ok(members);
                    }
                }
                Some(Tok::RAngle) => return Ok(members),
                _ => return Err(self.error_here("`+` or `>`")),
            }
        }
    }

    fn member(&mut self) -> PResult<Member> {
        match (self.peek_kind(0), self.peek_kind(1)) {
            (Some(Tok::Name(_)), Some(Tok::Eq)) => Ok(Member::Substructure(self.substructure()?)),
            (Some(Tok::Name(_)), _) => {
                let tok = self.bump().expect("peeked");
                let Tok::Name(name) = tok.kind else { unreachable!() };
                let columns = tok.columns.ok_or_else(|| {
                    Diagnostic::error(
                        tok.loc.clone(),
                        SYNTAX,
                        format!("field `{name}` needs OP and DOMAIN columns"),
                    )
                })?;
                field(name, &columns, tok.loc)
            }
            _ => Err(self.error_here("a field or substructure")),
        }
    }
}

fn describe(kind: &Tok) -> String {
    match kind {
        Tok::Name(n) => format!("`{n}`"),
        Tok::Eq => "`=`".into(),
        Tok::LAngle => "`<`".into(),
        Tok::RAngle => "`>`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Plus => "`+`".into(),
    }
}

fn field(name: String, columns: &[String], loc: Loc) -> PResult<Member> {
    let op = OpCode::parse(&columns[0]);
    let domain = columns[1].trim();
    let example = columns.get(2).cloned().unwrap_or_default();
    let extends = match columns.get(3).map(|c| c.trim().to_lowercase()) {
        None => false,
        Some(v) if v.is_empty() || v == "false" => false,
        Some(v) if v == "true" => true,
        Some(v) => {
            return Err(Diagnostic::error(
                loc,
                SYNTAX,
                format!("EXTENDS column must be `true` or `false`, found `{v}`"),
            ))
        }
    };
    if columns.len() > 4 {
        return Err(Diagnostic::error(loc, SYNTAX, "too many columns on a field line"));
    }
    let kind = match BasicDomain::parse(domain) {
        Some(d) if extends => {
            return Err(Diagnostic::error(
                loc,
                SYNTAX,
                format!("data field `{name}` of domain {d} cannot extend a business object"),
            ))
        }
        Some(d) => FieldKind::Data(d),
        None => FieldKind::Reference {
            object: domain.to_string(),
            extends,
        },
    };
    Ok(Member::Field(Field {
        name,
        op,
        kind,
        example,
        loc,
    }))
}
