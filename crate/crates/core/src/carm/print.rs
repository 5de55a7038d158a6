//! Pretty printer producing `.carm` text that parses back to an equal model.

use std::fmt::{self, Write};

use crate::carm::model::*;

pub fn print_model(model: &RequirementsModel) -> String {
    model.to_string()
}

impl fmt::Display for RequirementsModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for object in &self.business_objects {
            match &object.binding {
                Some(binding) => writeln!(f, "object: {} = {binding}", object.name)?,
                None => writeln!(f, "object: {}", object.name)?,
            }
        }
        for process in &self.processes {
            writeln!(f)?;
            write!(f, "{process}")?;
        }
        if !self.annotations.entries.is_empty() {
            writeln!(f)?;
            writeln!(f, "annotations")?;
            for ann in &self.annotations.entries {
                writeln!(f, "  {ann}")?;
            }
            writeln!(f, "end")?;
        }
        Ok(())
    }
}

impl fmt::Display for BusinessProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "process {} \"{}\"", self.id, self.name)?;
        for prec in &self.precedences {
            writeln!(f, "  {prec}")?;
        }
        for event in &self.events {
            write!(f, "{event}")?;
        }
        writeln!(f, "end")
    }
}

impl fmt::Display for PrecedenceRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.from, self.to)?;
        let mut flags = Vec::new();
        match self.merge {
            MergeKind::Plain => {}
            MergeKind::OrMerge => flags.push("or"),
            MergeKind::AndJoin => flags.push("and"),
        }
        if self.loopback {
            flags.push("loopback");
        }
        if !flags.is_empty() {
            write!(f, " [{}]", flags.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Display for CommunicativeEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "  event {} \"{}\"", self.id, self.name)?;
        writeln!(f, "    primary: {}", self.primary_actor)?;
        writeln!(f, "    interface: {}", self.interface_actor)?;
        for prose in &self.prose {
            writeln!(f, "    {}: {}", prose.key.keyword(), prose.text)?;
        }
        writeln!(f, "    message:")?;
        writeln!(f, "      FIELD | OP | DOMAIN | EXAMPLE VALUE | EXTENDS")?;
        let mut out = String::new();
        write_aggregation(&mut out, &self.message)?;
        for line in out.lines() {
            writeln!(f, "      {line}")?;
        }
        for r in &self.restrictions {
            write!(f, "    restriction: {} {}", r.subject, r.referenced_side)?;
            if let Some(referrer) = r.referrer_side {
                write!(f, " {referrer}")?;
            }
            if let Some(text) = &r.text {
                write!(f, " \"{text}\"")?;
            }
            writeln!(f)?;
        }
        if let Some(ident) = &self.identifier {
            write!(f, "    identifier: {}", ident.fields.join(", "))?;
            if let Some(text) = &ident.text {
                write!(f, " \"{text}\"")?;
            }
            writeln!(f)?;
        }
        for variant in &self.variants {
            writeln!(f, "    variant: {} when {}", variant.id, variant.condition)?;
        }
        writeln!(f, "  end")
    }
}

fn write_aggregation(out: &mut String, agg: &Aggregation) -> fmt::Result {
    writeln!(out, "{} =", agg.name)?;
    writeln!(out, "<")?;
    let last = agg.members.len().saturating_sub(1);
    for (i, member) in agg.members.iter().enumerate() {
        let plus = if i < last { " +" } else { "" };
        match member {
            Member::Field(field) => {
                write!(out, "{}{plus} | {} | ", field.name, field.op)?;
                match &field.kind {
                    FieldKind::Data(domain) => write!(out, "{domain} | {}", field.example)?,
                    FieldKind::Reference { object, extends } => {
                        write!(out, "{object} | {}", field.example)?;
                        if *extends {
                            write!(out, " | true")?;
                        }
                    }
                }
                writeln!(out)?;
            }
            Member::Substructure(sub) => {
                write_substructure(out, sub)?;
                if !plus.is_empty() {
                    writeln!(out, "+")?;
                }
            }
        }
    }
    writeln!(out, ">")
}

fn write_substructure(out: &mut String, sub: &Substructure) -> fmt::Result {
    match sub {
        Substructure::Aggregation(agg) => write_aggregation(out, agg),
        Substructure::Iteration(it) => {
            writeln!(out, "{} =", it.name)?;
            writeln!(out, "{{")?;
            write_substructure(out, &it.body)?;
            writeln!(out, "}}")
        }
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: ", self.target.keyword(), self.path)?;
        let settings: Vec<String> = self
            .settings
            .iter()
            .map(|s| format!("{} = {}", s.key, s.value))
            .collect();
        f.write_str(&settings.join(", "))
    }
}
