//! Diagnostics with source locations.

use std::fmt;
use std::sync::Arc;

/// A position in a source file. Lines and columns are 1-based.
///
/// Locations are metadata: two locations always compare equal, so that
/// structural equality of models ignores where elements were written.
#[derive(Debug, Clone, Eq)]
pub struct Loc {
    pub file: Arc<str>,
    pub line: u32,
    pub col: u32,
}

impl Loc {
    pub fn new(file: &Arc<str>, line: u32, col: u32) -> Self {
        Loc {
            file: Arc::clone(file),
            line,
            col,
        }
    }

    /// Location for elements built in memory rather than parsed.
    pub fn synthetic() -> Self {
        Loc {
            file: Arc::from("<memory>"),
            line: 0,
            col: 0,
        }
    }
}

impl Default for Loc {
    fn default() -> Self {
        Loc::synthetic()
    }
}

impl PartialEq for Loc {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub loc: Loc,
    /// Rule id (`OM2`, `OM3`, ...) or a short upper-case code such as `SYNTAX`.
    pub code: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(loc: Loc, code: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            loc,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn warning(loc: Loc, code: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            loc,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.severity, self.loc, self.code, self.message)
    }
}

/// Sorts diagnostics by file, line, code, then column and message.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        (&a.loc.file, a.loc.line, &a.code, a.loc.col, &a.message, a.severity).cmp(&(
            &b.loc.file,
            b.loc.line,
            &b.code,
            b.loc.col,
            &b.message,
            b.severity,
        ))
    });
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
