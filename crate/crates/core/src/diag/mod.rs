//! Structured diagnostics: categories with stable codes, ranked
//! suggestions, and human or NDJSON rendering.

mod render;
mod suggest;

pub use render::{render, render_all, Mode};
pub use suggest::{
    damerau_levenshtein, detect_column_swap, detect_column_swap_in, rename_threshold, suggest_columns,
    suggest_columns_for,
};

use std::fmt;

use crate::error::{BenchError, ErrorKind};
use crate::lang::{Span, SyntaxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

/// The closed set of diagnostic categories.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Category {
    UnknownColumn,
    DuplicateColumn,
    SortMismatch,
    LengthMismatch,
    RaggedRow,
    IllegalMissing,
    RowIndexOutOfBounds,
    HeterogeneousDynamicAccess,
    ArityMismatch,
    /// A violated requires or ensures clause, named by its sub-category.
    ContractViolation(String),
    ParseError,
    LexError,
    SwappedColumns,
    UnboundVariable,
    NonTableArgument,
    Recursion,
    UnusedBinding,
}

impl Category {
    pub fn code(&self) -> &'static str {
        match self {
            Category::UnknownColumn => "E001",
            Category::DuplicateColumn => "E002",
            Category::SortMismatch => "E003",
            Category::LengthMismatch => "E004",
            Category::RaggedRow => "E005",
            Category::IllegalMissing => "E006",
            Category::RowIndexOutOfBounds => "E007",
            Category::HeterogeneousDynamicAccess => "E008",
            Category::ArityMismatch => "E009",
            Category::ContractViolation(_) => "E010",
            Category::ParseError => "E011",
            Category::LexError => "E012",
            Category::SwappedColumns => "E013",
            Category::UnboundVariable => "E014",
            Category::NonTableArgument => "E015",
            Category::Recursion => "E016",
            Category::UnusedBinding => "W001",
        }
    }

    /// Parses the rendered name back, as written in manifests.
    pub fn parse(s: &str) -> Option<Category> {
        if let Some(sub) = s.strip_prefix("ContractViolation(").and_then(|r| r.strip_suffix(')')) {
            return Some(Category::ContractViolation(sub.to_string()));
        }
        Some(match s {
            "UnknownColumn" => Category::UnknownColumn,
            "DuplicateColumn" => Category::DuplicateColumn,
            "SortMismatch" => Category::SortMismatch,
            "LengthMismatch" => Category::LengthMismatch,
            "RaggedRow" => Category::RaggedRow,
            "IllegalMissing" => Category::IllegalMissing,
            "RowIndexOutOfBounds" => Category::RowIndexOutOfBounds,
            "HeterogeneousDynamicAccess" => Category::HeterogeneousDynamicAccess,
            "ArityMismatch" => Category::ArityMismatch,
            "ParseError" => Category::ParseError,
            "LexError" => Category::LexError,
            "SwappedColumns" => Category::SwappedColumns,
            "UnboundVariable" => Category::UnboundVariable,
            "NonTableArgument" => Category::NonTableArgument,
            "Recursion" => Category::Recursion,
            "UnusedBinding" => Category::UnusedBinding,
            _ => return None,
        })
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::ContractViolation(sub) => write!(f, "ContractViolation({sub})"),
            other => write!(f, "{other:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SuggestionKind {
    RenameTo,
    RewriteTo,
    /// `perm[j]` is the data column that belongs under header column `j`.
    ReorderColumns(Vec<usize>),
}

impl SuggestionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SuggestionKind::RenameTo => "RenameTo",
            SuggestionKind::RewriteTo => "RewriteTo",
            SuggestionKind::ReorderColumns(_) => "ReorderColumns",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suggestion {
    pub kind: SuggestionKind,
    pub text: String,
    /// In `(0, 1]`; higher is better.
    pub score: f64,
}

/// A cell of a table literal in user coordinates: 1-based data row
/// (header excluded) and column name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellRef {
    pub row: usize,
    pub column: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub category: Category,
    pub span: Span,
    pub message: String,
    pub expected: Option<String>,
    pub actual: Option<String>,
    pub suggestions: Vec<Suggestion>,
    pub cell: Option<CellRef>,
    pub notes: Vec<String>,
}

impl Diagnostic {
    pub fn error(category: Category, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            category,
            span,
            message: message.into(),
            expected: None,
            actual: None,
            suggestions: Vec::new(),
            cell: None,
            notes: Vec::new(),
        }
    }

    pub fn warning(category: Category, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(category, span, message)
        }
    }

    pub fn expected(mut self, e: impl Into<String>, a: impl Into<String>) -> Self {
        self.expected = Some(e.into());
        self.actual = Some(a.into());
        self
    }

    pub fn with_suggestions(mut self, mut s: Vec<Suggestion>) -> Self {
        self.suggestions.append(&mut s);
        self.suggestions
            .sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(std::cmp::Ordering::Equal));
        self
    }

    pub fn at_cell(mut self, row: usize, column: impl Into<String>) -> Self {
        self.cell = Some(CellRef {
            row,
            column: column.into(),
        });
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    pub fn from_syntax(e: &SyntaxError) -> Self {
        match e {
            SyntaxError::Lex { span, .. } => Diagnostic::error(Category::LexError, *span, e.to_string()),
            SyntaxError::Parse { span, expected, found } => {
                Diagnostic::error(Category::ParseError, *span, e.to_string())
                    .expected(expected.join(" or "), found.clone())
            }
        }
    }

    /// A runtime failure as a diagnostic. Contract violations keep the
    /// violated clause as sub-category.
    pub fn from_runtime(e: &BenchError, fallback: Span) -> Self {
        let category = if e.is_contract_violation() {
            Category::ContractViolation(e.kind.name().to_string())
        } else {
            match &e.kind {
                ErrorKind::UnknownColumn { .. } => Category::UnknownColumn,
                ErrorKind::DuplicateColumn { .. } => Category::DuplicateColumn,
                ErrorKind::CellSortMismatch { .. }
                | ErrorKind::ColumnSortMismatch { .. }
                | ErrorKind::ValueSortMismatch { .. } => Category::SortMismatch,
                ErrorKind::LengthMismatch { .. } => Category::LengthMismatch,
                ErrorKind::RaggedRow { .. } => Category::RaggedRow,
                ErrorKind::IllegalMissing { .. } => Category::IllegalMissing,
                ErrorKind::RowIndexOutOfBounds { .. } | ErrorKind::SeqIndexOutOfBounds { .. } => {
                    Category::RowIndexOutOfBounds
                }
                ErrorKind::ArityMismatch { .. } => Category::ArityMismatch,
                ErrorKind::UnboundVariable { .. } => Category::UnboundVariable,
                ErrorKind::CallDepth { .. } => Category::Recursion,
                other => Category::ContractViolation(other.name().to_string()),
            }
        };
        let mut message = match &e.operation {
            Some(op) => format!("{op}: {}", e.kind),
            None => e.kind.to_string(),
        };
        if let ErrorKind::UnknownColumn { name, header } = &e.kind {
            let d = Diagnostic::error(category.clone(), e.span.unwrap_or(fallback), "")
                .with_suggestions(suggest_columns(name, header));
            if let Some(s) = d.suggestions.first() {
                message.push_str(&format!(" (did you mean {}?)", s.text));
            }
        }
        let mut d = Diagnostic::error(category, e.span.unwrap_or(fallback), message);
        d.notes = e.trace.iter().map(|t| format!("in {t}")).collect();
        d
    }
}

/// Sorts by position (then severity, code and message) and drops exact
/// duplicates.
pub fn normalize(diags: &mut Vec<Diagnostic>) {
    diags.sort_by(|a, b| {
        (a.span.file, a.span.start, a.severity, a.category.code(), &a.message)
            .cmp(&(b.span.file, b.span.start, b.severity, b.category.code(), &b.message))
    });
    diags.dedup_by(|a, b| a == b);
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_distinct() {
        let all = [
            Category::UnknownColumn,
            Category::DuplicateColumn,
            Category::SortMismatch,
            Category::LengthMismatch,
            Category::RaggedRow,
            Category::IllegalMissing,
            Category::RowIndexOutOfBounds,
            Category::HeterogeneousDynamicAccess,
            Category::ArityMismatch,
            Category::ContractViolation("MissingCell".into()),
            Category::ParseError,
            Category::LexError,
            Category::SwappedColumns,
            Category::UnboundVariable,
            Category::NonTableArgument,
            Category::Recursion,
            Category::UnusedBinding,
        ];
        let mut codes: Vec<_> = all.iter().map(Category::code).collect();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), all.len());
        for c in &all {
            assert_eq!(Category::parse(&c.to_string()).as_ref(), Some(c));
        }
    }
}
