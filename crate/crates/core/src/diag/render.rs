use serde::Serialize;

use super::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Human,
    /// One JSON object per line.
    Machine,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Record<'a> {
    code: &'static str,
    severity: &'static str,
    category: String,
    file: &'a str,
    start_line: u32,
    start_col: u32,
    end_line: u32,
    end_col: u32,
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    actual: Option<&'a str>,
    suggestions: Vec<SuggestionRecord<'a>>,
}

#[derive(Serialize)]
struct SuggestionRecord<'a> {
    kind: &'static str,
    text: &'a str,
    score: f64,
}

/// Renders one diagnostic. `source` enables the excerpt in human mode.
pub fn render(d: &Diagnostic, mode: Mode, file: &str, source: Option<&str>) -> String {
    match mode {
        Mode::Machine => machine(d, file),
        Mode::Human => human(d, file, source),
    }
}

pub fn render_all(ds: &[Diagnostic], mode: Mode, file: &str, source: Option<&str>) -> String {
    let mut out = String::new();
    for d in ds {
        out.push_str(&render(d, mode, file, source));
        if mode == Mode::Human {
            out.push('\n');
        }
    }
    out
}

fn machine(d: &Diagnostic, file: &str) -> String {
    let rec = Record {
        code: d.category.code(),
        severity: d.severity.as_str(),
        category: d.category.to_string(),
        file,
        start_line: d.span.start.line,
        start_col: d.span.start.col,
        end_line: d.span.end.line,
        end_col: d.span.end.col,
        message: &d.message,
        expected: d.expected.as_deref(),
        actual: d.actual.as_deref(),
        suggestions: d
            .suggestions
            .iter()
            .map(|s| SuggestionRecord {
                kind: s.kind.as_str(),
                text: &s.text,
                score: s.score,
            })
            .collect(),
    };
    let mut line = serde_json::to_string(&rec).expect("records serialize");
    line.push('\n');
    line
}

fn human(d: &Diagnostic, file: &str, source: Option<&str>) -> String {
    let mut out = format!(
        "{}[{}]: {}: {}\n",
        d.severity.as_str(),
        d.category.code(),
        d.category,
        d.message
    );
    let (line, col) = (d.span.start.line, d.span.start.col);
    let gutter = line.to_string().len();
    let pad = " ".repeat(gutter);
    out.push_str(&format!("{pad}--> {file}:{line}:{col}\n"));
    if let Some(text) = source.and_then(|s| s.lines().nth(line.saturating_sub(1) as usize)) {
        let width = if d.span.end.line == line {
            d.span.end.col.saturating_sub(col).max(1) as usize
        } else {
            (text.chars().count() + 1).saturating_sub(col as usize).max(1)
        };
        out.push_str(&format!("{pad} |\n{line} | {text}\n"));
        out.push_str(&format!(
            "{pad} | {}{}\n",
            " ".repeat(col.saturating_sub(1) as usize),
            "^".repeat(width)
        ));
    }
    if let Some(cell) = &d.cell {
        out.push_str(&format!("{pad} = cell: row {}, column {:?}\n", cell.row, cell.column));
    }
    if let Some(e) = &d.expected {
        out.push_str(&format!("{pad} = expected: {e}\n"));
    }
    if let Some(a) = &d.actual {
        out.push_str(&format!("{pad} = actual: {a}\n"));
    }
    for n in &d.notes {
        out.push_str(&format!("{pad} = note: {n}\n"));
    }
    if !d.suggestions.is_empty() {
        out.push_str(&format!("{pad} = suggestions:\n"));
        for (i, s) in d.suggestions.iter().enumerate() {
            out.push_str(&format!("{pad}     {}. {}: {}\n", i + 1, s.kind.as_str(), s.text));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{Category, Suggestion, SuggestionKind};
    use super::*;
    use crate::lang::{Pos, Span};

    fn diag() -> Diagnostic {
        Diagnostic::error(
            Category::UnknownColumn,
            Span::new(0, Pos::new(2, 3), Pos::new(2, 23)),
            "column \"black and white\" is not in the header",
        )
        .with_suggestions(vec![Suggestion {
            kind: SuggestionKind::RewriteTo,
            text: r#"r["black"] and r["white"]"#.into(),
            score: 1.0,
        }])
    }

    #[test]
    fn machine_field_order() {
        let line = render(&diag(), Mode::Machine, "b.tbl", None);
        assert!(line.starts_with(r#"{"code":"E001","severity":"error","category":"UnknownColumn","file":"b.tbl","startLine":2,"startCol":3,"endLine":2,"endCol":23,"message":"#));
        assert!(line.ends_with("\"suggestions\":[{\"kind\":\"RewriteTo\",\"text\":\"r[\\\"black\\\"] and r[\\\"white\\\"]\",\"score\":1.0}]}\n"));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert!(v.get("expected").is_none());
    }

    #[test]
    fn human_excerpt_and_suggestions() {
        let src = "f = function(r):\n  r[\"black and white\"] == true\nend";
        let text = render(&diag(), Mode::Human, "b.tbl", Some(src));
        assert!(text.contains("error[E001]: UnknownColumn"));
        assert!(text.contains("--> b.tbl:2:3"));
        assert!(text.contains("2 |   r[\"black and white\"] == true"));
        assert!(text.contains("  |   ^^^^^^^^^^^^^^^^^^^^\n"));
        assert!(text.contains("1. RewriteTo: r[\"black\"] and r[\"white\"]"));
    }

    #[test]
    fn warning_without_suggestions_has_no_block() {
        let d = Diagnostic::warning(
            Category::UnusedBinding,
            Span::new(0, Pos::new(1, 1), Pos::new(1, 2)),
            "x is never used",
        );
        let text = render(&d, Mode::Human, "w.tbl", Some("x = 1"));
        assert!(text.starts_with("warning[W001]"));
        assert!(!text.contains("suggestions"));
    }
}
