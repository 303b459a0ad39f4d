//! RFC 4180 CSV ingestion.
//!
//! The first record is the header. An empty field is a missing cell. Without
//! a schema each column's sort is inferred: Number if every present field
//! parses as a number, else Boolean if every present field is `true` or
//! `false`, else String. A column with any empty field is optional.
//!
//! Diagnostics point at the CSV line of the record and the 1-based field
//! number within it.

use crate::diag::{Category, Diagnostic};
use crate::lang::{parse_header_line, tokenize, Pos, Span};
use crate::model::{validate_table, Cell, ColName, Column, Sort, Table, Value};

/// Parses a schema sidecar: one header line in table-literal syntax, every
/// column annotated, e.g. `name: String | quiz1: Number?`.
pub fn parse_schema(text: &str) -> Result<Vec<Column>, Diagnostic> {
    let tokens = tokenize(text.trim()).map_err(|e| Diagnostic::from_syntax(&e))?;
    let cells = parse_header_line(&tokens).map_err(|e| Diagnostic::from_syntax(&e))?;
    let mut columns = Vec::with_capacity(cells.len());
    for h in cells {
        let Some(sort) = h.sort else {
            return Err(Diagnostic::error(
                Category::ParseError,
                h.span,
                format!("column {:?} needs a sort", h.name),
            ));
        };
        let name = ColName::new(&h.name)
            .map_err(|e| Diagnostic::error(Category::ContractViolation("EmptyName".into()), h.span, e.to_string()))?;
        columns.push(Column {
            name,
            sort,
            optional: h.optional,
        });
    }
    Ok(columns)
}

fn at(line: u64, field: usize) -> Span {
    let p = Pos::new(line as u32, field as u32 + 1);
    Span::new(0, p, Pos::new(p.line, p.col + 1))
}

struct Record {
    line: u64,
    fields: Vec<String>,
}

fn read_records(text: &str) -> Result<Vec<Record>, Diagnostic> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(1, |p| p.line());
            Diagnostic::error(Category::ParseError, at(line, 0), format!("malformed CSV: {e}"))
        })?;
        let line = rec.position().map_or(1, |p| p.line());
        out.push(Record {
            line,
            fields: rec.iter().map(str::to_string).collect(),
        });
    }
    Ok(out)
}

fn parse_number(s: &str) -> Option<f64> {
    let n: f64 = s.parse().ok()?;
    let plain = s.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'));
    (n.is_finite() && plain).then_some(if n == 0.0 { 0.0 } else { n })
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

fn infer(fields: &[&str]) -> Column {
    let present: Vec<&str> = fields.iter().copied().filter(|f| !f.is_empty()).collect();
    let sort = if present.is_empty() {
        Sort::String
    } else if present.iter().all(|f| parse_number(f).is_some()) {
        Sort::Number
    } else if present.iter().all(|f| parse_bool(f).is_some()) {
        Sort::Boolean
    } else {
        Sort::String
    };
    Column {
        name: ColName::new("_").expect("placeholder name"),
        sort,
        optional: present.len() < fields.len(),
    }
}

fn convert(field: &str, sort: &Sort) -> Option<Value> {
    match sort {
        Sort::Number => parse_number(field).map(Value::Number),
        Sort::Boolean => parse_bool(field).map(Value::Boolean),
        Sort::String => Some(Value::String(field.to_string())),
        _ => None,
    }
}

/// Reads CSV text into a table, inferring sorts or, when `schema` is
/// given, validating every cell against it.
pub fn import_csv(text: &str, schema: Option<&[Column]>) -> Result<Table, Diagnostic> {
    let records = read_records(text)?;
    let Some((head, body)) = records.split_first() else {
        return Err(Diagnostic::error(Category::ParseError, at(1, 0), "the CSV has no header record"));
    };
    let width = head.fields.len();
    for (i, name) in head.fields.iter().enumerate() {
        if name.is_empty() {
            return Err(Diagnostic::error(
                Category::ContractViolation("EmptyName".into()),
                at(head.line, i),
                "column names must not be empty",
            ));
        }
        if let Some(first) = head.fields[..i].iter().position(|n| n == name) {
            return Err(Diagnostic::error(
                Category::DuplicateColumn,
                at(head.line, i),
                format!("column {name:?} appears more than once"),
            )
            .note(format!("first defined as field {}", first + 1)));
        }
    }
    for (r, rec) in body.iter().enumerate() {
        if rec.fields.len() != width {
            return Err(Diagnostic::error(
                Category::RaggedRow,
                at(rec.line, rec.fields.len().min(width)),
                format!("record has {} fields but the header has {width}", rec.fields.len()),
            )
            .at_cell(r + 1, head.fields[rec.fields.len().min(width - 1)].clone()));
        }
    }

    let columns: Vec<Column> = match schema {
        Some(cols) => {
            let declared: Vec<&str> = cols.iter().map(|c| c.name.as_str()).collect();
            if declared != head.fields {
                let (i, name) = head
                    .fields
                    .iter()
                    .enumerate()
                    .find(|(i, n)| declared.get(*i) != Some(&n.as_str()))
                    .map(|(i, n)| (i, n.as_str()))
                    .unwrap_or((width.saturating_sub(1), ""));
                return Err(Diagnostic::error(
                    Category::UnknownColumn,
                    at(head.line, i),
                    format!("the CSV header does not match the schema at {name:?}"),
                )
                .expected(declared.join(", "), head.fields.join(", ")));
            }
            if let Some((i, c)) = cols
                .iter()
                .enumerate()
                .find(|(_, c)| !matches!(c.sort, Sort::Number | Sort::Boolean | Sort::String))
            {
                return Err(Diagnostic::error(
                    Category::SortMismatch,
                    at(head.line, i),
                    format!("column {:?} has sort {}, which CSV cannot hold", c.name.as_str(), c.sort),
                ));
            }
            cols.to_vec()
        }
        None => (0..width)
            .map(|c| {
                let fields: Vec<&str> = body.iter().map(|r| r.fields[c].as_str()).collect();
                Column {
                    name: ColName::new(&head.fields[c]).expect("checked non-empty"),
                    ..infer(&fields)
                }
            })
            .collect(),
    };

    let mut rows = Vec::with_capacity(body.len());
    for (r, rec) in body.iter().enumerate() {
        let mut row = Vec::with_capacity(width);
        for (c, (field, col)) in rec.fields.iter().zip(&columns).enumerate() {
            let cell = if field.is_empty() {
                if !col.optional {
                    return Err(Diagnostic::error(
                        Category::IllegalMissing,
                        at(rec.line, c),
                        format!("field is empty but column {:?} is not optional", col.name.as_str()),
                    )
                    .at_cell(r + 1, col.name.as_str()));
                }
                Cell::Missing
            } else {
                match convert(field, &col.sort) {
                    Some(v) => Cell::Present(v),
                    None => {
                        return Err(Diagnostic::error(
                            Category::SortMismatch,
                            at(rec.line, c),
                            format!("field {field:?} is not a {}", col.sort),
                        )
                        .expected(col.sort.to_string(), format!("{field:?}"))
                        .at_cell(r + 1, col.name.as_str()))
                    }
                }
            };
            row.push(cell);
        }
        rows.push(row);
    }
    validate_table(columns, rows).map_err(|e| Diagnostic::from_runtime(&e, at(head.line, 0)))
}
