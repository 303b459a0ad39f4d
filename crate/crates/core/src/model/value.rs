use std::fmt;

use crate::model::{ColName, Sort, Table};

/// Data that can live in a cell.
///
/// Sequences are untyped vectors whose elements share one sort; the empty
/// sequence conforms to every `Seq` sort.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Boolean(bool),
    String(String),
    ColName(ColName),
    Seq(Vec<Value>),
    Table(Table),
}

impl Value {
    pub fn string(s: impl Into<String>) -> Value {
        Value::String(s.into())
    }

    /// The most specific sort this value determines. Returns `None` only
    /// for sequences whose element sort cannot be observed (empty, or
    /// nested empties).
    pub fn infer_sort(&self) -> Option<Sort> {
        Some(match self {
            Value::Number(_) => Sort::Number,
            Value::Boolean(_) => Sort::Boolean,
            Value::String(_) => Sort::String,
            Value::ColName(_) => Sort::ColName,
            Value::Table(t) => Sort::SubTable(t.schema().clone()),
            Value::Seq(items) => Sort::seq(items.iter().find_map(Value::infer_sort)?),
        })
    }

    pub fn conforms(&self, sort: &Sort) -> bool {
        match (self, sort) {
            (Value::Number(_), Sort::Number)
            | (Value::Boolean(_), Sort::Boolean)
            | (Value::String(_), Sort::String)
            | (Value::ColName(_), Sort::ColName) => true,
            (Value::Seq(items), Sort::Seq(elem)) => items.iter().all(|v| v.conforms(elem)),
            (Value::Table(t), Sort::SubTable(schema)) => t.schema() == schema,
            _ => false,
        }
    }

    /// A short description of the value's shape for error messages.
    pub fn describe(&self) -> String {
        match self.infer_sort() {
            Some(sort) => format!("{sort} {}", self.to_literal()),
            None => "empty sequence".to_string(),
        }
    }

    /// Text of string-like values (strings and column names).
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::String(s) => Some(s),
            Value::ColName(n) => Some(n.as_str()),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Boolean(b) => Some(*b),
            _ => None,
        }
    }

    /// Source-language literal for this value. Column names render as
    /// string literals; sub-tables as nested table literals.
    pub fn to_literal(&self) -> String {
        match self {
            Value::Number(n) => format_number(*n),
            Value::Boolean(b) => b.to_string(),
            Value::String(s) => quote(s),
            Value::ColName(n) => quote(n.as_str()),
            Value::Seq(items) => {
                let inner: Vec<String> = items.iter().map(Value::to_literal).collect();
                format!("[{}]", inner.join(", "))
            }
            Value::Table(t) => t.to_literal(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::String(s) => f.write_str(s),
            Value::ColName(n) => f.write_str(n.as_str()),
            other => f.write_str(&other.to_literal()),
        }
    }
}

/// Whole numbers print without a fractional part; everything else uses the
/// shortest round-tripping decimal.
pub fn format_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        if n == 0.0 {
            "0".to_string()
        } else {
            format!("{}", n as i64)
        }
    } else {
        format!("{n}")
    }
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A cell is either empty or holds a value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Missing,
    Present(Value),
}

impl Cell {
    pub fn value(&self) -> Option<&Value> {
        match self {
            Cell::Present(v) => Some(v),
            Cell::Missing => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

impl From<Value> for Cell {
    fn from(v: Value) -> Self {
        Cell::Present(v)
    }
}

impl From<f64> for Cell {
    fn from(n: f64) -> Self {
        Cell::Present(Value::Number(n))
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Present(Value::Boolean(b))
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Present(Value::String(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(8.25), "8.25");
        assert_eq!(format_number(12.0), "12");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(0.05), "0.05");
    }

    #[test]
    fn empty_seq_conforms_to_any_seq() {
        let v = Value::Seq(vec![]);
        assert!(v.conforms(&Sort::seq(Sort::Number)));
        assert!(v.conforms(&Sort::seq(Sort::String)));
        assert!(!v.conforms(&Sort::Number));
        assert_eq!(v.infer_sort(), None);
    }

    #[test]
    fn quoting_escapes() {
        assert_eq!(quote(r#"a"b\c"#), r#""a\"b\\c""#);
    }
}
