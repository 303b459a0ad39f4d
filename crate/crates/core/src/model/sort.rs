use std::fmt;

use crate::error::{BenchError, ErrorKind, Outcome};
use crate::model::ColName;

/// The kind of data a column holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sort {
    Number,
    Boolean,
    String,
    /// First-class column names stored as data (produced by `pivotLonger`).
    ColName,
    Seq(Box<Sort>),
    SubTable(Schema),
}

impl Sort {
    pub fn seq(elem: Sort) -> Sort {
        Sort::Seq(Box::new(elem))
    }

    /// Sorts with a natural total order, usable by `tsort`.
    pub fn is_orderable(&self) -> bool {
        matches!(self, Sort::Number | Sort::String | Sort::Boolean | Sort::ColName)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Number => f.write_str("Number"),
            Sort::Boolean => f.write_str("Boolean"),
            Sort::String => f.write_str("String"),
            Sort::ColName => f.write_str("ColName"),
            Sort::Seq(elem) => write!(f, "Seq<{elem}>"),
            Sort::SubTable(schema) => write!(f, "Table<{schema}>"),
        }
    }
}

/// One schema entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Column {
    pub name: ColName,
    pub sort: Sort,
    /// Whether cells of this column may be empty.
    pub optional: bool,
}

impl Column {
    pub fn new(name: ColName, sort: Sort) -> Self {
        Column {
            name,
            sort,
            optional: false,
        }
    }

    pub fn optional(name: ColName, sort: Sort) -> Self {
        Column {
            name,
            sort,
            optional: true,
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", crate::model::name_literal(self.name.as_str()), self.sort)?;
        if self.optional {
            f.write_str("?")?;
        }
        Ok(())
    }
}

/// An ordered sequence of columns with pairwise distinct names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Schema {
    columns: Vec<Column>,
}

impl Schema {
    pub fn new(columns: Vec<Column>) -> Outcome<Schema> {
        for (i, col) in columns.iter().enumerate() {
            if columns[..i].iter().any(|c| c.name == col.name) {
                return Err(BenchError::new(ErrorKind::DuplicateColumn {
                    name: col.name.to_string(),
                }));
            }
        }
        Ok(Schema { columns })
    }

    pub fn empty() -> Schema {
        Schema::default()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn header(&self) -> Vec<ColName> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == *name)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == *name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Looks up a column or produces an `UnknownColumn` error listing the
    /// header.
    pub fn require(&self, name: &str) -> Outcome<usize> {
        self.index_of(name).ok_or_else(|| {
            BenchError::new(ErrorKind::UnknownColumn {
                name: name.to_string(),
                header: self.columns.iter().map(|c| c.name.to_string()).collect(),
            })
        })
    }

    pub fn into_columns(self) -> Vec<Column> {
        self.columns
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, col) in self.columns.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{col}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name(s: &str) -> ColName {
        ColName::new(s).unwrap()
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = Schema::new(vec![
            Column::new(name("a"), Sort::Number),
            Column::new(name("a"), Sort::String),
        ])
        .unwrap_err();
        assert_eq!(err.kind.name(), "DuplicateColumn");
    }

    #[test]
    fn display_nested() {
        let inner = Schema::new(vec![Column::optional(name("x"), Sort::Number)]).unwrap();
        assert_eq!(
            Sort::seq(Sort::SubTable(inner)).to_string(),
            "Seq<Table<x: Number?>>"
        );
    }
}
