use std::sync::Arc;

use crate::error::{BenchError, ErrorKind, Outcome};
use crate::model::{quote, Cell, ColName, Column, Schema, Value};

/// An immutable table: a schema plus a rectangular, row-major grid of
/// cells. Cloning is cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    schema: Arc<Schema>,
    rows: Arc<Vec<Vec<Cell>>>,
}

/// Checks every data-model invariant and builds the table.
///
/// The first violation in row-major scan order is reported, after the
/// header has been checked for duplicates.
pub fn validate_table(columns: Vec<Column>, rows: Vec<Vec<Cell>>) -> Outcome<Table> {
    let schema = Schema::new(columns)?;
    check_grid(&schema, &rows)?;
    Ok(Table {
        schema: Arc::new(schema),
        rows: Arc::new(rows),
    })
}

fn check_grid(schema: &Schema, rows: &[Vec<Cell>]) -> Outcome<()> {
    let width = schema.len();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(BenchError::new(ErrorKind::RaggedRow {
                row: r,
                expected: width,
                actual: row.len(),
            }));
        }
        for (c, (cell, col)) in row.iter().zip(schema.columns()).enumerate() {
            match cell {
                Cell::Missing if !col.optional => {
                    return Err(BenchError::new(ErrorKind::IllegalMissing { column: c, row: r }))
                }
                Cell::Present(v) if !v.conforms(&col.sort) => {
                    return Err(BenchError::new(ErrorKind::CellSortMismatch {
                        column: c,
                        row: r,
                        expected: col.sort.clone(),
                        actual: v.describe(),
                    }))
                }
                _ => {}
            }
        }
    }
    Ok(())
}

impl Table {
    pub fn new(schema: Schema, rows: Vec<Vec<Cell>>) -> Outcome<Table> {
        check_grid(&schema, &rows)?;
        Ok(Table {
            schema: Arc::new(schema),
            rows: Arc::new(rows),
        })
    }

    /// The table with no columns and no rows.
    pub fn empty() -> Table {
        Table {
            schema: Arc::new(Schema::empty()),
            rows: Arc::new(Vec::new()),
        }
    }

    /// Builds a table whose invariants the caller has already established.
    /// Debug builds re-check them.
    pub(crate) fn from_parts(schema: Schema, rows: Vec<Vec<Cell>>) -> Table {
        debug_assert!(check_grid(&schema, &rows).is_ok(), "invalid table");
        Table {
            schema: Arc::new(schema),
            rows: Arc::new(rows),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn header(&self) -> Vec<ColName> {
        self.schema.header()
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.schema.len()
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn cell(&self, column: usize, row: usize) -> &Cell {
        &self.rows[row][column]
    }

    pub fn row(&self, index: usize) -> Outcome<Row> {
        match self.rows.get(index) {
            Some(cells) => Ok(Row {
                schema: self.schema.clone(),
                cells: cells.clone(),
            }),
            None => Err(BenchError::new(ErrorKind::RowIndexOutOfBounds {
                index: index as i64,
                nrows: self.nrows(),
            })),
        }
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = Row> + '_ {
        self.rows.iter().map(|cells| Row {
            schema: self.schema.clone(),
            cells: cells.clone(),
        })
    }

    /// Cells of one column, top to bottom.
    pub fn column_cells(&self, column: usize) -> impl Iterator<Item = &Cell> + '_ {
        self.rows.iter().map(move |r| &r[column])
    }

    /// Renders the table as a `table: ... end` literal that parses back to
    /// an equal table.
    pub fn to_literal(&self) -> String {
        let mut out = String::new();
        self.write_literal(&mut out, 0);
        out
    }

    fn write_literal(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent + 1);
        out.push_str("table:\n");
        if !self.schema.is_empty() {
            out.push_str(&pad);
            let header: Vec<String> = self
                .schema
                .columns()
                .iter()
                .map(|c| {
                    let mut s = format!("{}: {}", name_literal(c.name.as_str()), c.sort);
                    if c.optional {
                        s.push('?');
                    }
                    s
                })
                .collect();
            out.push_str(&header.join(" | "));
            out.push('\n');
        }
        for row in self.rows.iter() {
            if row.is_empty() {
                continue;
            }
            out.push_str(&pad);
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                match cell {
                    Cell::Missing => out.push('_'),
                    Cell::Present(Value::Table(t)) => t.write_literal(out, indent + 1),
                    Cell::Present(v) => out.push_str(&v.to_literal()),
                }
            }
            out.push('\n');
        }
        out.push_str(&"  ".repeat(indent));
        out.push_str("end");
    }
}

const KEYWORDS: &[&str] = &[
    "function", "end", "for", "in", "if", "else", "and", "or", "not", "true", "false", "table",
    "println",
];

/// Column names are written bare when they lex as an identifier and
/// quoted otherwise.
pub fn name_literal(name: &str) -> String {
    let mut chars = name.chars();
    let ident = match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        _ => false,
    };
    if ident && name != "_" && !KEYWORDS.contains(&name) {
        name.to_string()
    } else {
        quote(name)
    }
}

/// One row of a table, carrying the table's schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    schema: Arc<Schema>,
    cells: Vec<Cell>,
}

impl Row {
    pub fn new(schema: Schema, cells: Vec<Cell>) -> Outcome<Row> {
        let t = Table::new(schema, vec![cells])?;
        t.row(0)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// The cell in the column named `name`.
    pub fn get(&self, name: &str) -> Outcome<&Cell> {
        let i = self.schema.require(name)?;
        Ok(&self.cells[i])
    }
}
