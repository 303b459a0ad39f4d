//! The runtime data model: sorts, schemas, cells, tables and rows.

mod names;
mod sort;
mod table;
mod value;

pub use names::{name_append, name_prefix, name_split, ColName};
pub use sort::{Column, Schema, Sort};
pub use table::{name_literal, validate_table, Row, Table};
pub use value::{format_number, quote, Cell, Value};

use crate::error::Outcome;

pub fn header_of(t: &Table) -> Vec<ColName> {
    t.header()
}

pub fn schema_of(t: &Table) -> &Schema {
    t.schema()
}

pub fn nrows(t: &Table) -> usize {
    t.nrows()
}

pub fn ncols(t: &Table) -> usize {
    t.ncols()
}

pub fn get_row(t: &Table, i: usize) -> Outcome<Row> {
    t.row(i)
}

pub fn get_value<'r>(r: &'r Row, c: &str) -> Outcome<&'r Cell> {
    r.get(c)
}
