//! The Table API: operations over immutable tables with checked
//! preconditions, plus the postconditions that ensure-mode asserts.

pub mod ensures;
pub mod fisher;
mod ops;
pub mod prng;

pub use fisher::{fisher_exact, fisher_test};
pub use ops::*;
pub use prng::{prng_next, sample_indices};

use crate::error::Outcome;
use crate::model::{Row, Sort, Table, Value};

pub type KeyFn<'a> = Box<dyn FnMut(&Row) -> Outcome<Value> + 'a>;
pub type CompareFn<'a> = Box<dyn FnMut(&Value, &Value) -> Outcome<bool> + 'a>;

/// One `(getKey, compare)` pair of an `orderBy` specification.
pub struct SortKey<'a> {
    pub get_key: KeyFn<'a>,
    /// A strict "comes before" test on keys.
    pub compare: CompareFn<'a>,
}

/// The operations the evaluator dispatches through. Every method defaults
/// to the reference implementation; overriding one lets tests check that
/// ensure-mode catches a defective implementation.
pub trait TableOps: Send + Sync {
    fn add_column(&self, t: &Table, c: &str, vs: &[Value], hint: Option<&Sort>) -> Outcome<Table> {
        ops::add_column(t, c, vs, hint)
    }
    fn build_column(
        &self,
        t: &Table,
        c: &str,
        f: &mut dyn FnMut(&Row, usize) -> Outcome<Value>,
        hint: Option<&Sort>,
    ) -> Outcome<Table> {
        ops::build_column(t, c, f, hint)
    }
    fn select_rows_by_index(&self, t: &Table, ns: &[f64]) -> Outcome<Table> {
        ops::select_rows_by_index(t, ns)
    }
    fn select_rows_by_mask(&self, t: &Table, bs: &[bool]) -> Outcome<Table> {
        ops::select_rows_by_mask(t, bs)
    }
    fn select_columns(&self, t: &Table, cs: &[&str]) -> Outcome<Table> {
        ops::select_columns(t, cs)
    }
    fn drop_columns(&self, t: &Table, cs: &[&str]) -> Outcome<Table> {
        ops::drop_columns(t, cs)
    }
    fn head(&self, t: &Table, n: f64) -> Outcome<Table> {
        ops::head(t, n)
    }
    fn tsort(&self, t: &Table, c: &str, ascending: bool) -> Outcome<Table> {
        ops::tsort(t, c, ascending)
    }
    fn order_by(&self, t: &Table, spec: &mut [SortKey<'_>]) -> Outcome<Table> {
        ops::order_by(t, spec)
    }
    fn vcat(&self, t1: &Table, t2: &Table) -> Outcome<Table> {
        ops::vcat(t1, t2)
    }
    fn hcat(&self, t1: &Table, t2: &Table) -> Outcome<Table> {
        ops::hcat(t1, t2)
    }
    fn left_join(&self, t1: &Table, t2: &Table, c: &str) -> Outcome<Table> {
        ops::left_join(t1, t2, c)
    }
    fn pivot_longer(&self, t: &Table, cs: &[&str], names_to: &str, values_to: &str) -> Outcome<Table> {
        ops::pivot_longer(t, cs, names_to, values_to)
    }
    fn pivot_wider(&self, t: &Table, names_from: &str, values_from: &str) -> Outcome<Table> {
        ops::pivot_wider(t, names_from, values_from)
    }
    fn group_by_retentive(&self, t: &Table, c: &str) -> Outcome<Table> {
        ops::group_by_retentive(t, c)
    }
    fn group_by_subtractive(&self, t: &Table, c: &str) -> Outcome<Table> {
        ops::group_by_subtractive(t, c)
    }
    fn sample_rows(&self, t: &Table, n: f64, seed: u32) -> Outcome<Table> {
        ops::sample_rows(t, n, seed)
    }
    fn dot_product(&self, t: &Table, c1: &str, c2: &str) -> Outcome<f64> {
        ops::dot_product(t, c1, c2)
    }
    fn get_column(&self, t: &Table, c: &str) -> Outcome<Vec<Value>> {
        ops::get_column(t, c)
    }
}

/// The reference implementation.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardOps;

impl TableOps for StandardOps {}
