//! Reference implementations of the Table API operations.

use std::collections::HashMap;

use super::prng;
use super::SortKey;
use crate::error::{BenchError, ErrorKind, Outcome};
use crate::model::{Cell, ColName, Column, Row, Schema, Sort, Table, Value};

fn fail<T>(op: &str, kind: ErrorKind) -> Outcome<T> {
    Err(BenchError::contract(op, kind))
}

fn name(op: &str, text: &str) -> Outcome<ColName> {
    ColName::new(text).map_err(|e| e.in_operation(op))
}

fn require(op: &str, t: &Table, c: &str) -> Outcome<usize> {
    t.schema().require(c).map_err(|e| e.in_operation(op))
}

fn fresh(op: &str, t: &Table, c: &str) -> Outcome<ColName> {
    let n = name(op, c)?;
    if t.schema().contains(c) {
        return fail(op, ErrorKind::DuplicateColumn { name: c.to_string() });
    }
    Ok(n)
}

fn whole(op: &str, n: f64) -> Outcome<i64> {
    if n.fract() != 0.0 || !n.is_finite() {
        return fail(op, ErrorKind::NonIntegralIndex { value: n });
    }
    Ok(n as i64)
}

fn distinct(op: &str, cs: &[&str]) -> Outcome<()> {
    for (i, c) in cs.iter().enumerate() {
        if cs[..i].contains(c) {
            return fail(op, ErrorKind::DuplicateColumn { name: c.to_string() });
        }
    }
    Ok(())
}

/// A sort every value in `vs` conforms to. Values with no observable sort
/// (empty sequences) fall back to `hint`, then to `Number` at the leaves.
pub(crate) fn sort_of_values(vs: &[Value], hint: Option<&Sort>) -> Option<Sort> {
    if let Some(h) = hint {
        if vs.iter().all(|v| v.conforms(h)) {
            return Some(h.clone());
        }
    }
    let inferred = vs
        .iter()
        .find_map(Value::infer_sort)
        .unwrap_or_else(|| vs.first().map(default_sort).unwrap_or(Sort::Number));
    vs.iter().all(|v| v.conforms(&inferred)).then_some(inferred)
}

fn default_sort(v: &Value) -> Sort {
    match v {
        Value::Seq(items) => Sort::seq(items.first().map(default_sort).unwrap_or(Sort::Number)),
        other => other.infer_sort().expect("non-sequence values have a sort"),
    }
}

fn values_sort(op: &str, vs: &[Value], hint: Option<&Sort>) -> Outcome<Sort> {
    match sort_of_values(vs, hint) {
        Some(s) => Ok(s),
        None => {
            let first = vs.iter().find_map(Value::infer_sort).expect("some value has a sort");
            let (i, bad) = vs
                .iter()
                .enumerate()
                .find(|(_, v)| !v.conforms(&first))
                .expect("some value disagrees");
            fail(
                op,
                ErrorKind::ValueSortMismatch {
                    what: format!("element {i} of the values"),
                    expected: first.to_string(),
                    actual: bad.describe(),
                },
            )
        }
    }
}

fn with_column(t: &Table, col: Column, vs: Vec<Value>) -> Table {
    let mut columns = t.schema().columns().to_vec();
    columns.push(col);
    let rows = t
        .rows()
        .iter()
        .zip(vs)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(Cell::Present(v));
            r
        })
        .collect();
    Table::from_parts(Schema::new(columns).expect("fresh name"), rows)
}

pub fn add_column(t: &Table, c: &str, vs: &[Value], hint: Option<&Sort>) -> Outcome<Table> {
    const OP: &str = "addColumn";
    let n = fresh(OP, t, c)?;
    if vs.len() != t.nrows() {
        return fail(
            OP,
            ErrorKind::LengthMismatch {
                expected: t.nrows(),
                actual: vs.len(),
            },
        );
    }
    let sort = values_sort(OP, vs, hint)?;
    Ok(with_column(t, Column::new(n, sort), vs.to_vec()))
}

pub fn build_column(
    t: &Table,
    c: &str,
    f: &mut dyn FnMut(&Row, usize) -> Outcome<Value>,
    hint: Option<&Sort>,
) -> Outcome<Table> {
    const OP: &str = "buildColumn";
    let n = fresh(OP, t, c)?;
    let mut vs = Vec::with_capacity(t.nrows());
    for (i, row) in t.iter_rows().enumerate() {
        let v = f(&row, i).map_err(|mut e| {
            e.trace.push(format!("buildColumn, row {i}"));
            e
        })?;
        vs.push(v);
    }
    let sort = values_sort(OP, &vs, hint)?;
    Ok(with_column(t, Column::new(n, sort), vs))
}

fn pick_rows(t: &Table, idx: impl IntoIterator<Item = usize>) -> Table {
    let rows = idx.into_iter().map(|i| t.rows()[i].clone()).collect();
    Table::from_parts(t.schema().clone(), rows)
}

pub fn select_rows_by_index(t: &Table, ns: &[f64]) -> Outcome<Table> {
    const OP: &str = "selectRows";
    let mut idx = Vec::with_capacity(ns.len());
    for &n in ns {
        let i = whole(OP, n)?;
        if i < 0 || i as usize >= t.nrows() {
            return fail(
                OP,
                ErrorKind::RowIndexOutOfBounds {
                    index: i,
                    nrows: t.nrows(),
                },
            );
        }
        idx.push(i as usize);
    }
    Ok(pick_rows(t, idx))
}

pub fn select_rows_by_mask(t: &Table, bs: &[bool]) -> Outcome<Table> {
    if bs.len() != t.nrows() {
        return fail(
            "selectRows",
            ErrorKind::LengthMismatch {
                expected: t.nrows(),
                actual: bs.len(),
            },
        );
    }
    Ok(pick_rows(t, (0..t.nrows()).filter(|&i| bs[i])))
}

fn project(t: &Table, idx: &[usize]) -> Table {
    let columns = idx.iter().map(|&i| t.schema().columns()[i].clone()).collect();
    let rows = t
        .rows()
        .iter()
        .map(|r| idx.iter().map(|&i| r[i].clone()).collect())
        .collect();
    Table::from_parts(Schema::new(columns).expect("distinct"), rows)
}

pub fn select_columns(t: &Table, cs: &[&str]) -> Outcome<Table> {
    const OP: &str = "selectColumns";
    let idx = cs.iter().map(|c| require(OP, t, c)).collect::<Outcome<Vec<_>>>()?;
    distinct(OP, cs)?;
    Ok(project(t, &idx))
}

pub fn drop_columns(t: &Table, cs: &[&str]) -> Outcome<Table> {
    const OP: &str = "dropColumns";
    let dropped = cs.iter().map(|c| require(OP, t, c)).collect::<Outcome<Vec<_>>>()?;
    distinct(OP, cs)?;
    let keep: Vec<usize> = (0..t.ncols()).filter(|i| !dropped.contains(i)).collect();
    Ok(project(t, &keep))
}

pub fn head(t: &Table, n: f64) -> Outcome<Table> {
    const OP: &str = "head";
    let k = whole(OP, n)?;
    if k < 0 || k as usize > t.nrows() {
        return fail(OP, ErrorKind::HeadOutOfRange { n, nrows: t.nrows() });
    }
    Ok(pick_rows(t, 0..k as usize))
}

/// Natural order on orderable values: numbers numerically, text by code
/// point, `false < true`.
pub fn natural_cmp(a: &Value, b: &Value) -> std::cmp::Ordering {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => x.total_cmp(y),
        (Value::Boolean(x), Value::Boolean(y)) => x.cmp(y),
        _ => a.as_text().cmp(&b.as_text()),
    }
}

pub fn tsort(t: &Table, c: &str, ascending: bool) -> Outcome<Table> {
    const OP: &str = "tsort";
    let ci = require(OP, t, c)?;
    let col = &t.schema().columns()[ci];
    if !col.sort.is_orderable() {
        return fail(
            OP,
            ErrorKind::UnsortableSort {
                column: c.to_string(),
                sort: col.sort.clone(),
            },
        );
    }
    let mut keys = Vec::with_capacity(t.nrows());
    for (r, cell) in t.column_cells(ci).enumerate() {
        match cell {
            Cell::Present(v) => keys.push((r, v)),
            Cell::Missing => {
                return fail(
                    OP,
                    ErrorKind::MissingCell {
                        column: c.to_string(),
                        row: r,
                    },
                )
            }
        }
    }
    keys.sort_by(|(_, a), (_, b)| {
        let o = natural_cmp(a, b);
        if ascending {
            o
        } else {
            o.reverse()
        }
    });
    Ok(pick_rows(t, keys.into_iter().map(|(r, _)| r)))
}

pub fn order_by(t: &Table, spec: &mut [SortKey<'_>]) -> Outcome<Table> {
    const OP: &str = "orderBy";
    if spec.is_empty() {
        return fail(OP, ErrorKind::EmptySortSpec);
    }
    let mut keys: Vec<Vec<Value>> = Vec::with_capacity(t.nrows());
    for (i, row) in t.iter_rows().enumerate() {
        let mut ks = Vec::with_capacity(spec.len());
        for k in spec.iter_mut() {
            ks.push((k.get_key)(&row).map_err(|mut e| {
                e.trace.push(format!("orderBy key, row {i}"));
                e
            })?);
        }
        keys.push(ks);
    }
    let mut less = |a: usize, b: usize| -> Outcome<bool> {
        for (k, pair) in spec.iter_mut().enumerate() {
            let ab = (pair.compare)(&keys[a][k], &keys[b][k])?;
            let ba = (pair.compare)(&keys[b][k], &keys[a][k])?;
            match (ab, ba) {
                (true, true) => return fail(OP, ErrorKind::InvalidComparator),
                (true, false) => return Ok(true),
                (false, true) => return Ok(false),
                (false, false) => {}
            }
        }
        Ok(false)
    };
    let order = merge_sort((0..t.nrows()).collect(), &mut less)?;
    Ok(pick_rows(t, order))
}

/// Stable top-down merge sort with a fallible strict comparator.
fn merge_sort(
    v: Vec<usize>,
    less: &mut dyn FnMut(usize, usize) -> Outcome<bool>,
) -> Outcome<Vec<usize>> {
    if v.len() <= 1 {
        return Ok(v);
    }
    let mid = v.len() / 2;
    let right = merge_sort(v[mid..].to_vec(), less)?;
    let left = merge_sort(v[..mid].to_vec(), less)?;
    let mut out = Vec::with_capacity(v.len());
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if less(right[j], left[i])? {
            out.push(right[j]);
            j += 1;
        } else {
            out.push(left[i]);
            i += 1;
        }
    }
    out.extend_from_slice(&left[i..]);
    out.extend_from_slice(&right[j..]);
    Ok(out)
}

pub fn vcat(t1: &Table, t2: &Table) -> Outcome<Table> {
    if t1.schema() != t2.schema() {
        return fail(
            "vcat",
            ErrorKind::SchemaMismatch {
                left: t1.schema().to_string(),
                right: t2.schema().to_string(),
            },
        );
    }
    let rows = t1.rows().iter().chain(t2.rows()).cloned().collect();
    Ok(Table::from_parts(t1.schema().clone(), rows))
}

pub fn hcat(t1: &Table, t2: &Table) -> Outcome<Table> {
    const OP: &str = "hcat";
    if t1.nrows() != t2.nrows() {
        return fail(
            OP,
            ErrorKind::LengthMismatch {
                expected: t1.nrows(),
                actual: t2.nrows(),
            },
        );
    }
    if let Some(c) = t2.schema().columns().iter().find(|c| t1.schema().contains(c.name.as_str())) {
        return fail(OP, ErrorKind::DuplicateColumn { name: c.name.to_string() });
    }
    let columns = t1.schema().columns().iter().chain(t2.schema().columns()).cloned().collect();
    let rows = t1
        .rows()
        .iter()
        .zip(t2.rows())
        .map(|(a, b)| a.iter().chain(b).cloned().collect())
        .collect();
    Ok(Table::from_parts(Schema::new(columns).expect("disjoint"), rows))
}

/// The name `base` with `_2` appended until it is not in `taken`.
pub fn disambiguate(base: &str, taken: &[Column]) -> String {
    let mut n = base.to_string();
    while taken.iter().any(|c| c.name == *n.as_str()) {
        n.push_str("_2");
    }
    n
}

pub fn left_join(t1: &Table, t2: &Table, c: &str) -> Outcome<Table> {
    const OP: &str = "leftJoin";
    let li = require(OP, t1, c)?;
    let ri = require(OP, t2, c)?;
    let (lc, rc) = (&t1.schema().columns()[li], &t2.schema().columns()[ri]);
    if lc.sort != rc.sort {
        return fail(
            OP,
            ErrorKind::ColumnSortMismatch {
                column: c.to_string(),
                expected: lc.sort.to_string(),
                actual: rc.sort.to_string(),
            },
        );
    }
    for (col, t) in [(lc, "left"), (rc, "right")] {
        if col.optional {
            return fail(
                OP,
                ErrorKind::ColumnSortMismatch {
                    column: c.to_string(),
                    expected: format!("a non-optional key in the {t} table"),
                    actual: format!("{}?", col.sort),
                },
            );
        }
    }
    let mut lookup: Vec<(&Value, usize)> = Vec::new();
    for (r, cell) in t2.column_cells(ri).enumerate() {
        let v = cell.value().expect("non-optional");
        if lookup.iter().any(|(k, _)| *k == v) {
            return fail(OP, ErrorKind::DuplicateRightKey { key: v.to_literal() });
        }
        lookup.push((v, r));
    }
    let mut columns = t1.schema().columns().to_vec();
    let right: Vec<usize> = (0..t2.ncols()).filter(|&i| i != ri).collect();
    for &i in &right {
        let col = &t2.schema().columns()[i];
        let n = disambiguate(col.name.as_str(), &columns);
        columns.push(Column::optional(ColName::new(n).expect("non-empty"), col.sort.clone()));
    }
    let rows = t1
        .rows()
        .iter()
        .map(|row| {
            let key = row[li].value().expect("non-optional");
            let matched = lookup.iter().find(|(k, _)| *k == key).map(|(_, r)| &t2.rows()[*r]);
            let mut out = row.clone();
            for &i in &right {
                out.push(matched.map(|m| m[i].clone()).unwrap_or(Cell::Missing));
            }
            out
        })
        .collect();
    Ok(Table::from_parts(Schema::new(columns).expect("disambiguated"), rows))
}

pub fn pivot_longer(t: &Table, cs: &[&str], names_to: &str, values_to: &str) -> Outcome<Table> {
    const OP: &str = "pivotLonger";
    if cs.is_empty() {
        return fail(OP, ErrorKind::EmptyInput);
    }
    let idx = cs.iter().map(|c| require(OP, t, c)).collect::<Outcome<Vec<_>>>()?;
    distinct(OP, cs)?;
    let cols = t.schema().columns();
    let sort = cols[idx[0]].sort.clone();
    if let Some(&i) = idx.iter().find(|&&i| cols[i].sort != sort) {
        return fail(
            OP,
            ErrorKind::ColumnSortMismatch {
                column: cols[i].name.to_string(),
                expected: sort.to_string(),
                actual: cols[i].sort.to_string(),
            },
        );
    }
    let nn = name(OP, names_to)?;
    let vn = name(OP, values_to)?;
    let keep: Vec<usize> = (0..t.ncols()).filter(|i| !idx.contains(i)).collect();
    for n in [names_to, values_to] {
        if keep.iter().any(|&i| cols[i].name == *n) {
            return fail(OP, ErrorKind::NameClash { name: n.to_string() });
        }
    }
    if names_to == values_to {
        return fail(OP, ErrorKind::NameClash { name: names_to.to_string() });
    }
    let optional = idx.iter().any(|&i| cols[i].optional);
    let mut columns: Vec<Column> = keep.iter().map(|&i| cols[i].clone()).collect();
    columns.push(Column::new(nn, Sort::ColName));
    columns.push(Column {
        name: vn,
        sort,
        optional,
    });
    let mut rows = Vec::with_capacity(t.nrows() * idx.len());
    for row in t.rows() {
        for &i in &idx {
            let mut out: Vec<Cell> = keep.iter().map(|&k| row[k].clone()).collect();
            out.push(Cell::Present(Value::ColName(cols[i].name.clone())));
            out.push(row[i].clone());
            rows.push(out);
        }
    }
    Ok(Table::from_parts(Schema::new(columns).expect("checked"), rows))
}

pub fn pivot_wider(t: &Table, names_from: &str, values_from: &str) -> Outcome<Table> {
    const OP: &str = "pivotWider";
    let ni = require(OP, t, names_from)?;
    let vi = require(OP, t, values_from)?;
    if ni == vi {
        return fail(OP, ErrorKind::DuplicateColumn { name: names_from.to_string() });
    }
    let cols = t.schema().columns();
    if !matches!(cols[ni].sort, Sort::ColName | Sort::String) {
        return fail(
            OP,
            ErrorKind::ColumnSortMismatch {
                column: names_from.to_string(),
                expected: "ColName or String".into(),
                actual: cols[ni].sort.to_string(),
            },
        );
    }
    let keep: Vec<usize> = (0..t.ncols()).filter(|&i| i != ni && i != vi).collect();
    let mut names: Vec<String> = Vec::new();
    let mut keys: Vec<Vec<Cell>> = Vec::new();
    let mut cells: HashMap<(usize, usize), Cell> = HashMap::new();
    for (r, row) in t.rows().iter().enumerate() {
        let n = match &row[ni] {
            Cell::Missing => {
                return fail(
                    OP,
                    ErrorKind::MissingName {
                        column: names_from.to_string(),
                        row: r,
                    },
                )
            }
            Cell::Present(v) => v.as_text().expect("textual sort").to_string(),
        };
        let key: Vec<Cell> = keep.iter().map(|&k| row[k].clone()).collect();
        let ki = match keys.iter().position(|k| *k == key) {
            Some(p) => p,
            None => {
                keys.push(key);
                keys.len() - 1
            }
        };
        let nidx = match names.iter().position(|x| *x == n) {
            Some(p) => p,
            None => {
                name(OP, &n)?;
                if keep.iter().any(|&k| cols[k].name == *n.as_str()) {
                    return fail(OP, ErrorKind::NameClash { name: n });
                }
                names.push(n.clone());
                names.len() - 1
            }
        };
        if cells.insert((ki, nidx), row[vi].clone()).is_some() {
            let shown: Vec<String> = keys[ki]
                .iter()
                .map(|c| c.value().map(Value::to_literal).unwrap_or_else(|| "_".into()))
                .collect();
            return fail(
                OP,
                ErrorKind::DuplicateCombination {
                    key: format!("({})", shown.join(", ")),
                    name: n,
                },
            );
        }
    }
    let mut columns: Vec<Column> = keep.iter().map(|&i| cols[i].clone()).collect();
    for (j, n) in names.iter().enumerate() {
        let complete = (0..keys.len()).all(|k| cells.contains_key(&(k, j)));
        columns.push(Column {
            name: ColName::new(n).expect("checked"),
            sort: cols[vi].sort.clone(),
            optional: cols[vi].optional || !complete,
        });
    }
    let rows = keys
        .into_iter()
        .enumerate()
        .map(|(k, mut key)| {
            for j in 0..names.len() {
                key.push(cells.remove(&(k, j)).unwrap_or(Cell::Missing));
            }
            key
        })
        .collect();
    Ok(Table::from_parts(Schema::new(columns).expect("checked"), rows))
}

fn group_by(op: &str, t: &Table, c: &str, retain_key: bool) -> Outcome<Table> {
    let ci = require(op, t, c)?;
    let mut keys: Vec<&Value> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (r, cell) in t.column_cells(ci).enumerate() {
        let Cell::Present(v) = cell else {
            return fail(
                op,
                ErrorKind::MissingCell {
                    column: c.to_string(),
                    row: r,
                },
            );
        };
        match keys.iter().position(|k| *k == v) {
            Some(g) => members[g].push(r),
            None => {
                keys.push(v);
                members.push(vec![r]);
            }
        }
    }
    let keep: Vec<usize> = (0..t.ncols()).filter(|&i| retain_key || i != ci).collect();
    let sub_schema = Schema::new(keep.iter().map(|&i| t.schema().columns()[i].clone()).collect())
        .expect("subset of a valid schema");
    let columns = vec![
        Column::new(ColName::new("key").expect("literal"), t.schema().columns()[ci].sort.clone()),
        Column::new(
            ColName::new("groups").expect("literal"),
            Sort::SubTable(sub_schema.clone()),
        ),
    ];
    let rows = keys
        .into_iter()
        .zip(members)
        .map(|(k, rs)| {
            let grid = rs
                .into_iter()
                .map(|r| keep.iter().map(|&i| t.rows()[r][i].clone()).collect())
                .collect();
            vec![
                Cell::Present(k.clone()),
                Cell::Present(Value::Table(Table::from_parts(sub_schema.clone(), grid))),
            ]
        })
        .collect();
    Ok(Table::from_parts(Schema::new(columns).expect("literal"), rows))
}

pub fn group_by_retentive(t: &Table, c: &str) -> Outcome<Table> {
    group_by("groupByRetentive", t, c, true)
}

pub fn group_by_subtractive(t: &Table, c: &str) -> Outcome<Table> {
    group_by("groupBySubtractive", t, c, false)
}

pub fn sample_rows(t: &Table, n: f64, seed: u32) -> Outcome<Table> {
    const OP: &str = "sampleRows";
    let k = whole(OP, n)?;
    if k < 0 || k as usize > t.nrows() {
        return fail(OP, ErrorKind::SampleTooLarge { n, nrows: t.nrows() });
    }
    let idx = prng::sample_indices(t.nrows(), k as usize, seed).map_err(|e| e.in_operation(OP))?;
    Ok(pick_rows(t, idx))
}

fn number_column(op: &str, t: &Table, c: &str) -> Outcome<usize> {
    let i = require(op, t, c)?;
    let sort = &t.schema().columns()[i].sort;
    if *sort != Sort::Number {
        return fail(
            op,
            ErrorKind::ColumnSortMismatch {
                column: c.to_string(),
                expected: Sort::Number.to_string(),
                actual: sort.to_string(),
            },
        );
    }
    Ok(i)
}

pub fn dot_product(t: &Table, c1: &str, c2: &str) -> Outcome<f64> {
    const OP: &str = "dotProduct";
    let a = number_column(OP, t, c1)?;
    let b = number_column(OP, t, c2)?;
    let mut sum = 0.0;
    for (r, row) in t.rows().iter().enumerate() {
        let get = |i: usize, c: &str| match &row[i] {
            Cell::Present(Value::Number(x)) => Ok(*x),
            _ => fail(
                OP,
                ErrorKind::MissingCell {
                    column: c.to_string(),
                    row: r,
                },
            ),
        };
        let x = get(a, c1)?;
        let y = get(b, c2)?;
        sum += x * y;
    }
    Ok(sum)
}

pub fn get_column(t: &Table, c: &str) -> Outcome<Vec<Value>> {
    const OP: &str = "getColumn";
    let i = require(OP, t, c)?;
    t.column_cells(i)
        .enumerate()
        .map(|(r, cell)| match cell {
            Cell::Present(v) => Ok(v.clone()),
            Cell::Missing => fail(
                OP,
                ErrorKind::MissingCell {
                    column: c.to_string(),
                    row: r,
                },
            ),
        })
        .collect()
}
