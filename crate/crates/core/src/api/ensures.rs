//! Postconditions of the Table API, asserted on results in ensure-mode.

use crate::error::{BenchError, ErrorKind, Outcome};
use crate::model::{validate_table, Cell, ColName, Sort, Table, Value};

/// An operation together with the inputs it was applied to.
pub enum Call<'a> {
    AddColumn { t: &'a Table, c: &'a str, vs: &'a [Value] },
    BuildColumn { t: &'a Table, c: &'a str },
    SelectRowsByIndex { t: &'a Table, ns: &'a [f64] },
    SelectRowsByMask { t: &'a Table, bs: &'a [bool] },
    SelectColumns { t: &'a Table, cs: &'a [&'a str] },
    DropColumns { t: &'a Table, cs: &'a [&'a str] },
    Head { t: &'a Table, n: usize },
    Tsort { t: &'a Table, c: &'a str, ascending: bool },
    OrderBy { t: &'a Table },
    Vcat { t1: &'a Table, t2: &'a Table },
    Hcat { t1: &'a Table, t2: &'a Table },
    LeftJoin { t1: &'a Table, t2: &'a Table, c: &'a str },
    PivotLonger { t: &'a Table, cs: &'a [&'a str], names_to: &'a str, values_to: &'a str },
    PivotWider { t: &'a Table, names_from: &'a str, values_from: &'a str },
    GroupBy { t: &'a Table, c: &'a str, retentive: bool },
    SampleRows { t: &'a Table, n: usize },
}

impl Call<'_> {
    pub fn operation(&self) -> &'static str {
        match self {
            Call::AddColumn { .. } => "addColumn",
            Call::BuildColumn { .. } => "buildColumn",
            Call::SelectRowsByIndex { .. } | Call::SelectRowsByMask { .. } => "selectRows",
            Call::SelectColumns { .. } => "selectColumns",
            Call::DropColumns { .. } => "dropColumns",
            Call::Head { .. } => "head",
            Call::Tsort { .. } => "tsort",
            Call::OrderBy { .. } => "orderBy",
            Call::Vcat { .. } => "vcat",
            Call::Hcat { .. } => "hcat",
            Call::LeftJoin { .. } => "leftJoin",
            Call::PivotLonger { .. } => "pivotLonger",
            Call::PivotWider { .. } => "pivotWider",
            Call::GroupBy { retentive: true, .. } => "groupByRetentive",
            Call::GroupBy { retentive: false, .. } => "groupBySubtractive",
            Call::SampleRows { .. } => "sampleRows",
        }
    }
}

struct Checker<'a> {
    op: &'a str,
}

impl Checker<'_> {
    fn ensure(&self, holds: bool, clause: &str) -> Outcome<()> {
        if holds {
            Ok(())
        } else {
            Err(BenchError::contract(
                self.op,
                ErrorKind::EnsureViolation {
                    clause: clause.to_string(),
                },
            ))
        }
    }
}

fn names(cs: &[&str]) -> Vec<String> {
    cs.iter().map(|s| s.to_string()).collect()
}

fn header(t: &Table) -> Vec<String> {
    t.header().iter().map(ColName::to_string).collect()
}

fn is_permutation(a: &[Vec<Cell>], b: &[Vec<Cell>]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|row| {
        match (0..b.len()).find(|&j| !used[j] && b[j] == *row) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        }
    })
}

fn is_subsequence(sub: &[Vec<Cell>], full: &[Vec<Cell>]) -> bool {
    let mut it = full.iter();
    sub.iter().all(|r| it.any(|f| f == r))
}

/// Checks every postcondition of `call` against its result `out`.
pub fn check(call: &Call<'_>, out: &Table) -> Outcome<()> {
    let k = Checker {
        op: call.operation(),
    };
    k.ensure(
        validate_table(out.schema().columns().to_vec(), out.rows().to_vec()).is_ok(),
        "the result is a valid table",
    )?;
    match *call {
        Call::AddColumn { t, c, vs } => {
            let mut h = header(t);
            h.push(c.to_string());
            k.ensure(header(out) == h, "header(t2) is equal to concat(header(t1), [c])")?;
            k.ensure(
                out.schema().columns()[..t.ncols()] == *t.schema().columns(),
                "for all c' in header(t1), schema(t2)[c'] is equal to schema(t1)[c']",
            )?;
            let col = &out.schema().columns()[t.ncols()];
            k.ensure(
                !col.optional && vs.iter().all(|v| v.conforms(&col.sort)),
                "schema(t2)[c] is the sort of elements of vs",
            )?;
            k.ensure(
                out.column_cells(t.ncols()).zip(vs).all(|(cell, v)| cell.value() == Some(v)),
                "column c holds vs in order",
            )?;
            k.ensure(out.nrows() == t.nrows(), "nrows(t2) is equal to nrows(t1)")
        }
        Call::BuildColumn { t, c } => {
            let mut h = header(t);
            h.push(c.to_string());
            k.ensure(header(out) == h, "header(t2) is equal to concat(header(t1), [c])")?;
            k.ensure(
                out.schema().columns()[..t.ncols()] == *t.schema().columns(),
                "existing columns keep their sorts",
            )?;
            k.ensure(out.nrows() == t.nrows(), "nrows(t2) is equal to nrows(t1)")
        }
        Call::SelectRowsByIndex { t, ns } => {
            k.ensure(out.schema() == t.schema(), "schema(t2) is equal to schema(t1)")?;
            k.ensure(out.nrows() == ns.len(), "nrows(t2) is equal to length(ns)")?;
            k.ensure(
                ns.iter().zip(out.rows()).all(|(&n, r)| t.rows()[n as usize] == *r),
                "row j of t2 is row ns[j] of t1",
            )
        }
        Call::SelectRowsByMask { t, bs } => {
            k.ensure(out.schema() == t.schema(), "schema(t2) is equal to schema(t1)")?;
            let kept: Vec<Vec<Cell>> = t
                .rows()
                .iter()
                .zip(bs)
                .filter(|(_, &b)| b)
                .map(|(r, _)| r.clone())
                .collect();
            k.ensure(out.rows() == kept.as_slice(), "t2 keeps exactly the rows whose flag is true")
        }
        Call::SelectColumns { t, cs } => {
            k.ensure(header(out) == names(cs), "header(t2) is equal to cs")?;
            k.ensure(out.nrows() == t.nrows(), "nrows(t2) is equal to nrows(t1)")?;
            for (j, c) in cs.iter().enumerate() {
                let i = t.schema().index_of(c).unwrap_or(usize::MAX);
                k.ensure(
                    i != usize::MAX && out.schema().columns()[j] == t.schema().columns()[i],
                    "selected columns keep their sorts",
                )?;
                k.ensure(
                    out.column_cells(j).eq(t.column_cells(i)),
                    "selected columns keep their cells",
                )?;
            }
            Ok(())
        }
        Call::DropColumns { t, cs } => {
            let expected: Vec<String> = header(t).into_iter().filter(|n| !cs.contains(&n.as_str())).collect();
            k.ensure(header(out) == expected, "header(t2) is header(t1) without cs")?;
            k.ensure(out.nrows() == t.nrows(), "nrows(t2) is equal to nrows(t1)")
        }
        Call::Head { t, n } => {
            k.ensure(out.schema() == t.schema(), "schema(t2) is equal to schema(t1)")?;
            k.ensure(out.rows() == &t.rows()[..n.min(t.nrows())], "t2 is the first n rows of t1")
        }
        Call::Tsort { t, c, ascending } => {
            k.ensure(out.schema() == t.schema(), "schema(t2) is equal to schema(t1)")?;
            k.ensure(is_permutation(out.rows(), t.rows()), "t2 is a permutation of t1")?;
            let i = out.schema().index_of(c).unwrap_or(0);
            let keys: Vec<&Cell> = out.column_cells(i).collect();
            k.ensure(
                keys.windows(2).all(|w| match (w[0].value(), w[1].value()) {
                    (Some(a), Some(b)) => {
                        let o = super::natural_cmp(a, b);
                        if ascending {
                            o.is_le()
                        } else {
                            o.is_ge()
                        }
                    }
                    _ => false,
                }),
                "rows are ordered by column c",
            )
        }
        Call::OrderBy { t } => {
            k.ensure(out.schema() == t.schema(), "schema(t2) is equal to schema(t1)")?;
            k.ensure(is_permutation(out.rows(), t.rows()), "t2 is a permutation of t1")
        }
        Call::Vcat { t1, t2 } => {
            k.ensure(out.schema() == t1.schema(), "schema(t3) is equal to schema(t1)")?;
            k.ensure(out.nrows() == t1.nrows() + t2.nrows(), "nrows(t3) is nrows(t1) + nrows(t2)")?;
            k.ensure(
                out.rows()[..t1.nrows()] == *t1.rows() && out.rows()[t1.nrows()..] == *t2.rows(),
                "rows of t1 come before rows of t2",
            )
        }
        Call::Hcat { t1, t2 } => {
            let mut h = header(t1);
            h.extend(header(t2));
            k.ensure(header(out) == h, "header(t3) is concat(header(t1), header(t2))")?;
            k.ensure(out.ncols() == t1.ncols() + t2.ncols(), "ncols(t3) is ncols(t1) + ncols(t2)")?;
            k.ensure(out.nrows() == t1.nrows(), "nrows(t3) is equal to nrows(t1)")
        }
        Call::LeftJoin { t1, t2, c: _ } => {
            k.ensure(out.nrows() == t1.nrows(), "every row of t1 appears exactly once")?;
            k.ensure(
                out.ncols() == t1.ncols() + t2.ncols() - 1,
                "the key column of t2 is dropped",
            )?;
            k.ensure(
                out.schema().columns()[..t1.ncols()] == *t1.schema().columns(),
                "columns of t1 come first, unchanged",
            )?;
            k.ensure(
                out.rows().iter().zip(t1.rows()).all(|(o, r)| o[..t1.ncols()] == r[..]),
                "rows of t1 keep their order and cells",
            )?;
            k.ensure(
                out.schema().columns()[t1.ncols()..].iter().all(|c| c.optional),
                "columns from t2 are optional",
            )
        }
        Call::PivotLonger {
            t,
            cs,
            names_to,
            values_to,
        } => {
            k.ensure(out.nrows() == t.nrows() * cs.len(), "nrows(t2) is nrows(t1) * length(cs)")?;
            let mut h: Vec<String> = header(t).into_iter().filter(|n| !cs.contains(&n.as_str())).collect();
            h.push(names_to.to_string());
            h.push(values_to.to_string());
            k.ensure(header(out) == h, "header(t2) is the kept columns, namesTo and valuesTo")?;
            k.ensure(
                out.schema().columns()[out.ncols() - 2].sort == Sort::ColName,
                "namesTo holds column names",
            )
        }
        Call::PivotWider {
            t,
            names_from,
            values_from,
        } => {
            let keys: Vec<String> = header(t)
                .into_iter()
                .filter(|n| n != names_from && n != values_from)
                .collect();
            k.ensure(header(out)[..keys.len()] == keys[..], "key columns come first, in order")?;
            k.ensure(out.nrows() <= t.nrows(), "nrows(t2) is at most nrows(t1)")
        }
        Call::GroupBy { t, c, retentive } => {
            k.ensure(header(out) == ["key", "groups"], "header(t2) is [key, groups]")?;
            let mut all = Vec::new();
            for row in out.rows() {
                let (Some(key), Some(Value::Table(g))) = (row[0].value(), row[1].value()) else {
                    return k.ensure(false, "every group is a table");
                };
                k.ensure(g.nrows() > 0, "groups are non-empty")?;
                k.ensure(g.schema().contains(c) == retentive, "the key column is kept only by groupByRetentive")?;
                if retentive {
                    let i = g.schema().index_of(c).unwrap_or(0);
                    k.ensure(g.column_cells(i).all(|cell| cell.value() == Some(key)), "the key is constant within a group")?;
                }
                all.extend(g.rows().iter().cloned());
            }
            let ci = t.schema().index_of(c).unwrap_or(0);
            let expected: Vec<Vec<Cell>> = t
                .rows()
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(i, _)| retentive || i != ci)
                        .map(|(_, cell)| cell.clone())
                        .collect()
                })
                .collect();
            k.ensure(is_permutation(&all, &expected), "groups partition the rows of t1")
        }
        Call::SampleRows { t, n } => {
            k.ensure(out.schema() == t.schema(), "schema(t2) is equal to schema(t1)")?;
            k.ensure(out.nrows() == n, "nrows(t2) is equal to n")?;
            k.ensure(is_subsequence(out.rows(), t.rows()), "rows of t2 are a subsequence of t1")
        }
    }
}
