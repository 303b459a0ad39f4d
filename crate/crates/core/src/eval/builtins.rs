use super::{data, sort_error, unify_text, Interpreter, RtValue};
use crate::api::ensures::{self, Call};
use crate::api::{fisher_test, prng, SortKey};
use crate::error::{BenchError, ErrorKind, Outcome};
use crate::lang::Span;
use crate::model::{name_append, name_prefix, name_split, Cell, Row, Sort, Table, Value};

fn table(v: &RtValue, op: &str) -> Outcome<Table> {
    match v {
        RtValue::Data(Value::Table(t)) => Ok(t.clone()),
        RtValue::Missing => Err(BenchError::new(ErrorKind::MissingValue)),
        other => Err(sort_error(format!("{op}'s table argument"), "Table", other)),
    }
}

fn text(v: &RtValue, op: &str) -> Outcome<String> {
    match v {
        RtValue::Data(d) if d.as_text().is_some() => Ok(d.as_text().expect("textual").to_string()),
        RtValue::Missing => Err(BenchError::new(ErrorKind::MissingValue)),
        other => Err(sort_error(format!("{op}'s name argument"), "ColName", other)),
    }
}

fn number(v: &RtValue, op: &str) -> Outcome<f64> {
    match v {
        RtValue::Data(Value::Number(n)) => Ok(*n),
        RtValue::Missing => Err(BenchError::new(ErrorKind::MissingValue)),
        other => Err(sort_error(format!("{op}'s argument"), "Number", other)),
    }
}

fn boolean(v: &RtValue, op: &str) -> Outcome<bool> {
    match v {
        RtValue::Data(Value::Boolean(b)) => Ok(*b),
        RtValue::Missing => Err(BenchError::new(ErrorKind::MissingValue)),
        other => Err(sort_error(format!("{op}'s argument"), "Boolean", other)),
    }
}

fn seq(v: &RtValue, op: &str) -> Outcome<Vec<Value>> {
    match v {
        RtValue::Data(Value::Seq(items)) => Ok(items.clone()),
        RtValue::Missing => Err(BenchError::new(ErrorKind::MissingValue)),
        other => Err(sort_error(format!("{op}'s sequence argument"), "Seq", other)),
    }
}

fn texts(items: &[Value], op: &str) -> Outcome<Vec<String>> {
    items.iter().map(|v| text(&RtValue::Data(v.clone()), op)).collect()
}

fn numbers(items: &[Value], op: &str) -> Outcome<Vec<f64>> {
    items.iter().map(|v| number(&RtValue::Data(v.clone()), op)).collect()
}

fn booleans(items: &[Value], op: &str) -> Outcome<Vec<bool>> {
    items.iter().map(|v| boolean(&RtValue::Data(v.clone()), op)).collect()
}

fn whole(n: f64) -> Outcome<i64> {
    if n.fract() != 0.0 || !n.is_finite() {
        return Err(BenchError::new(ErrorKind::NonIntegralIndex { value: n }));
    }
    Ok(n as i64)
}

fn storable(v: RtValue, op: &str) -> Outcome<Value> {
    data(v, &format!("{op}'s value"))
}

fn same_text(a: &Value, b: &Value) -> bool {
    match (a.as_text(), b.as_text()) {
        (Some(x), Some(y)) => x == y,
        _ => a == b,
    }
}

/// Checks that every element agrees with the first observable sort.
fn homogeneous(items: &[Value], op: &str) -> Outcome<()> {
    if let Some(first) = items.iter().find_map(Value::infer_sort) {
        if let Some(bad) = items.iter().find(|v| !v.conforms(&first)) {
            return Err(BenchError::new(ErrorKind::ValueSortMismatch {
                what: format!("{op}'s elements"),
                expected: first.to_string(),
                actual: bad.describe(),
            }));
        }
    }
    Ok(())
}

fn seq_value(mut items: Vec<Value>, op: &str) -> Outcome<RtValue> {
    unify_text(&mut items);
    homogeneous(&items, op)?;
    Ok(RtValue::Data(Value::Seq(items)))
}

impl Interpreter<'_, '_> {
    /// The sort of the column a table-producing call appends, as the
    /// checker predicted it.
    fn hint(&self, span: Span) -> Option<Sort> {
        let tt = self.cfg.predictions?.get(span)?.first()?;
        match (&tt.rest, tt.columns.last()) {
            (Some(r), _) => Some(r.sort.clone()),
            (None, Some(c)) => Some(c.sort.clone()),
            (None, None) => None,
        }
    }

    /// In ensure-mode, asserts the postconditions of `call` and that the
    /// result has one of the checked types.
    fn ensure(&self, call: Call<'_>, out: Table, span: Span) -> Outcome<RtValue> {
        if self.cfg.ensure {
            ensures::check(&call, &out)?;
            if let Some(types) = self.cfg.predictions.and_then(|p| p.get(span)) {
                if !types.is_empty() && !types.iter().any(|tt| tt.matches(out.schema())) {
                    return Err(BenchError::contract(
                        call.operation(),
                        ErrorKind::PredictionMismatch {
                            expected: types.iter().map(ToString::to_string).collect::<Vec<_>>().join(" or "),
                            actual: out.schema().to_string(),
                        },
                    ));
                }
            }
        }
        Ok(RtValue::Data(Value::Table(out)))
    }

    pub(super) fn builtin(&self, name: &str, args: Vec<RtValue>, span: Span) -> Outcome<RtValue> {
        let spec = crate::check::BUILTINS.iter().find(|b| b.name == name).expect("known builtin");
        if !spec.arity.contains(&args.len()) {
            let expected = spec.arity.iter().map(usize::to_string).collect::<Vec<_>>().join(" or ");
            return Err(BenchError::new(ErrorKind::ArityMismatch {
                expected,
                actual: args.len(),
            }));
        }
        let skip = usize::from(matches!(name, "isMissing" | "withDefault"));
        if args.iter().skip(skip).any(|a| matches!(a, RtValue::Missing)) {
            return Err(BenchError::new(ErrorKind::MissingValue).in_operation(name));
        }
        let ops = self.cfg.ops;
        let a = &args;
        match name {
            "addColumn" => {
                let (t, c, vs) = (table(&a[0], name)?, text(&a[1], name)?, seq(&a[2], name)?);
                let out = ops.add_column(&t, &c, &vs, self.hint(span).as_ref())?;
                self.ensure(Call::AddColumn { t: &t, c: &c, vs: &vs }, out, span)
            }
            "buildColumn" => {
                let (t, c, f) = (table(&a[0], name)?, text(&a[1], name)?, &a[2]);
                if !matches!(f, RtValue::Closure(_) | RtValue::Builtin(_)) {
                    return Err(sort_error("buildColumn's function", "a function", f));
                }
                let mut apply = |r: &Row, _: usize| -> Outcome<Value> {
                    match self.call(f, vec![RtValue::Row(r.clone())], span)? {
                        RtValue::Data(v) => Ok(v),
                        RtValue::Missing => Err(BenchError::new(ErrorKind::MissingValue).in_operation("buildColumn")),
                        other => Err(sort_error("buildColumn's function result", "a cell value", &other)),
                    }
                };
                let out = ops.build_column(&t, &c, &mut apply, self.hint(span).as_ref())?;
                self.ensure(Call::BuildColumn { t: &t, c: &c }, out, span)
            }
            "selectRows" => {
                let (t, sel) = (table(&a[0], name)?, seq(&a[1], name)?);
                match sel.first() {
                    Some(Value::Boolean(_)) => {
                        let bs = booleans(&sel, name)?;
                        let out = ops.select_rows_by_mask(&t, &bs)?;
                        self.ensure(Call::SelectRowsByMask { t: &t, bs: &bs }, out, span)
                    }
                    _ => {
                        let ns = numbers(&sel, name)?;
                        let out = ops.select_rows_by_index(&t, &ns)?;
                        self.ensure(Call::SelectRowsByIndex { t: &t, ns: &ns }, out, span)
                    }
                }
            }
            "selectColumns" | "dropColumns" => {
                let (t, cs) = (table(&a[0], name)?, texts(&seq(&a[1], name)?, name)?);
                let cs: Vec<&str> = cs.iter().map(String::as_str).collect();
                if name == "selectColumns" {
                    let out = ops.select_columns(&t, &cs)?;
                    self.ensure(Call::SelectColumns { t: &t, cs: &cs }, out, span)
                } else {
                    let out = ops.drop_columns(&t, &cs)?;
                    self.ensure(Call::DropColumns { t: &t, cs: &cs }, out, span)
                }
            }
            "head" => {
                let (t, n) = (table(&a[0], name)?, number(&a[1], name)?);
                let out = ops.head(&t, n)?;
                self.ensure(Call::Head { t: &t, n: n as usize }, out, span)
            }
            "tsort" => {
                let (t, c, asc) = (table(&a[0], name)?, text(&a[1], name)?, boolean(&a[2], name)?);
                let out = ops.tsort(&t, &c, asc)?;
                self.ensure(
                    Call::Tsort {
                        t: &t,
                        c: &c,
                        ascending: asc,
                    },
                    out,
                    span,
                )
            }
            "vcat" | "hcat" => {
                let (t1, t2) = (table(&a[0], name)?, table(&a[1], name)?);
                if name == "vcat" {
                    let out = ops.vcat(&t1, &t2)?;
                    self.ensure(Call::Vcat { t1: &t1, t2: &t2 }, out, span)
                } else {
                    let out = ops.hcat(&t1, &t2)?;
                    self.ensure(Call::Hcat { t1: &t1, t2: &t2 }, out, span)
                }
            }
            "leftJoin" => {
                let (t1, t2, c) = (table(&a[0], name)?, table(&a[1], name)?, text(&a[2], name)?);
                let out = ops.left_join(&t1, &t2, &c)?;
                self.ensure(Call::LeftJoin { t1: &t1, t2: &t2, c: &c }, out, span)
            }
            "pivotLonger" => {
                let t = table(&a[0], name)?;
                let cs = texts(&seq(&a[1], name)?, name)?;
                let cs: Vec<&str> = cs.iter().map(String::as_str).collect();
                let (nt, vt) = (text(&a[2], name)?, text(&a[3], name)?);
                let out = ops.pivot_longer(&t, &cs, &nt, &vt)?;
                self.ensure(
                    Call::PivotLonger {
                        t: &t,
                        cs: &cs,
                        names_to: &nt,
                        values_to: &vt,
                    },
                    out,
                    span,
                )
            }
            "pivotWider" => {
                let (t, nf, vf) = (table(&a[0], name)?, text(&a[1], name)?, text(&a[2], name)?);
                let out = ops.pivot_wider(&t, &nf, &vf)?;
                self.ensure(
                    Call::PivotWider {
                        t: &t,
                        names_from: &nf,
                        values_from: &vf,
                    },
                    out,
                    span,
                )
            }
            "groupByRetentive" | "groupBySubtractive" => {
                let (t, c) = (table(&a[0], name)?, text(&a[1], name)?);
                let retentive = name == "groupByRetentive";
                let out = if retentive {
                    ops.group_by_retentive(&t, &c)?
                } else {
                    ops.group_by_subtractive(&t, &c)?
                };
                self.ensure(Call::GroupBy { t: &t, c: &c, retentive }, out, span)
            }
            "sampleRows" => {
                let (t, n) = (table(&a[0], name)?, number(&a[1], name)?);
                let seed = match a.get(2) {
                    Some(s) => prng::check_seed(number(s, name)?).map_err(|e| e.in_operation(name))?,
                    None => self.cfg.seed,
                };
                let out = ops.sample_rows(&t, n, seed)?;
                self.ensure(Call::SampleRows { t: &t, n: n as usize }, out, span)
            }
            "dotProduct" => {
                let (t, c1, c2) = (table(&a[0], name)?, text(&a[1], name)?, text(&a[2], name)?);
                Ok(RtValue::Data(Value::Number(ops.dot_product(&t, &c1, &c2)?)))
            }
            "getColumn" => {
                let (t, c) = (table(&a[0], name)?, text(&a[1], name)?);
                Ok(RtValue::Data(Value::Seq(ops.get_column(&t, &c)?)))
            }
            "fisherTest" => {
                let (x, y) = (booleans(&seq(&a[0], name)?, name)?, booleans(&seq(&a[1], name)?, name)?);
                Ok(RtValue::Data(Value::Number(fisher_test(&x, &y)?)))
            }
            "prngNext" => {
                let s = prng::check_seed(number(&a[0], name)?).map_err(|e| e.in_operation(name))?;
                Ok(RtValue::Data(Value::Number(prng::prng_next(s)? as f64)))
            }
            "header" => {
                let t = table(&a[0], name)?;
                Ok(RtValue::Data(Value::Seq(t.header().into_iter().map(Value::ColName).collect())))
            }
            "nrows" => Ok(RtValue::Data(Value::Number(table(&a[0], name)?.nrows() as f64))),
            "ncols" => Ok(RtValue::Data(Value::Number(table(&a[0], name)?.ncols() as f64))),
            "getRow" => {
                let (t, i) = (table(&a[0], name)?, number(&a[1], name)?);
                let i = whole(i).map_err(|e| e.in_operation(name))?;
                if i < 0 || i as usize >= t.nrows() {
                    return Err(BenchError::contract(
                        name,
                        ErrorKind::RowIndexOutOfBounds {
                            index: i,
                            nrows: t.nrows(),
                        },
                    ));
                }
                Ok(RtValue::Row(t.row(i as usize)?))
            }
            "getValue" => {
                let RtValue::Row(r) = &a[0] else {
                    return Err(sort_error("getValue's row argument", "Row", &a[0]));
                };
                let c = text(&a[1], name)?;
                Ok(match r.get(&c).map_err(|e| e.in_operation(name))? {
                    Cell::Missing => RtValue::Missing,
                    Cell::Present(v) => RtValue::Data(v.clone()),
                })
            }
            "nameAppend" => {
                let (x, y) = (text(&a[0], name)?, text(&a[1], name)?);
                Ok(RtValue::Data(Value::ColName(name_append(&x, &y)?)))
            }
            "nameSplit" => {
                let (x, y) = (text(&a[0], name)?, text(&a[1], name)?);
                let parts = name_split(&x, &y)?;
                Ok(RtValue::Data(Value::Seq(parts.into_iter().map(Value::String).collect())))
            }
            "namePrefix" => {
                let (x, y) = (text(&a[0], name)?, text(&a[1], name)?);
                Ok(RtValue::Data(Value::Boolean(name_prefix(&x, &y))))
            }
            "range" => {
                let (lo, hi) = match a.len() {
                    1 => (0, whole(number(&a[0], name)?)?),
                    _ => (whole(number(&a[0], name)?)?, whole(number(&a[1], name)?)?),
                };
                Ok(RtValue::Data(Value::Seq((lo..hi).map(|i| Value::Number(i as f64)).collect())))
            }
            "length" => Ok(RtValue::Data(Value::Number(seq(&a[0], name)?.len() as f64))),
            "append" => {
                let mut items = seq(&a[0], name)?;
                items.push(storable(a[1].clone(), name)?);
                seq_value(items, name)
            }
            "concat" => {
                let mut items = seq(&a[0], name)?;
                items.extend(seq(&a[1], name)?);
                seq_value(items, name)
            }
            "contains" => {
                let items = seq(&a[0], name)?;
                let v = storable(a[1].clone(), name)?;
                Ok(RtValue::Data(Value::Boolean(items.iter().any(|x| same_text(x, &v)))))
            }
            "setAt" => {
                let mut items = seq(&a[0], name)?;
                let i = whole(number(&a[1], name)?)?;
                if i < 0 || i as usize >= items.len() {
                    return Err(BenchError::new(ErrorKind::SeqIndexOutOfBounds { index: i, len: items.len() }));
                }
                items[i as usize] = storable(a[2].clone(), name)?;
                seq_value(items, name)
            }
            "floor" => Ok(RtValue::Data(Value::Number(number(&a[0], name)?.floor()))),
            "isMissing" => Ok(RtValue::Data(Value::Boolean(matches!(a[0], RtValue::Missing)))),
            "withDefault" => Ok(match &a[0] {
                RtValue::Missing => a[1].clone(),
                v => v.clone(),
            }),
            "toString" => match &a[0] {
                RtValue::Data(v) => Ok(RtValue::Data(Value::String(v.to_string()))),
                other => Err(sort_error("toString's argument", "a value", other)),
            },
            other => unreachable!("no runtime definition for {other}"),
        }
    }

    pub(super) fn order_by(&self, t: RtValue, pairs: Vec<(RtValue, RtValue, Span)>, span: Span) -> Outcome<RtValue> {
        let t = table(&t, "orderBy").map_err(|e| e.with_span(span))?;
        let mut keys: Vec<SortKey<'_>> = pairs
            .iter()
            .map(|(g, c, s)| {
                let s = *s;
                SortKey {
                    get_key: Box::new(move |r: &Row| match self.call(g, vec![RtValue::Row(r.clone())], s)? {
                        RtValue::Data(v) => Ok(v),
                        RtValue::Missing => Err(BenchError::new(ErrorKind::MissingValue).in_operation("orderBy")),
                        other => Err(sort_error("a sort key", "a cell value", &other)),
                    }),
                    compare: Box::new(move |x: &Value, y: &Value| {
                        let r = self.call(c, vec![RtValue::Data(x.clone()), RtValue::Data(y.clone())], s)?;
                        boolean(&r, "orderBy's comparison")
                    }),
                }
            })
            .collect();
        let out = self.cfg.ops.order_by(&t, &mut keys).map_err(|e| e.with_span(span))?;
        drop(keys);
        self.ensure(Call::OrderBy { t: &t }, out, span).map_err(|e| e.with_span(span))
    }
}

