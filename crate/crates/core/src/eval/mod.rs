//! Reference semantics: a strict tree-walking interpreter whose Table API
//! calls go through [`TableOps`] with their preconditions checked, and,
//! in ensure-mode, their postconditions and checked types asserted.

mod builtins;

use std::cell::{Cell as StdCell, RefCell};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::sync::Arc;

use crate::api::{StandardOps, TableOps};
use crate::check::{Predictions, BUILTINS};
use crate::error::{BenchError, ErrorKind, Outcome};
use crate::lang::{BinOp, Block, Expr, ExprKind, FunctionDef, Program, Span, Stmt, StmtKind, TableLit};
use crate::model::{name_literal, validate_table, Cell, ColName, Column, Row, Sort, Table, Value};

/// Nested user-function calls beyond this depth fail.
pub const MAX_DEPTH: usize = 1000;

/// Seed used when none is configured.
pub const DEFAULT_SEED: u32 = 1;

/// A runtime value: data, a row, a missing cell read, or a function.
#[derive(Debug, Clone)]
pub enum RtValue {
    Data(Value),
    Row(Row),
    Missing,
    Closure(Arc<Closure>),
    Builtin(&'static str),
    /// The value of statements that produce none.
    Nothing,
}

#[derive(Debug)]
pub struct Closure {
    pub def: Arc<FunctionDef>,
    pub env: Arc<BTreeMap<String, RtValue>>,
    pub name: Option<String>,
}

impl RtValue {
    pub fn as_value(&self) -> Option<&Value> {
        match self {
            RtValue::Data(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_table(&self) -> Option<&Table> {
        match self {
            RtValue::Data(Value::Table(t)) => Some(t),
            _ => None,
        }
    }

    fn kind(&self) -> String {
        match self {
            RtValue::Data(v) => v.describe(),
            RtValue::Row(_) => "a row".into(),
            RtValue::Missing => "a missing value".into(),
            RtValue::Closure(_) | RtValue::Builtin(_) => "a function".into(),
            RtValue::Nothing => "no value".into(),
        }
    }
}

impl PartialEq for RtValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (RtValue::Data(a), RtValue::Data(b)) => a == b,
            (RtValue::Row(a), RtValue::Row(b)) => a == b,
            (RtValue::Missing, RtValue::Missing) | (RtValue::Nothing, RtValue::Nothing) => true,
            (RtValue::Closure(a), RtValue::Closure(b)) => Arc::ptr_eq(a, b),
            (RtValue::Builtin(a), RtValue::Builtin(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for RtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RtValue::Data(Value::Table(t)) => f.write_str(&t.to_literal()),
            RtValue::Data(v) => write!(f, "{v}"),
            RtValue::Row(r) => {
                f.write_str("(")?;
                for (i, (c, cell)) in r.schema().columns().iter().zip(r.cells()).enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}: ", name_literal(c.name.as_str()))?;
                    match cell {
                        Cell::Missing => f.write_str("_")?,
                        Cell::Present(v) => f.write_str(&v.to_literal())?,
                    }
                }
                f.write_str(")")
            }
            RtValue::Missing => f.write_str("_"),
            RtValue::Closure(c) => match &c.name {
                Some(n) => write!(f, "<function {n}>"),
                None => f.write_str("<function>"),
            },
            RtValue::Builtin(n) => write!(f, "<builtin {n}>"),
            RtValue::Nothing => Ok(()),
        }
    }
}

#[derive(Clone, Copy)]
pub struct EvalConfig<'a> {
    /// Assert every Table API postcondition and checked type.
    pub ensure: bool,
    /// Seed for `sampleRows` calls that do not pass one.
    pub seed: u32,
    pub ops: &'a dyn TableOps,
    /// Table types the checker predicted, by call span.
    pub predictions: Option<&'a Predictions>,
}

impl Default for EvalConfig<'_> {
    fn default() -> Self {
        EvalConfig {
            ensure: false,
            seed: DEFAULT_SEED,
            ops: &StandardOps,
            predictions: None,
        }
    }
}

impl fmt::Debug for EvalConfig<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvalConfig")
            .field("ensure", &self.ensure)
            .field("seed", &self.seed)
            .finish_non_exhaustive()
    }
}

/// The initial runtime environment: every builtin plus the given tables.
pub fn runtime_prelude<'a>(tables: impl IntoIterator<Item = (&'a str, &'a Table)>) -> BTreeMap<String, RtValue> {
    let mut env: BTreeMap<String, RtValue> =
        BUILTINS.iter().map(|b| (b.name.to_string(), RtValue::Builtin(b.name))).collect();
    for (name, t) in tables {
        env.insert(name.to_string(), RtValue::Data(Value::Table(t.clone())));
    }
    env
}

/// Runs a program top to bottom, writing `println` lines to `sink`.
/// Returns the final top-level bindings.
pub fn eval_program(
    program: &Program,
    env: &BTreeMap<String, RtValue>,
    cfg: EvalConfig<'_>,
    sink: &mut dyn Write,
) -> Outcome<BTreeMap<String, RtValue>> {
    let interp = Interpreter {
        cfg,
        sink: RefCell::new(sink),
        depth: StdCell::new(0),
    };
    let mut frame = Frame {
        locals: HashMap::new(),
        captured: Arc::new(env.clone()),
    };
    for s in &program.stmts {
        interp.stmt(&mut frame, s)?;
    }
    Ok(frame.locals.into_iter().collect())
}

/// Evaluates one expression, for table files and other single values.
pub fn eval_expr(e: &Expr, env: &BTreeMap<String, RtValue>, cfg: EvalConfig<'_>) -> Outcome<RtValue> {
    let mut sink = std::io::sink();
    let interp = Interpreter {
        cfg,
        sink: RefCell::new(&mut sink),
        depth: StdCell::new(0),
    };
    let mut frame = Frame {
        locals: HashMap::new(),
        captured: Arc::new(env.clone()),
    };
    interp.expr(&mut frame, e, None)
}

/// Runs a program and collects its output.
pub fn run_to_string(
    program: &Program,
    env: &BTreeMap<String, RtValue>,
    cfg: EvalConfig<'_>,
) -> (Outcome<BTreeMap<String, RtValue>>, String) {
    let mut out = Vec::new();
    let r = eval_program(program, env, cfg, &mut out);
    (r, String::from_utf8(out).expect("output is UTF-8"))
}

struct Frame {
    locals: HashMap<String, RtValue>,
    captured: Arc<BTreeMap<String, RtValue>>,
}

impl Frame {
    fn get(&self, name: &str) -> Option<&RtValue> {
        self.locals.get(name).or_else(|| self.captured.get(name))
    }

    fn snapshot(&self) -> Arc<BTreeMap<String, RtValue>> {
        let mut env = (*self.captured).clone();
        for (k, v) in &self.locals {
            env.insert(k.clone(), v.clone());
        }
        Arc::new(env)
    }
}

pub(crate) struct Interpreter<'a, 's> {
    cfg: EvalConfig<'a>,
    sink: RefCell<&'s mut dyn Write>,
    depth: StdCell<usize>,
}

fn sort_error(what: impl Into<String>, expected: impl Into<String>, actual: &RtValue) -> BenchError {
    BenchError::new(ErrorKind::ValueSortMismatch {
        what: what.into(),
        expected: expected.into(),
        actual: actual.kind(),
    })
}

/// Strips a value down to data, failing on missing values and non-data.
pub(crate) fn data(v: RtValue, what: &str) -> Outcome<Value> {
    match v {
        RtValue::Data(v) => Ok(v),
        RtValue::Missing => Err(BenchError::new(ErrorKind::MissingValue)),
        other => Err(sort_error(what, "data", &other)),
    }
}

/// Sequences mixing strings and column names hold strings.
pub(crate) fn unify_text(items: &mut [Value]) {
    let has_string = items.iter().any(|v| matches!(v, Value::String(_)));
    if has_string {
        for v in items.iter_mut() {
            if let Value::ColName(n) = v {
                *v = Value::String(n.to_string());
            }
        }
    }
}

impl<'a, 's> Interpreter<'a, 's> {
    fn block(&self, frame: &mut Frame, b: &Block) -> Outcome<RtValue> {
        let mut last = RtValue::Nothing;
        for s in &b.stmts {
            last = self.stmt(frame, s)?;
        }
        Ok(last)
    }

    fn stmt(&self, frame: &mut Frame, s: &Stmt) -> Outcome<RtValue> {
        match &s.kind {
            StmtKind::Bind { name, value, .. } => {
                let v = self.expr(frame, value, Some(name))?;
                if let RtValue::Nothing = v {
                    return Err(sort_error(format!("the value bound to {name}"), "a value", &v).with_span(value.span));
                }
                frame.locals.insert(name.clone(), v);
                Ok(RtValue::Nothing)
            }
            StmtKind::Expr(e) => self.expr(frame, e, None),
            StmtKind::Println(e) => {
                let v = self.expr(frame, e, None)?;
                match v {
                    RtValue::Missing => return Err(BenchError::new(ErrorKind::MissingValue).with_span(e.span)),
                    RtValue::Nothing => {
                        return Err(sort_error("println's argument", "a value", &v).with_span(e.span))
                    }
                    _ => {}
                }
                let mut sink = self.sink.borrow_mut();
                writeln!(sink, "{v}").map_err(|io| {
                    BenchError::new(ErrorKind::ValueSortMismatch {
                        what: "output".into(),
                        expected: "a writable sink".into(),
                        actual: io.to_string(),
                    })
                })?;
                Ok(RtValue::Nothing)
            }
            StmtKind::If {
                cond,
                then,
                otherwise,
            } => {
                let c = self.expr(frame, cond, None)?;
                let branch = if self.truth(c, cond.span, "an `if` condition")? {
                    Some(then)
                } else {
                    otherwise.as_ref()
                };
                let v = match branch {
                    Some(b) => self.block(frame, b)?,
                    None => RtValue::Nothing,
                };
                Ok(if otherwise.is_some() { v } else { RtValue::Nothing })
            }
            StmtKind::For { var, iter, body, .. } => {
                let it = self.expr(frame, iter, None)?;
                let items = match it {
                    RtValue::Data(Value::Seq(items)) => items,
                    other => {
                        return Err(sort_error("`for`", "a sequence", &other).with_span(iter.span));
                    }
                };
                for item in items {
                    frame.locals.insert(var.clone(), RtValue::Data(item));
                    self.block(frame, body)?;
                }
                Ok(RtValue::Nothing)
            }
        }
    }

    fn truth(&self, v: RtValue, span: Span, what: &str) -> Outcome<bool> {
        match v {
            RtValue::Data(Value::Boolean(b)) => Ok(b),
            RtValue::Missing => Err(BenchError::new(ErrorKind::MissingValue).with_span(span)),
            other => Err(sort_error(what, "Boolean", &other).with_span(span)),
        }
    }

    fn number(&self, v: RtValue, span: Span, what: &str) -> Outcome<f64> {
        match v {
            RtValue::Data(Value::Number(n)) => Ok(n),
            RtValue::Missing => Err(BenchError::new(ErrorKind::MissingValue).with_span(span)),
            other => Err(sort_error(what, "Number", &other).with_span(span)),
        }
    }

    fn expr(&self, frame: &mut Frame, e: &Expr, binding: Option<&str>) -> Outcome<RtValue> {
        let v = match &e.kind {
            ExprKind::Number(n) => RtValue::Data(Value::Number(*n)),
            ExprKind::Bool(b) => RtValue::Data(Value::Boolean(*b)),
            ExprKind::Str(s) => RtValue::Data(Value::String(s.clone())),
            ExprKind::Seq(items) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    let v = self.expr(frame, item, None)?;
                    out.push(data(v, "a sequence element").map_err(|err| err.with_span(item.span))?);
                }
                unify_text(&mut out);
                if let Some(first) = out.iter().find_map(Value::infer_sort) {
                    if let Some((i, bad)) = out.iter().enumerate().find(|(_, v)| !v.conforms(&first)) {
                        return Err(BenchError::new(ErrorKind::ValueSortMismatch {
                            what: format!("element {i} of the sequence"),
                            expected: first.to_string(),
                            actual: bad.describe(),
                        })
                        .with_span(items[i].span));
                    }
                }
                RtValue::Data(Value::Seq(out))
            }
            ExprKind::Table(lit) => RtValue::Data(Value::Table(self.table_literal(frame, lit)?)),
            ExprKind::Var(name) => match frame.get(name) {
                Some(v) => v.clone(),
                None => {
                    return Err(BenchError::new(ErrorKind::UnboundVariable { name: name.clone() }).with_span(e.span))
                }
            },
            ExprKind::Function(def) => RtValue::Closure(Arc::new(Closure {
                def: def.clone(),
                env: frame.snapshot(),
                name: binding.map(str::to_string),
            })),
            ExprKind::Call { callee, args } => {
                let f = self.expr(frame, callee, None)?;
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.expr(frame, a, None)?);
                }
                self.call(&f, vals, e.span)?
            }
            ExprKind::Index { target, index } => {
                let t = self.expr(frame, target, None)?;
                let i = self.expr(frame, index, None)?;
                self.index(t, i, e.span)?
            }
            ExprKind::Binary { op, lhs, rhs } => self.binary(frame, *op, lhs, rhs, e.span)?,
            ExprKind::Not(x) => {
                let v = self.expr(frame, x, None)?;
                RtValue::Data(Value::Boolean(!self.truth(v, x.span, "`not`")?))
            }
            ExprKind::Neg(x) => {
                let v = self.expr(frame, x, None)?;
                RtValue::Data(Value::Number(-self.number(v, x.span, "negation")?))
            }
            ExprKind::OrderBy { table, pairs } => {
                let t = self.expr(frame, table, None)?;
                let mut fns = Vec::with_capacity(pairs.len());
                for p in pairs {
                    let g = self.expr(frame, &p.get_key, None)?;
                    let c = self.expr(frame, &p.compare, None)?;
                    fns.push((g, c, p.span));
                }
                self.order_by(t, fns, e.span)?
            }
        };
        Ok(v)
    }

    fn index(&self, t: RtValue, i: RtValue, span: Span) -> Outcome<RtValue> {
        match (&t, &i) {
            (RtValue::Row(r), RtValue::Data(v)) if v.as_text().is_some() => {
                let name = v.as_text().expect("textual");
                let cell = r.get(name).map_err(|e| e.with_span(span))?;
                Ok(match cell {
                    Cell::Missing => RtValue::Missing,
                    Cell::Present(v) => RtValue::Data(v.clone()),
                })
            }
            (RtValue::Data(Value::Seq(items)), RtValue::Data(Value::Number(n))) => {
                if n.fract() != 0.0 {
                    return Err(BenchError::new(ErrorKind::NonIntegralIndex { value: *n }).with_span(span));
                }
                if *n < 0.0 || *n as usize >= items.len() {
                    return Err(BenchError::new(ErrorKind::SeqIndexOutOfBounds {
                        index: *n as i64,
                        len: items.len(),
                    })
                    .with_span(span));
                }
                Ok(RtValue::Data(items[*n as usize].clone()))
            }
            (RtValue::Missing, _) | (_, RtValue::Missing) => {
                Err(BenchError::new(ErrorKind::MissingValue).with_span(span))
            }
            (RtValue::Row(_), other) => Err(sort_error("a row index", "a column name", other).with_span(span)),
            (RtValue::Data(Value::Seq(_)), other) => {
                Err(sort_error("a sequence index", "Number", other).with_span(span))
            }
            (other, _) => Err(sort_error("the indexed value", "a row or a sequence", other).with_span(span)),
        }
    }

    fn binary(&self, frame: &mut Frame, op: BinOp, lhs: &Expr, rhs: &Expr, span: Span) -> Outcome<RtValue> {
        let l = self.expr(frame, lhs, None)?;
        let what = format!("`{}`", op.symbol());
        if matches!(op, BinOp::And | BinOp::Or) {
            let lb = self.truth(l, lhs.span, &what)?;
            if (op == BinOp::And) != lb {
                return Ok(RtValue::Data(Value::Boolean(lb)));
            }
            let r = self.expr(frame, rhs, None)?;
            return Ok(RtValue::Data(Value::Boolean(self.truth(r, rhs.span, &what)?)));
        }
        let r = self.expr(frame, rhs, None)?;
        let num = |v: RtValue, s: Span| self.number(v, s, &what);
        let out = match op {
            BinOp::Add => Value::Number(num(l, lhs.span)? + num(r, rhs.span)?),
            BinOp::Sub => Value::Number(num(l, lhs.span)? - num(r, rhs.span)?),
            BinOp::Mul => Value::Number(num(l, lhs.span)? * num(r, rhs.span)?),
            BinOp::Div => {
                let (a, b) = (num(l, lhs.span)?, num(r, rhs.span)?);
                if b == 0.0 {
                    return Err(BenchError::new(ErrorKind::DivisionByZero).with_span(span));
                }
                Value::Number(a / b)
            }
            BinOp::Append => {
                let a = data(l, &what).map_err(|e| e.with_span(lhs.span))?;
                let b = data(r, &what).map_err(|e| e.with_span(rhs.span))?;
                match (a.as_text(), b.as_text()) {
                    (Some(x), Some(y)) => Value::String(format!("{x}{y}")),
                    (None, _) => return Err(sort_error(&what, "String", &RtValue::Data(a)).with_span(lhs.span)),
                    (_, None) => return Err(sort_error(&what, "String", &RtValue::Data(b)).with_span(rhs.span)),
                }
            }
            BinOp::Eq | BinOp::NotEq => {
                let a = data(l, &what).map_err(|e| e.with_span(lhs.span))?;
                let b = data(r, &what).map_err(|e| e.with_span(rhs.span))?;
                let eq = match (a.as_text(), b.as_text()) {
                    (Some(x), Some(y)) => x == y,
                    _ => a == b,
                };
                Value::Boolean(eq == (op == BinOp::Eq))
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                let a = data(l, &what).map_err(|e| e.with_span(lhs.span))?;
                let b = data(r, &what).map_err(|e| e.with_span(rhs.span))?;
                let ord = match (&a, &b) {
                    (Value::Number(x), Value::Number(y)) => x.partial_cmp(y),
                    (Value::Boolean(x), Value::Boolean(y)) => Some(x.cmp(y)),
                    _ => match (a.as_text(), b.as_text()) {
                        (Some(x), Some(y)) => Some(x.cmp(y)),
                        _ => None,
                    },
                };
                let Some(ord) = ord else {
                    return Err(BenchError::new(ErrorKind::ValueSortMismatch {
                        what,
                        expected: a.describe(),
                        actual: b.describe(),
                    })
                    .with_span(span));
                };
                use std::cmp::Ordering::*;
                Value::Boolean(match op {
                    BinOp::Lt => ord == Less,
                    BinOp::Le => ord != Greater,
                    BinOp::Gt => ord == Greater,
                    _ => ord != Less,
                })
            }
            BinOp::And | BinOp::Or => unreachable!("short-circuited above"),
        };
        Ok(RtValue::Data(out))
    }

    pub(crate) fn call(&self, f: &RtValue, args: Vec<RtValue>, span: Span) -> Outcome<RtValue> {
        match f {
            RtValue::Builtin(name) => self.builtin(name, args, span).map_err(|e| e.with_span(span)),
            RtValue::Closure(c) => self.call_closure(c, args, span),
            _ => Err(BenchError::new(ErrorKind::NotCallable).with_span(span)),
        }
    }

    fn call_closure(&self, c: &Arc<Closure>, args: Vec<RtValue>, span: Span) -> Outcome<RtValue> {
        let params = &c.def.params;
        if params.len() != args.len() {
            return Err(BenchError::new(ErrorKind::ArityMismatch {
                expected: params.len().to_string(),
                actual: args.len(),
            })
            .with_span(span));
        }
        if self.depth.get() >= MAX_DEPTH {
            return Err(BenchError::new(ErrorKind::CallDepth { limit: MAX_DEPTH }).with_span(span));
        }
        let mut frame = Frame {
            locals: params.iter().map(|(p, _)| p.clone()).zip(args).collect(),
            captured: c.env.clone(),
        };
        self.depth.set(self.depth.get() + 1);
        let r = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || self.block(&mut frame, &c.def.body));
        self.depth.set(self.depth.get() - 1);
        r.map_err(|mut e| {
            let who = c.name.as_deref().unwrap_or("function");
            e.trace.push(format!("{who} called at {span}"));
            e
        })
    }

    fn table_literal(&self, frame: &mut Frame, lit: &TableLit) -> Outcome<Table> {
        let mut grid: Vec<Vec<Cell>> = Vec::with_capacity(lit.rows.len());
        for row in &lit.rows {
            let mut cells = Vec::with_capacity(row.cells.len());
            for c in &row.cells {
                cells.push(match &c.value {
                    None => Cell::Missing,
                    Some(e) => match self.expr(frame, e, None)? {
                        RtValue::Missing => Cell::Missing,
                        v => Cell::Present(data(v, "a table cell").map_err(|err| err.with_span(e.span))?),
                    },
                });
            }
            grid.push(cells);
        }
        let mut columns = Vec::with_capacity(lit.header.len());
        for (j, h) in lit.header.iter().enumerate() {
            let name = ColName::new(&h.name).map_err(|e| e.with_span(h.span))?;
            let (sort, optional) = match &h.sort {
                Some(s) => (s.clone(), h.optional),
                None => {
                    let cells: Vec<&Cell> = grid.iter().filter_map(|r| r.get(j)).collect();
                    let blank = cells.iter().any(|c| c.is_missing());
                    let present: Vec<&Value> = cells.iter().filter_map(|c| c.value()).collect();
                    let sort = present
                        .iter()
                        .find_map(|v| v.infer_sort())
                        .or_else(|| present.first().map(|v| default_sort(v)))
                        .unwrap_or(Sort::String);
                    (sort, blank || h.optional || present.is_empty())
                }
            };
            columns.push(Column { name, sort, optional });
        }
        validate_table(columns, grid).map_err(|e| {
            let span = match &e.kind {
                ErrorKind::DuplicateColumn { name } => {
                    lit.header.iter().filter(|h| h.name == *name).nth(1).map(|h| h.span)
                }
                ErrorKind::RaggedRow { row, .. } => lit.rows.get(*row).map(|r| r.span),
                ErrorKind::CellSortMismatch { column, row, .. } | ErrorKind::IllegalMissing { column, row } => {
                    lit.rows.get(*row).and_then(|r| r.cells.get(*column)).map(|c| c.span)
                }
                _ => None,
            };
            e.with_span(span.unwrap_or(lit.span))
        })
    }
}

fn default_sort(v: &Value) -> Sort {
    match v {
        Value::Seq(_) => Sort::seq(Sort::Number),
        other => other.infer_sort().unwrap_or(Sort::Number),
    }
}

#[cfg(test)]
mod tests;
