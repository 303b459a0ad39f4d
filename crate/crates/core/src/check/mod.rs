//! Static, schema-aware checking of programs.
//!
//! User functions are checked afresh at every call site with the concrete
//! argument types, so a function applied to two tables is checked twice.
//! Results are keyed by source span: the diagnostics, the table type
//! predicted for every Table API call, and the types of the top-level
//! bindings.

mod builtins;
mod types;

pub use builtins::{is_builtin, BUILTINS};
pub use types::{column, ClosureTy, FunTy, NameFact, RestColumns, SeqInfo, TableType, Ty};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::diag::{self, detect_column_swap, suggest_columns_for, Category, Diagnostic};
use crate::lang::{pretty_expr, BinOp, Block, Expr, ExprKind, FunctionDef, Program, Span, Stmt, StmtKind, TableLit};
use crate::model::{name_prefix, ColName, Column, Sort, Table};

/// Deepest chain of nested user-function calls the checker follows.
pub const MAX_CALL_DEPTH: usize = 32;

/// Passes over a loop body before its bindings are widened.
const LOOP_PASSES: usize = 3;

/// Table types predicted for each Table API call site. A call inside a
/// function checked at several call sites has one prediction per site.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Predictions(HashMap<Span, Vec<TableType>>);

impl Predictions {
    pub fn get(&self, call: Span) -> Option<&[TableType]> {
        self.0.get(&call).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    /// Normalized: sorted by position, no duplicates.
    pub diagnostics: Vec<Diagnostic>,
    pub predictions: Predictions,
    pub bindings: BTreeMap<String, Ty>,
}

impl CheckResult {
    pub fn has_errors(&self) -> bool {
        diag::has_errors(&self.diagnostics)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }
}

/// The initial static environment: every builtin plus the given tables.
pub fn prelude<'a>(tables: impl IntoIterator<Item = (&'a str, &'a Table)>) -> BTreeMap<String, Ty> {
    let mut env: BTreeMap<String, Ty> = BUILTINS
        .iter()
        .map(|b| (b.name.to_string(), Ty::Fun(FunTy::Builtin(b.name))))
        .collect();
    for (name, t) in tables {
        env.insert(name.to_string(), Ty::Table(TableType::of_schema(t.schema(), Some(t.nrows()))));
    }
    env
}

/// Checks a whole program against an initial environment (see [`prelude`]).
pub fn check_program(program: &Program, env: &BTreeMap<String, Ty>) -> CheckResult {
    let mut ck = Checker::new(Arc::new(env.clone()));
    for s in &program.stmts {
        ck.stmt(s);
    }
    ck.check_uncalled();
    let top = ck.frames.pop().expect("top frame");
    let mut diagnostics = ck.diags;
    diag::normalize(&mut diagnostics);
    let mut predictions: HashMap<Span, Vec<TableType>> = HashMap::new();
    for (span, tt) in ck.predictions {
        let v = predictions.entry(span).or_default();
        if !v.contains(&tt) {
            v.push(tt);
        }
    }
    CheckResult {
        diagnostics,
        predictions: Predictions(predictions),
        bindings: top.locals.into_iter().map(|(k, l)| (k, l.ty)).collect(),
    }
}

#[derive(Debug, Clone)]
struct Local {
    ty: Ty,
    span: Span,
    used: bool,
    param: bool,
}

#[derive(Debug)]
struct Frame {
    locals: BTreeMap<String, Local>,
    captured: Arc<BTreeMap<String, Ty>>,
    function: bool,
}

pub(crate) struct Checker {
    frames: Vec<Frame>,
    diags: Vec<Diagnostic>,
    predictions: Vec<(Span, TableType)>,
    /// Definitions of the user functions currently being checked.
    active: Vec<usize>,
    defined: Vec<Arc<ClosureTy>>,
    invoked: BTreeSet<usize>,
    /// Expressions known not to be missing on the current path.
    narrowed: Vec<String>,
    /// Name being bound by the enclosing assignment.
    binding: Option<String>,
    /// Set while checking functions nobody calls; predictions are then
    /// meaningless.
    speculative: bool,
}

/// An argument as seen by a signature: its type and where it came from.
#[derive(Debug, Clone)]
pub(crate) struct Arg {
    pub ty: Ty,
    pub span: Span,
}

fn def_id(def: &Arc<FunctionDef>) -> usize {
    Arc::as_ptr(def) as usize
}

impl Checker {
    fn new(prelude: Arc<BTreeMap<String, Ty>>) -> Self {
        Checker {
            frames: vec![Frame {
                locals: BTreeMap::new(),
                captured: prelude,
                function: false,
            }],
            diags: Vec::new(),
            predictions: Vec::new(),
            active: Vec::new(),
            defined: Vec::new(),
            invoked: BTreeSet::new(),
            narrowed: Vec::new(),
            binding: None,
            speculative: false,
        }
    }

    pub(crate) fn error(&mut self, d: Diagnostic) {
        self.diags.push(d);
    }

    fn error_count(&self) -> usize {
        self.diags.iter().filter(|d| d.is_error()).count()
    }

    pub(crate) fn predict(&mut self, span: Span, tt: &TableType) {
        if !self.speculative {
            self.predictions.push((span, tt.clone()));
        }
    }

    fn frame(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("a frame")
    }

    fn lookup(&mut self, name: &str) -> Option<Ty> {
        let f = self.frame();
        if let Some(l) = f.locals.get_mut(name) {
            l.used = true;
            return Some(l.ty.clone());
        }
        f.captured.get(name).cloned()
    }

    fn assign(&mut self, name: &str, ty: Ty, span: Span) {
        self.narrowed
            .retain(|k| k != name && !k.starts_with(&format!("{name}[")));
        let f = self.frame();
        match f.locals.get_mut(name) {
            Some(l) => l.ty = ty,
            None => {
                f.locals.insert(
                    name.to_string(),
                    Local {
                        ty,
                        span,
                        used: false,
                        param: false,
                    },
                );
            }
        }
    }

    fn snapshot_env(&self) -> Arc<BTreeMap<String, Ty>> {
        let f = self.frames.last().expect("a frame");
        let mut env = (*f.captured).clone();
        for (k, l) in &f.locals {
            env.insert(k.clone(), l.ty.clone());
        }
        Arc::new(env)
    }

    fn local_types(&self) -> BTreeMap<String, Ty> {
        self.frames
            .last()
            .expect("a frame")
            .locals
            .iter()
            .map(|(k, l)| (k.clone(), l.ty.clone()))
            .collect()
    }

    fn set_local_types(&mut self, types: &BTreeMap<String, Ty>) {
        let f = self.frame();
        for (k, ty) in types {
            if let Some(l) = f.locals.get_mut(k) {
                l.ty = ty.clone();
            }
        }
    }

    // ---- statements ----

    /// Checks a block and returns the type of its value: the value of its
    /// last statement.
    fn block(&mut self, b: &Block) -> Ty {
        let mut last = Ty::Nothing;
        for s in &b.stmts {
            last = self.stmt(s);
        }
        last
    }

    fn stmt(&mut self, s: &Stmt) -> Ty {
        match &s.kind {
            StmtKind::Bind {
                name,
                name_span,
                value,
            } => {
                let outer = self.binding.replace(name.clone());
                let ty = self.expr(value);
                self.binding = outer;
                let ty = match ty {
                    Ty::Nothing => {
                        self.error(Diagnostic::error(
                            Category::SortMismatch,
                            value.span,
                            format!("`{}` produces no value to bind to {name}", pretty_expr(value)),
                        ));
                        Ty::Unknown
                    }
                    t => t,
                };
                self.assign(name, ty, *name_span);
                Ty::Nothing
            }
            StmtKind::Expr(e) => self.expr(e),
            StmtKind::Println(e) => {
                let ty = self.expr(e);
                self.require_value(ty, e);
                Ty::Nothing
            }
            StmtKind::If {
                cond,
                then,
                otherwise,
            } => self.if_stmt(cond, then, otherwise.as_ref()),
            StmtKind::For {
                var,
                var_span,
                iter,
                body,
            } => {
                self.for_stmt(var, *var_span, iter, body);
                Ty::Nothing
            }
        }
    }

    fn if_stmt(&mut self, cond: &Expr, then: &Block, otherwise: Option<&Block>) -> Ty {
        let ct = self.expr(cond);
        self.expect_bool(ct, cond, "an `if` condition");
        let before = self.local_types();
        let narrowed = self.narrowed.clone();

        self.narrowed.extend(facts(cond, true));
        self.refine_prefix(cond);
        let tv = self.block(then);
        let after_then = self.local_types();
        self.narrowed = narrowed.clone();

        self.set_local_types(&before);
        let ev = match otherwise {
            Some(b) => {
                self.narrowed.extend(facts(cond, false));
                let v = self.block(b);
                self.narrowed = narrowed;
                Some(v)
            }
            None => None,
        };
        let after_else = self.local_types();
        let mut merged = after_else.clone();
        for (k, t) in &after_then {
            let m = match after_else.get(k) {
                Some(e) => Ty::join(t, e),
                None => t.clone(),
            };
            merged.insert(k.clone(), m);
        }
        self.set_local_types(&merged);
        match ev {
            Some(e) if tv != Ty::Nothing && e != Ty::Nothing => Ty::join(&tv, &e),
            _ => Ty::Nothing,
        }
    }

    /// Under `namePrefix(c, "p")`, `c` can only be one of its candidates
    /// that start with `p`.
    fn refine_prefix(&mut self, cond: &Expr) {
        let ExprKind::Call { callee, args } = &cond.kind else { return };
        let (ExprKind::Var(f), [a, b]) = (&callee.kind, &args[..]) else { return };
        let (ExprKind::Var(v), ExprKind::Str(p)) = (&a.kind, &b.kind) else { return };
        if f != "namePrefix" {
            return;
        }
        let Some(local) = self.frame().locals.get_mut(v) else { return };
        let keep = |ns: &Vec<String>| -> NameFact {
            let ns: Vec<String> = ns.iter().filter(|n| name_prefix(n, p)).cloned().collect();
            match &ns[..] {
                [] => NameFact::Unknown,
                [one] => NameFact::Known(one.clone()),
                _ => NameFact::MemberOf(ns),
            }
        };
        local.ty = match &local.ty {
            Ty::Name(NameFact::MemberOf(ns)) => Ty::Name(keep(ns)),
            Ty::Str(NameFact::MemberOf(ns)) => Ty::Str(keep(ns)),
            t => t.clone(),
        };
    }

    fn for_stmt(&mut self, var: &str, var_span: Span, iter: &Expr, body: &Block) {
        let it = self.expr(iter);
        let elem = match it {
            Ty::Seq(e, _) => match *e {
                Ty::Never => Ty::Unknown,
                e => e,
            },
            Ty::Unknown => Ty::Unknown,
            other => {
                self.error(
                    Diagnostic::error(Category::SortMismatch, iter.span, "`for` iterates over a sequence")
                        .expected("Seq", other.to_string()),
                );
                Ty::Unknown
            }
        };
        let mut entry = self.local_types();
        for pass in 0..LOOP_PASSES {
            let marks = (self.diags.len(), self.predictions.len());
            self.assign(var, elem.clone(), var_span);
            if let Some(l) = self.frame().locals.get_mut(var) {
                l.used = true;
            }
            self.block(body);
            let exit = self.local_types();
            let mut widened = exit.clone();
            for (k, t) in &entry {
                if let Some(e) = exit.get(k) {
                    widened.insert(k.clone(), Ty::join(t, e));
                }
            }
            if widened == entry || pass + 1 == LOOP_PASSES {
                self.set_local_types(&widened);
                return;
            }
            self.diags.truncate(marks.0);
            self.predictions.truncate(marks.1);
            self.set_local_types(&widened);
            entry = widened;
        }
    }

    // ---- expressions ----

    pub(crate) fn expr(&mut self, e: &Expr) -> Ty {
        match &e.kind {
            ExprKind::Number(_) => Ty::Num,
            ExprKind::Bool(_) => Ty::Bool,
            ExprKind::Str(s) => Ty::Str(NameFact::Known(s.clone())),
            ExprKind::Seq(items) => self.seq_literal(items),
            ExprKind::Table(lit) => self.table_literal(lit),
            ExprKind::Var(name) => match self.lookup(name) {
                Some(t) => self.narrow(e, t),
                None => {
                    self.unbound(name, e.span);
                    Ty::Unknown
                }
            },
            ExprKind::Function(def) => {
                let c = Arc::new(ClosureTy {
                    id: def_id(def),
                    def: def.clone(),
                    env: self.snapshot_env(),
                    name: self.binding.clone(),
                });
                self.defined.push(c.clone());
                Ty::Fun(FunTy::Closure(c))
            }
            ExprKind::Call { callee, args } => {
                let ft = self.expr(callee);
                let args: Vec<Arg> = args
                    .iter()
                    .map(|a| Arg {
                        ty: self.expr(a),
                        span: a.span,
                    })
                    .collect();
                self.apply(&ft, callee, args, e.span)
            }
            ExprKind::Index { target, index } => {
                let tt = self.expr(target);
                let it = self.expr(index);
                let t = self.index(tt, target, it, index, e.span);
                self.narrow(e, t)
            }
            ExprKind::Binary { op, lhs, rhs } => self.binary(*op, lhs, rhs, e.span),
            ExprKind::Not(x) => {
                let t = self.expr(x);
                self.expect_bool(t, x, "`not`");
                Ty::Bool
            }
            ExprKind::Neg(x) => {
                let t = self.expr(x);
                self.expect_num(t, x, "negation");
                Ty::Num
            }
            ExprKind::OrderBy { table, pairs } => {
                let tt = self.expr(table);
                let Some(tt) = self.table_arg(tt, table.span, "orderBy") else {
                    for p in pairs {
                        self.expr(&p.get_key);
                        self.expr(&p.compare);
                    }
                    return Ty::Unknown;
                };
                for p in pairs {
                    let gk = self.expr(&p.get_key);
                    let key = self.call_value(&gk, &p.get_key, vec![Ty::Row(tt.clone())], p.get_key.span);
                    let key = match key {
                        Ty::Optional(inner) => {
                            self.error(Diagnostic::error(
                                Category::IllegalMissing,
                                p.get_key.span,
                                "sort keys may be missing; guard with isMissing or withDefault",
                            ));
                            *inner
                        }
                        Ty::Nothing => Ty::Unknown,
                        k => k,
                    };
                    let cmp = self.expr(&p.compare);
                    let r = self.call_value(&cmp, &p.compare, vec![key.clone(), key], p.compare.span);
                    if !matches!(r, Ty::Bool | Ty::Unknown) {
                        self.error(
                            Diagnostic::error(Category::SortMismatch, p.compare.span, "a comparator returns a Boolean")
                                .expected("Boolean", r.to_string()),
                        );
                    }
                }
                self.predict(e.span, &tt);
                Ty::Table(tt)
            }
        }
    }

    fn unbound(&mut self, name: &str, span: Span) {
        let recursive = self.binding.as_deref() == Some(name)
            || self
                .active
                .iter()
                .any(|id| self.defined.iter().any(|c| c.id == *id && c.name.as_deref() == Some(name)));
        if recursive {
            self.error(
                Diagnostic::error(Category::Recursion, span, format!("{name} refers to itself"))
                    .note("recursive functions are not supported; use a `for` loop"),
            );
        } else {
            self.error(Diagnostic::error(Category::UnboundVariable, span, format!("{name} is not bound")));
        }
    }

    /// Applies narrowing facts: an optional read already known not to be
    /// missing has the underlying type.
    fn narrow(&self, e: &Expr, t: Ty) -> Ty {
        match t {
            Ty::Optional(inner) if narrow_key(e).is_some_and(|k| self.narrowed.contains(&k)) => *inner,
            t => t,
        }
    }

    fn seq_literal(&mut self, items: &[Expr]) -> Ty {
        let mut elem = Ty::Never;
        let mut names = Some(Vec::new());
        for item in items {
            let t = self.expr(item);
            let t = self.storable(t, item);
            match (&mut names, t.fact()) {
                (Some(ns), Some(NameFact::Known(n))) => ns.push(n.clone()),
                _ => names = None,
            }
            let j = Ty::join(&elem, &t);
            if j.is_unknown() && !elem.is_unknown() && !t.is_unknown() {
                self.error(
                    Diagnostic::error(Category::SortMismatch, item.span, "sequence elements must share one sort")
                        .expected(elem.to_string(), t.to_string()),
                );
            }
            elem = j;
        }
        if elem.is_unknown() {
            return Ty::Unknown;
        }
        Ty::Seq(
            Box::new(elem),
            SeqInfo {
                len: Some(items.len()),
                names,
            },
        )
    }

    /// Values that can be stored in a sequence or a cell.
    fn storable(&mut self, t: Ty, e: &Expr) -> Ty {
        match t {
            Ty::Optional(_) => {
                self.missing_error(e.span);
                Ty::Unknown
            }
            Ty::Row(_) | Ty::Fun(_) | Ty::Nothing => {
                self.error(Diagnostic::error(
                    Category::SortMismatch,
                    e.span,
                    format!("a {t} cannot be stored in a sequence or a cell"),
                ));
                Ty::Unknown
            }
            t => t,
        }
    }

    pub(crate) fn missing_error(&mut self, span: Span) {
        self.error(
            Diagnostic::error(Category::IllegalMissing, span, "this value may be missing")
                .note("check it with isMissing or supply a default with withDefault"),
        );
    }

    /// Strips optionality, reporting it as an error.
    pub(crate) fn present(&mut self, t: Ty, span: Span) -> Ty {
        match t {
            Ty::Optional(inner) => {
                self.missing_error(span);
                *inner
            }
            t => t,
        }
    }

    fn require_value(&mut self, t: Ty, e: &Expr) -> Ty {
        match t {
            Ty::Nothing => {
                self.error(Diagnostic::error(
                    Category::SortMismatch,
                    e.span,
                    format!("`{}` produces no value", pretty_expr(e)),
                ));
                Ty::Unknown
            }
            t => self.present(t, e.span),
        }
    }

    fn expect_bool(&mut self, t: Ty, e: &Expr, what: &str) {
        match self.require_value(t, e) {
            Ty::Bool | Ty::Unknown => {}
            t => self.error(
                Diagnostic::error(Category::SortMismatch, e.span, format!("{what} needs a Boolean"))
                    .expected("Boolean", t.to_string()),
            ),
        }
    }

    fn expect_num(&mut self, t: Ty, e: &Expr, what: &str) {
        match self.require_value(t, e) {
            Ty::Num | Ty::Unknown => {}
            t => self.error(
                Diagnostic::error(Category::SortMismatch, e.span, format!("{what} needs a Number"))
                    .expected("Number", t.to_string()),
            ),
        }
    }

    fn binary(&mut self, op: BinOp, lhs: &Expr, rhs: &Expr, span: Span) -> Ty {
        let lt = self.expr(lhs);
        let rt = match op {
            BinOp::And | BinOp::Or => {
                let saved = self.narrowed.len();
                self.narrowed.extend(facts(lhs, op == BinOp::And));
                let t = self.expr(rhs);
                self.narrowed.truncate(saved);
                t
            }
            _ => self.expr(rhs),
        };
        match op {
            BinOp::And | BinOp::Or => {
                self.expect_bool(lt, lhs, &format!("`{}`", op.symbol()));
                self.expect_bool(rt, rhs, &format!("`{}`", op.symbol()));
                Ty::Bool
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
                let what = format!("`{}`", op.symbol());
                self.expect_num(lt, lhs, &what);
                self.expect_num(rt, rhs, &what);
                Ty::Num
            }
            BinOp::Append => {
                let l = self.require_value(lt, lhs);
                let r = self.require_value(rt, rhs);
                let fact = |t: &Ty, e: &Expr, me: &mut Self| match t {
                    Ty::Str(f) | Ty::Name(f) => f.clone(),
                    Ty::Unknown => NameFact::Unknown,
                    other => {
                        me.error(
                            Diagnostic::error(Category::SortMismatch, e.span, "`++` joins strings")
                                .expected("String", other.to_string()),
                        );
                        NameFact::Unknown
                    }
                };
                let lf = fact(&l, lhs, self);
                let rf = fact(&r, rhs, self);
                Ty::Str(NameFact::concat(&lf, &rf))
            }
            BinOp::Eq | BinOp::NotEq => {
                let l = self.require_value(lt, lhs);
                let r = self.require_value(rt, rhs);
                if !Ty::comparable(&l, &r) {
                    self.error(
                        Diagnostic::error(
                            Category::SortMismatch,
                            span,
                            format!("cannot compare a {l} with a {r}"),
                        )
                        .expected(l.to_string(), r.to_string()),
                    );
                }
                Ty::Bool
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                let l = self.require_value(lt, lhs);
                let r = self.require_value(rt, rhs);
                let ordered = matches!(
                    (&l, &r),
                    (Ty::Unknown, _)
                        | (_, Ty::Unknown)
                        | (Ty::Num, Ty::Num)
                        | (Ty::Bool, Ty::Bool)
                        | (Ty::Str(_) | Ty::Name(_), Ty::Str(_) | Ty::Name(_))
                );
                if !ordered {
                    self.error(
                        Diagnostic::error(
                            Category::SortMismatch,
                            span,
                            format!("`{}` compares two Numbers, Strings or Booleans", op.symbol()),
                        )
                        .expected(l.to_string(), r.to_string()),
                    );
                }
                Ty::Bool
            }
        }
    }

    fn index(&mut self, target: Ty, target_e: &Expr, index: Ty, index_e: &Expr, span: Span) -> Ty {
        let target = self.require_value(target, target_e);
        let index = self.require_value(index, index_e);
        match (&target, &index) {
            (Ty::Unknown, _) => Ty::Unknown,
            (Ty::Row(tt), Ty::Str(f) | Ty::Name(f)) => {
                let tt = tt.clone();
                let f = f.clone();
                self.column_ref(&tt, &f, span, &pretty_expr(target_e))
            }
            (Ty::Row(_), Ty::Unknown) => Ty::Unknown,
            (Ty::Seq(e, _), Ty::Num | Ty::Unknown) => match &**e {
                Ty::Never => Ty::Unknown,
                e => e.clone(),
            },
            (Ty::Row(_), other) => {
                self.error(
                    Diagnostic::error(Category::SortMismatch, index_e.span, "rows are indexed by column name")
                        .expected("ColName", other.to_string()),
                );
                Ty::Unknown
            }
            (Ty::Seq(..), other) => {
                self.error(
                    Diagnostic::error(Category::SortMismatch, index_e.span, "sequences are indexed by position")
                        .expected("Number", other.to_string()),
                );
                Ty::Unknown
            }
            (other, _) => {
                self.error(
                    Diagnostic::error(Category::SortMismatch, target_e.span, "only rows and sequences can be indexed")
                        .expected("Row or Seq", other.to_string()),
                );
                Ty::Unknown
            }
        }
    }

    /// The type of reading the column named by `fact` from a row of `tt`.
    pub(crate) fn column_ref(&mut self, tt: &TableType, fact: &NameFact, span: Span, receiver: &str) -> Ty {
        let header = tt.names();
        match fact.candidates() {
            Some(cands) => {
                let mut found: Vec<(String, Ty)> = Vec::new();
                for c in &cands {
                    match self.column_type(tt, c, matches!(fact, NameFact::Known(_))) {
                        Some(t) => found.push((c.clone(), t)),
                        None => {
                            let msg = if cands.len() == 1 {
                                format!("column {} is not in the header", crate::model::quote(c))
                            } else {
                                format!(
                                    "column {} (one possible value of this name) is not in the header",
                                    crate::model::quote(c)
                                )
                            };
                            let mut d = Diagnostic::error(Category::UnknownColumn, span, msg)
                                .expected(format!("one of {}", header.join(", ")), c.clone())
                                .with_suggestions(suggest_columns_for(c, &header, receiver));
                            if let Some(n) = tt.open_note() {
                                d = d.note(n);
                            }
                            self.error(d);
                            return Ty::Unknown;
                        }
                    }
                }
                self.common_type(found, span)
            }
            None => {
                let mut found: Vec<(String, Ty)> =
                    tt.columns.iter().map(|c| (c.name.to_string(), Ty::of_column(c))).collect();
                if let Some(r) = &tt.rest {
                    let t = Ty::of_sort(&r.sort);
                    let t = if r.optional == Some(false) { t } else { Ty::Optional(Box::new(t)) };
                    found.push(("...".into(), t));
                }
                if found.is_empty() {
                    return Ty::Unknown;
                }
                self.common_type(found, span)
            }
        }
    }

    /// A literal name must denote one of the statically known columns;
    /// a computed one may also land in the open tail.
    fn column_type(&self, tt: &TableType, name: &str, literal: bool) -> Option<Ty> {
        if let Some(c) = tt.column(name) {
            return Some(Ty::of_column(c));
        }
        if !literal && tt.rest_may_have(name) {
            let r = tt.rest.as_ref().expect("rest");
            let t = Ty::of_sort(&r.sort);
            return Some(if r.optional == Some(false) { t } else { Ty::Optional(Box::new(t)) });
        }
        None
    }

    /// Candidates must agree on one sort; differing optionality widens to
    /// optional.
    fn common_type(&mut self, found: Vec<(String, Ty)>, span: Span) -> Ty {
        let strip = |t: &Ty| match t {
            Ty::Optional(i) => (*i.clone(), true),
            t => (t.clone(), false),
        };
        let mut sorts: Vec<Ty> = Vec::new();
        let mut optional = false;
        for (_, t) in &found {
            let (base, o) = strip(t);
            optional |= o;
            if !sorts.contains(&base) {
                sorts.push(base);
            }
        }
        if sorts.len() > 1 {
            let listed: Vec<String> = sorts.iter().map(Ty::to_string).collect();
            let by_sort: Vec<String> = found.iter().map(|(n, t)| format!("{n}: {t}")).collect();
            self.error(
                Diagnostic::error(
                    Category::HeterogeneousDynamicAccess,
                    span,
                    format!("the columns this name may denote have different sorts: {}", listed.join(", ")),
                )
                .note(format!("candidates: {}", by_sort.join(", ")))
                .note("narrow the table with dropColumns or selectColumns first"),
            );
            return Ty::Unknown;
        }
        let base = sorts.pop().expect("non-empty");
        if optional {
            Ty::Optional(Box::new(base))
        } else {
            base
        }
    }

    // ---- calls ----

    fn apply(&mut self, ft: &Ty, callee: &Expr, args: Vec<Arg>, span: Span) -> Ty {
        match ft {
            Ty::Fun(FunTy::Builtin(name)) => self.builtin(name, args, span),
            Ty::Fun(FunTy::Closure(c)) => {
                let c = c.clone();
                self.call_closure(&c, args, span)
            }
            Ty::Unknown => Ty::Unknown,
            other => {
                self.error(
                    Diagnostic::error(
                        Category::SortMismatch,
                        callee.span,
                        format!("`{}` is not a function", pretty_expr(callee)),
                    )
                    .expected("Function", other.to_string()),
                );
                Ty::Unknown
            }
        }
    }

    /// Calls a function value with argument types supplied by a Table API
    /// operation.
    pub(crate) fn call_value(&mut self, ft: &Ty, fe: &Expr, args: Vec<Ty>, span: Span) -> Ty {
        let args = args.into_iter().map(|ty| Arg { ty, span }).collect();
        self.apply(ft, fe, args, span)
    }

    pub(crate) fn call_closure(&mut self, c: &Arc<ClosureTy>, args: Vec<Arg>, span: Span) -> Ty {
        let params = &c.def.params;
        if params.len() != args.len() {
            self.error(
                Diagnostic::error(
                    Category::ArityMismatch,
                    span,
                    format!("this function takes {} arguments but {} were given", params.len(), args.len()),
                )
                .expected(params.len().to_string(), args.len().to_string()),
            );
            return Ty::Unknown;
        }
        if self.active.contains(&c.id) {
            let who = c.name.clone().unwrap_or_else(|| "a function".into());
            self.error(Diagnostic::error(Category::Recursion, span, format!("{who} calls itself")));
            return Ty::Unknown;
        }
        if self.active.len() >= MAX_CALL_DEPTH {
            self.error(Diagnostic::error(
                Category::Recursion,
                span,
                format!("function calls nest deeper than {MAX_CALL_DEPTH}"),
            ));
            return Ty::Unknown;
        }
        let locals = params
            .iter()
            .zip(args)
            .map(|((p, ps), a)| {
                (
                    p.clone(),
                    Local {
                        ty: a.ty,
                        span: *ps,
                        used: false,
                        param: true,
                    },
                )
            })
            .collect();
        self.frames.push(Frame {
            locals,
            captured: c.env.clone(),
            function: true,
        });
        self.active.push(c.id);
        self.invoked.insert(c.id);
        let narrowed = std::mem::take(&mut self.narrowed);
        let binding = self.binding.take();
        let result = self.block(&c.def.body);
        self.binding = binding;
        self.narrowed = narrowed;
        self.active.pop();
        let frame = self.frames.pop().expect("function frame");
        if frame.function {
            for (name, l) in &frame.locals {
                if !l.used && !l.param {
                    self.error(Diagnostic::warning(
                        Category::UnusedBinding,
                        l.span,
                        format!("{name} is assigned but never used"),
                    ));
                }
            }
        }
        result
    }

    /// Functions that are defined but never called are still checked once,
    /// with unknown arguments.
    fn check_uncalled(&mut self) {
        let mut i = 0;
        while i < self.defined.len() {
            let c = self.defined[i].clone();
            i += 1;
            if self.invoked.contains(&c.id) {
                continue;
            }
            let speculative = std::mem::replace(&mut self.speculative, true);
            let args = c
                .def
                .params
                .iter()
                .map(|(_, s)| Arg {
                    ty: Ty::Unknown,
                    span: *s,
                })
                .collect();
            self.call_closure(&c, args, c.def.span);
            self.speculative = speculative;
        }
    }

    // ---- table literals ----

    fn table_literal(&mut self, lit: &TableLit) -> Ty {
        for (i, h) in lit.header.iter().enumerate() {
            if lit.header[..i].iter().any(|o| o.name == h.name) {
                // Cells are still checked so their own errors surface.
                for row in &lit.rows {
                    for cell in row.cells.iter().filter_map(|c| c.value.as_ref()) {
                        self.expr(cell);
                    }
                }
                self.error(Diagnostic::error(
                    Category::DuplicateColumn,
                    h.span,
                    format!("column {} appears more than once in the header", crate::model::quote(&h.name)),
                ));
                return Ty::Unknown;
            }
        }
        let grid: Vec<Vec<Option<Ty>>> = lit
            .rows
            .iter()
            .map(|row| {
                row.cells
                    .iter()
                    .map(|c| c.value.as_ref().map(|e| self.expr(e)))
                    .collect()
            })
            .collect();
        let width = lit.header.len();
        let mut columns = Vec::with_capacity(width);
        let mut unknown = false;
        for (j, h) in lit.header.iter().enumerate() {
            let cells = grid.iter().filter_map(|r| r.get(j));
            let (sort, optional) = match &h.sort {
                Some(s) => (s.clone(), h.optional),
                None => {
                    let mut blank = false;
                    let mut first = None;
                    for c in cells {
                        match c {
                            None | Some(Ty::Optional(_)) => blank = true,
                            Some(t) if first.is_none() => first = Some(t.clone()),
                            _ => {}
                        }
                    }
                    match first {
                        None => (Sort::String, true),
                        Some(t) => match t.sort() {
                            Some(s) => (s, blank || h.optional),
                            None => {
                                unknown = true;
                                (Sort::String, true)
                            }
                        },
                    }
                }
            };
            columns.push(Column {
                name: ColName::new(&h.name).expect("parser rejects empty names"),
                sort,
                optional,
            });
        }
        for (r, row) in lit.rows.iter().enumerate() {
            if row.cells.len() != width {
                self.error(
                    Diagnostic::error(
                        Category::RaggedRow,
                        row.span,
                        format!("row {} has {} cells but the header has {width} columns", r + 1, row.cells.len()),
                    )
                    .expected(width.to_string(), row.cells.len().to_string()),
                );
                return Ty::Unknown;
            }
            for (j, cell) in row.cells.iter().enumerate() {
                let col = &columns[j];
                let name = col.name.to_string();
                match &grid[r][j] {
                    None if !col.optional => {
                        self.error(
                            Diagnostic::error(
                                Category::IllegalMissing,
                                cell.span,
                                format!("column {} is not optional but this cell is empty", crate::model::quote(&name)),
                            )
                            .at_cell(r + 1, name.clone())
                            .note(format!("mark the column optional with `{}?`", col)),
                        );
                        return Ty::Unknown;
                    }
                    Some(t) if !cell_fits(t, col) => {
                        let t = t.clone();
                        let fits = |d: usize, h: usize| {
                            grid.iter().all(|row| match &row[d] {
                                None => columns[h].optional,
                                Some(t) => cell_fits(t, &columns[h]),
                            })
                        };
                        let names: Vec<String> = columns.iter().map(|c| c.name.to_string()).collect();
                        let swap = detect_column_swap(&names, &fits);
                        let mut d = Diagnostic::error(
                            Category::SortMismatch,
                            cell.span,
                            format!("column {} holds {} but this cell is a {}", crate::model::quote(&name), col.sort, t),
                        )
                        .expected(col.sort.to_string(), t.to_string())
                        .at_cell(r + 1, name.clone());
                        if let Some(s) = swap {
                            let header_span = lit.header[0].span.to(lit.header[width - 1].span);
                            self.error(
                                Diagnostic::warning(
                                    Category::SwappedColumns,
                                    header_span,
                                    "the rows disagree with the header on the order of the columns",
                                )
                                .with_suggestions(vec![s.clone()]),
                            );
                            d = d.with_suggestions(vec![s]);
                        }
                        self.error(d);
                        return Ty::Unknown;
                    }
                    _ => {}
                }
            }
        }
        if unknown {
            return Ty::Unknown;
        }
        Ty::Table(TableType::closed(columns, Some(lit.rows.len())))
    }
}

fn cell_fits(t: &Ty, col: &Column) -> bool {
    match t {
        Ty::Optional(inner) => col.optional && inner.fits(&col.sort),
        t => t.fits(&col.sort),
    }
}

/// The text that identifies a narrowable expression: a variable or a
/// literal-keyed read from one.
fn narrow_key(e: &Expr) -> Option<String> {
    match &e.kind {
        ExprKind::Var(_) => Some(pretty_expr(e)),
        ExprKind::Index { target, index } => match (&target.kind, &index.kind) {
            (ExprKind::Var(_), ExprKind::Str(_) | ExprKind::Number(_)) => Some(pretty_expr(e)),
            _ => None,
        },
        _ => None,
    }
}

/// Expressions known not to be missing when `cond` evaluates to `truth`.
fn facts(cond: &Expr, truth: bool) -> Vec<String> {
    match &cond.kind {
        ExprKind::Not(inner) => facts(inner, !truth),
        ExprKind::Call { callee, args } if !truth && args.len() == 1 => match &callee.kind {
            ExprKind::Var(f) if f == "isMissing" => narrow_key(&args[0]).into_iter().collect(),
            _ => Vec::new(),
        },
        ExprKind::Binary { op: BinOp::And, lhs, rhs } if truth => {
            let mut v = facts(lhs, true);
            v.extend(facts(rhs, true));
            v
        }
        ExprKind::Binary { op: BinOp::Or, lhs, rhs } if !truth => {
            let mut v = facts(lhs, false);
            v.extend(facts(rhs, false));
            v
        }
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests;
