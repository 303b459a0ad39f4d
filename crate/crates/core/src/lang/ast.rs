use std::sync::Arc;

use super::span::Span;
use crate::model::Sort;

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    /// `name = expr`. Rebinding an existing name updates it.
    Bind {
        name: String,
        name_span: Span,
        value: Expr,
    },
    Expr(Expr),
    For {
        var: String,
        var_span: Span,
        iter: Expr,
        body: Block,
    },
    If {
        cond: Expr,
        then: Block,
        otherwise: Option<Block>,
    },
    Println(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Append,
    And,
    Or,
    Eq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Append => "++",
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Eq => "==",
            BinOp::NotEq => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::NotEq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Append | BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(f64),
    Bool(bool),
    Str(String),
    Seq(Vec<Expr>),
    Table(TableLit),
    Var(String),
    Function(Arc<FunctionDef>),
    Call { callee: Box<Expr>, args: Vec<Expr> },
    /// `target[index]`: a row indexed by column name, or a sequence by
    /// position.
    Index { target: Box<Expr>, index: Box<Expr> },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Not(Box<Expr>),
    Neg(Box<Expr>),
    /// `orderBy(t, [(getKey, compare), ...])`, a special form.
    OrderBy { table: Box<Expr>, pairs: Vec<OrderPair> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub params: Vec<(String, Span)>,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderPair {
    pub get_key: Expr,
    pub compare: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableLit {
    pub header: Vec<HeaderCell>,
    pub rows: Vec<LitRow>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeaderCell {
    pub name: String,
    pub sort: Option<Sort>,
    pub optional: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LitRow {
    pub cells: Vec<LitCell>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LitCell {
    /// `None` for the blank marker `_`.
    pub value: Option<Expr>,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }
}

/// Calls `f(parent, child)` for every parent/child span pair in the tree.
pub trait SpanTree {
    fn span(&self) -> Span;
    fn visit_children(&self, f: &mut dyn FnMut(Span, Span));
}

impl SpanTree for Program {
    fn span(&self) -> Span {
        self.span
    }
    fn visit_children(&self, f: &mut dyn FnMut(Span, Span)) {
        for s in &self.stmts {
            f(self.span, s.span);
            s.visit_children(f);
        }
    }
}

impl SpanTree for Block {
    fn span(&self) -> Span {
        self.span
    }
    fn visit_children(&self, f: &mut dyn FnMut(Span, Span)) {
        for s in &self.stmts {
            f(self.span, s.span);
            s.visit_children(f);
        }
    }
}

impl SpanTree for Stmt {
    fn span(&self) -> Span {
        self.span
    }
    fn visit_children(&self, f: &mut dyn FnMut(Span, Span)) {
        let me = self.span;
        let expr = |e: &Expr, f: &mut dyn FnMut(Span, Span)| {
            f(me, e.span);
            e.visit_children(f);
        };
        match &self.kind {
            StmtKind::Bind { value, name_span, .. } => {
                f(me, *name_span);
                expr(value, f);
            }
            StmtKind::Expr(e) | StmtKind::Println(e) => expr(e, f),
            StmtKind::For {
                iter, body, var_span, ..
            } => {
                f(me, *var_span);
                expr(iter, f);
                f(me, body.span);
                body.visit_children(f);
            }
            StmtKind::If {
                cond,
                then,
                otherwise,
            } => {
                expr(cond, f);
                f(me, then.span);
                then.visit_children(f);
                if let Some(b) = otherwise {
                    f(me, b.span);
                    b.visit_children(f);
                }
            }
        }
    }
}

impl SpanTree for Expr {
    fn span(&self) -> Span {
        self.span
    }
    fn visit_children(&self, f: &mut dyn FnMut(Span, Span)) {
        let me = self.span;
        let sub = |e: &Expr, f: &mut dyn FnMut(Span, Span)| {
            f(me, e.span);
            e.visit_children(f);
        };
        match &self.kind {
            ExprKind::Number(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Var(_) => {}
            ExprKind::Seq(items) => items.iter().for_each(|e| sub(e, f)),
            ExprKind::Table(lit) => {
                for h in &lit.header {
                    f(me, h.span);
                }
                for row in &lit.rows {
                    f(me, row.span);
                    for cell in &row.cells {
                        f(row.span, cell.span);
                        if let Some(e) = &cell.value {
                            f(cell.span, e.span);
                            e.visit_children(f);
                        }
                    }
                }
            }
            ExprKind::Function(def) => {
                for (_, s) in &def.params {
                    f(me, *s);
                }
                f(me, def.body.span);
                def.body.visit_children(f);
            }
            ExprKind::Call { callee, args } => {
                sub(callee, f);
                args.iter().for_each(|e| sub(e, f));
            }
            ExprKind::Index { target, index } => {
                sub(target, f);
                sub(index, f);
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                sub(lhs, f);
                sub(rhs, f);
            }
            ExprKind::Not(e) | ExprKind::Neg(e) => sub(e, f),
            ExprKind::OrderBy { table, pairs } => {
                sub(table, f);
                for p in pairs {
                    f(me, p.span);
                    f(p.span, p.get_key.span);
                    p.get_key.visit_children(f);
                    f(p.span, p.compare.span);
                    p.compare.visit_children(f);
                }
            }
        }
    }
}

/// A copy of the tree with every span reset, for comparing programs
/// modulo source positions.
pub trait EraseSpans {
    fn erase_spans(&self) -> Self;
}

impl EraseSpans for Program {
    fn erase_spans(&self) -> Self {
        Program {
            stmts: self.stmts.iter().map(EraseSpans::erase_spans).collect(),
            span: Span::default(),
        }
    }
}

impl EraseSpans for Block {
    fn erase_spans(&self) -> Self {
        Block {
            stmts: self.stmts.iter().map(EraseSpans::erase_spans).collect(),
            span: Span::default(),
        }
    }
}

impl EraseSpans for Stmt {
    fn erase_spans(&self) -> Self {
        let kind = match &self.kind {
            StmtKind::Bind { name, value, .. } => StmtKind::Bind {
                name: name.clone(),
                name_span: Span::default(),
                value: value.erase_spans(),
            },
            StmtKind::Expr(e) => StmtKind::Expr(e.erase_spans()),
            StmtKind::Println(e) => StmtKind::Println(e.erase_spans()),
            StmtKind::For { var, iter, body, .. } => StmtKind::For {
                var: var.clone(),
                var_span: Span::default(),
                iter: iter.erase_spans(),
                body: body.erase_spans(),
            },
            StmtKind::If {
                cond,
                then,
                otherwise,
            } => StmtKind::If {
                cond: cond.erase_spans(),
                then: then.erase_spans(),
                otherwise: otherwise.as_ref().map(EraseSpans::erase_spans),
            },
        };
        Stmt {
            kind,
            span: Span::default(),
        }
    }
}

impl EraseSpans for Expr {
    fn erase_spans(&self) -> Self {
        let b = |e: &Expr| Box::new(e.erase_spans());
        let kind = match &self.kind {
            ExprKind::Seq(items) => ExprKind::Seq(items.iter().map(EraseSpans::erase_spans).collect()),
            ExprKind::Table(lit) => ExprKind::Table(TableLit {
                header: lit
                    .header
                    .iter()
                    .map(|h| HeaderCell {
                        span: Span::default(),
                        ..h.clone()
                    })
                    .collect(),
                rows: lit
                    .rows
                    .iter()
                    .map(|r| LitRow {
                        cells: r
                            .cells
                            .iter()
                            .map(|c| LitCell {
                                value: c.value.as_ref().map(EraseSpans::erase_spans),
                                span: Span::default(),
                            })
                            .collect(),
                        span: Span::default(),
                    })
                    .collect(),
                span: Span::default(),
            }),
            ExprKind::Function(def) => ExprKind::Function(Arc::new(FunctionDef {
                params: def
                    .params
                    .iter()
                    .map(|(p, _)| (p.clone(), Span::default()))
                    .collect(),
                body: def.body.erase_spans(),
                span: Span::default(),
            })),
            ExprKind::Call { callee, args } => ExprKind::Call {
                callee: b(callee),
                args: args.iter().map(EraseSpans::erase_spans).collect(),
            },
            ExprKind::Index { target, index } => ExprKind::Index {
                target: b(target),
                index: b(index),
            },
            ExprKind::Binary { op, lhs, rhs } => ExprKind::Binary {
                op: *op,
                lhs: b(lhs),
                rhs: b(rhs),
            },
            ExprKind::Not(e) => ExprKind::Not(b(e)),
            ExprKind::Neg(e) => ExprKind::Neg(b(e)),
            ExprKind::OrderBy { table, pairs } => ExprKind::OrderBy {
                table: b(table),
                pairs: pairs
                    .iter()
                    .map(|p| OrderPair {
                        get_key: p.get_key.erase_spans(),
                        compare: p.compare.erase_spans(),
                        span: Span::default(),
                    })
                    .collect(),
            },
            other => other.clone(),
        };
        Expr {
            kind,
            span: Span::default(),
        }
    }
}
