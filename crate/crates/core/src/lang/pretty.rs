use super::ast::*;
use crate::model::{format_number, name_literal, quote};

/// Renders a program as source text that parses back to the same tree.
pub fn pretty_program(p: &Program) -> String {
    let mut out = String::new();
    for s in &p.stmts {
        stmt(&mut out, s, 0);
    }
    out
}

pub fn pretty_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, 0);
    out
}

fn pad(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn block(out: &mut String, b: &Block, depth: usize) {
    for s in &b.stmts {
        stmt(out, s, depth);
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    pad(out, depth);
    match &s.kind {
        StmtKind::Bind { name, value, .. } => {
            out.push_str(name);
            out.push_str(" = ");
            expr(out, value, depth);
        }
        StmtKind::Expr(e) => expr(out, e, depth),
        StmtKind::Println(e) => {
            out.push_str("println(");
            expr(out, e, depth);
            out.push(')');
        }
        StmtKind::For { var, iter, body, .. } => {
            out.push_str("for ");
            out.push_str(var);
            out.push_str(" in ");
            expr(out, iter, depth);
            out.push_str(":\n");
            block(out, body, depth + 1);
            pad(out, depth);
            out.push_str("end");
        }
        StmtKind::If {
            cond,
            then,
            otherwise,
        } => {
            out.push_str("if ");
            expr(out, cond, depth);
            out.push_str(":\n");
            block(out, then, depth + 1);
            if let Some(b) = otherwise {
                pad(out, depth);
                out.push_str("else:\n");
                block(out, b, depth + 1);
            }
            pad(out, depth);
            out.push_str("end");
        }
    }
    out.push('\n');
}

fn is_compound(e: &Expr) -> bool {
    matches!(
        e.kind,
        ExprKind::Binary { .. }
            | ExprKind::Not(_)
            | ExprKind::Neg(_)
            | ExprKind::Function(_)
            | ExprKind::Table(_)
    )
}

fn atom(out: &mut String, e: &Expr, depth: usize) {
    if is_compound(e) {
        out.push('(');
        expr(out, e, depth);
        out.push(')');
    } else {
        expr(out, e, depth);
    }
}

fn list(out: &mut String, items: &[Expr], depth: usize) {
    for (i, e) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(out, e, depth);
    }
}

fn expr(out: &mut String, e: &Expr, depth: usize) {
    match &e.kind {
        ExprKind::Number(n) => out.push_str(&format_number(*n)),
        ExprKind::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::Str(s) => out.push_str(&quote(s)),
        ExprKind::Var(v) => out.push_str(v),
        ExprKind::Seq(items) => {
            out.push('[');
            list(out, items, depth);
            out.push(']');
        }
        ExprKind::Call { callee, args } => {
            atom(out, callee, depth);
            out.push('(');
            list(out, args, depth);
            out.push(')');
        }
        ExprKind::Index { target, index } => {
            atom(out, target, depth);
            out.push('[');
            expr(out, index, depth);
            out.push(']');
        }
        ExprKind::Binary { op, lhs, rhs } => {
            atom(out, lhs, depth);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            atom(out, rhs, depth);
        }
        ExprKind::Not(inner) => {
            out.push_str("not ");
            atom(out, inner, depth);
        }
        ExprKind::Neg(inner) => {
            out.push('-');
            atom(out, inner, depth);
        }
        ExprKind::OrderBy { table, pairs } => {
            out.push_str("orderBy(");
            expr(out, table, depth);
            out.push_str(", [");
            for (i, p) in pairs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push('(');
                expr(out, &p.get_key, depth);
                out.push_str(", ");
                expr(out, &p.compare, depth);
                out.push(')');
            }
            out.push_str("])");
        }
        ExprKind::Function(def) => {
            out.push_str("function(");
            let params: Vec<&str> = def.params.iter().map(|(p, _)| p.as_str()).collect();
            out.push_str(&params.join(", "));
            out.push_str("):\n");
            block(out, &def.body, depth + 1);
            pad(out, depth);
            out.push_str("end");
        }
        ExprKind::Table(lit) => {
            out.push_str("table:\n");
            if !lit.header.is_empty() {
                pad(out, depth + 1);
                let cells: Vec<String> = lit
                    .header
                    .iter()
                    .map(|h| {
                        let mut s = name_literal(&h.name);
                        if let Some(sort) = &h.sort {
                            s.push_str(&format!(": {sort}"));
                            if h.optional {
                                s.push('?');
                            }
                        }
                        s
                    })
                    .collect();
                out.push_str(&cells.join(" | "));
                out.push('\n');
            }
            for row in &lit.rows {
                pad(out, depth + 1);
                for (i, c) in row.cells.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    match &c.value {
                        None => out.push('_'),
                        Some(v) => expr(out, v, depth + 1),
                    }
                }
                out.push('\n');
            }
            pad(out, depth);
            out.push_str("end");
        }
    }
}
