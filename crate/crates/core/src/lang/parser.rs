use std::sync::Arc;

use super::ast::*;
use super::lexer::{Token, TokenKind};
use super::span::{Pos, Span};
use super::SyntaxError;
use crate::model::{ColName, Column, Schema, Sort};

type PResult<T> = Result<T, SyntaxError>;

/// Parses a token stream into a program.
pub fn parse_program(tokens: &[Token]) -> PResult<Program> {
    let mut p = Parser::new(tokens);
    let block = p.block(&[])?;
    Ok(Program {
        stmts: block.stmts,
        span: block.span,
    })
}

/// Parses a single expression (used to validate rewrite suggestions).
pub fn parse_expr(tokens: &[Token]) -> PResult<Expr> {
    let mut p = Parser::new(tokens);
    let e = p.expr()?;
    p.skip_newlines();
    if let Some(t) = p.peek_raw() {
        return Err(p.unexpected_at(t, vec!["end of input".into()]));
    }
    Ok(e)
}

/// Parses the header line of a table literal on its own, as used by
/// schema sidecar files: `name: Sort | other: Sort? | ...`.
pub fn parse_header_line(tokens: &[Token]) -> PResult<Vec<HeaderCell>> {
    let mut p = Parser::new(tokens);
    p.skip_newlines();
    let header = p.header_row()?;
    p.skip_newlines();
    if let Some(t) = p.peek_raw() {
        return Err(p.unexpected_at(t, vec!["end of input".into()]));
    }
    Ok(header)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    /// Newlines are insignificant inside parentheses and brackets.
    nesting: usize,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        Parser {
            tokens,
            pos: 0,
            nesting: 0,
        }
    }

    fn peek_raw(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek(&mut self) -> Option<&'t Token> {
        if self.nesting > 0 {
            self.skip_newlines();
        }
        self.tokens.get(self.pos)
    }

    fn peek_kind(&mut self) -> Option<&'t TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn at(&mut self, kind: &TokenKind) -> bool {
        self.peek_kind() == Some(kind)
    }

    fn skip_newlines(&mut self) {
        while matches!(self.tokens.get(self.pos), Some(t) if t.kind == TokenKind::Newline) {
            self.pos += 1;
        }
    }

    fn advance(&mut self) -> &'t Token {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        t
    }

    fn eof_span(&self) -> Span {
        match self.tokens.last() {
            Some(t) => Span::new(t.span.file, t.span.end, t.span.end),
            None => Span::new(0, Pos::new(1, 1), Pos::new(1, 1)),
        }
    }

    fn last_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn unexpected_at(&self, t: &Token, expected: Vec<String>) -> SyntaxError {
        SyntaxError::Parse {
            span: t.span,
            expected,
            found: t.kind.to_string(),
        }
    }

    fn unexpected(&mut self, expected: Vec<String>) -> SyntaxError {
        match self.peek() {
            Some(t) => self.unexpected_at(t, expected),
            None => SyntaxError::Parse {
                span: self.eof_span(),
                expected,
                found: "end of input".into(),
            },
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<&'t Token> {
        if self.at(&kind) {
            Ok(self.advance())
        } else {
            Err(self.unexpected(vec![kind.describe()]))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(name),
                span,
            }) => {
                self.pos += 1;
                Ok((name.clone(), *span))
            }
            _ => Err(self.unexpected(vec!["identifier".into()])),
        }
    }

    /// Runs `f` with newlines significant again (inside a block nested in
    /// parentheses).
    fn with_lines<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let saved = std::mem::replace(&mut self.nesting, 0);
        let r = f(self);
        self.nesting = saved;
        r
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.nesting += 1;
        let r = f(self);
        self.nesting -= 1;
        r
    }

    /// Statements up to (not including) one of `terminators`, or end of
    /// input when `terminators` is empty.
    fn block(&mut self, terminators: &[TokenKind]) -> PResult<Block> {
        let mut stmts = Vec::new();
        let start = self.peek_raw().map(|t| t.span);
        loop {
            self.skip_newlines();
            match self.peek_raw() {
                None if terminators.is_empty() => break,
                None => {
                    return Err(self.unexpected(terminators.iter().map(TokenKind::describe).collect()))
                }
                Some(t) if terminators.contains(&t.kind) => break,
                Some(_) => {}
            }
            let stmt = self.stmt()?;
            stmts.push(stmt);
            match self.peek_raw() {
                None => {}
                Some(t) if t.kind == TokenKind::Newline || terminators.contains(&t.kind) => {}
                Some(t) => {
                    let mut expected = vec!["end of line".to_string()];
                    expected.extend(terminators.iter().map(TokenKind::describe));
                    return Err(self.unexpected_at(t, expected));
                }
            }
        }
        let span = match (start, stmts.last()) {
            (Some(s), Some(last)) => s.to(last.span),
            (Some(s), None) => Span::new(s.file, s.start, s.start),
            _ => self.eof_span(),
        };
        Ok(Block { stmts, span })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let first = self.peek_raw().expect("stmt called at end of input");
        let start = first.span;
        match &first.kind {
            TokenKind::For => {
                self.advance();
                let (var, var_span) = self.ident()?;
                self.expect(TokenKind::In)?;
                let iter = self.expr()?;
                self.expect(TokenKind::Colon)?;
                let body = self.block(&[TokenKind::End])?;
                let end = self.expect(TokenKind::End)?.span;
                Ok(Stmt {
                    kind: StmtKind::For {
                        var,
                        var_span,
                        iter,
                        body,
                    },
                    span: start.to(end),
                })
            }
            TokenKind::If => {
                self.advance();
                let cond = self.expr()?;
                self.expect(TokenKind::Colon)?;
                let then = self.block(&[TokenKind::End, TokenKind::Else])?;
                let otherwise = if self.at(&TokenKind::Else) {
                    self.advance();
                    self.expect(TokenKind::Colon)?;
                    Some(self.block(&[TokenKind::End])?)
                } else {
                    None
                };
                let end = self.expect(TokenKind::End)?.span;
                Ok(Stmt {
                    kind: StmtKind::If {
                        cond,
                        then,
                        otherwise,
                    },
                    span: start.to(end),
                })
            }
            TokenKind::Println => {
                self.advance();
                self.expect(TokenKind::LParen)?;
                let arg = self.nested(|p| p.expr())?;
                let end = self.nested(|p| p.expect(TokenKind::RParen))?.span;
                Ok(Stmt {
                    kind: StmtKind::Println(arg),
                    span: start.to(end),
                })
            }
            TokenKind::Ident(name)
                if matches!(self.tokens.get(self.pos + 1), Some(t) if t.kind == TokenKind::Assign) =>
            {
                self.pos += 2;
                self.skip_newlines();
                let value = self.expr()?;
                Ok(Stmt {
                    span: start.to(value.span),
                    kind: StmtKind::Bind {
                        name: name.clone(),
                        name_span: start,
                        value,
                    },
                })
            }
            _ => {
                let e = self.expr()?;
                Ok(Stmt {
                    span: e.span,
                    kind: StmtKind::Expr(e),
                })
            }
        }
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binop(kind: &TokenKind) -> Option<BinOp> {
        Some(match kind {
            TokenKind::Or => BinOp::Or,
            TokenKind::And => BinOp::And,
            TokenKind::EqEq => BinOp::Eq,
            TokenKind::NotEq => BinOp::NotEq,
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Ge => BinOp::Ge,
            TokenKind::Plus => BinOp::Add,
            TokenKind::PlusPlus => BinOp::Append,
            TokenKind::Minus => BinOp::Sub,
            TokenKind::Star => BinOp::Mul,
            TokenKind::Slash => BinOp::Div,
            _ => return None,
        })
    }

    /// Precedence climbing. Comparisons do not associate.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = if min_prec <= 3 && self.at(&TokenKind::Not) {
            let start = self.advance().span;
            let inner = self.binary(3)?;
            Expr::new(ExprKind::Not(Box::new(inner.clone())), start.to(inner.span))
        } else {
            self.unary()?
        };
        while let Some(op) = self.peek_kind().and_then(Self::binop) {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.advance();
            self.skip_newlines();
            let rhs = if prec == 4 {
                self.binary(5)?
            } else {
                self.binary(prec + 1)?
            };
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(
                ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            );
            if prec == 4 {
                if let Some(BinOp::Eq | BinOp::NotEq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge) =
                    self.peek_kind().and_then(Self::binop)
                {
                    return Err(self.unexpected(vec!["a single comparison".into()]));
                }
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.at(&TokenKind::Minus) {
            let start = self.advance().span;
            let inner = self.unary()?;
            let span = start.to(inner.span);
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), span));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            // Postfix operators must start on the same line.
            match self.peek_raw().map(|t| &t.kind) {
                Some(TokenKind::LParen) => {
                    self.advance();
                    if matches!(&e.kind, ExprKind::Var(n) if n == "orderBy") {
                        e = self.order_by(e.span)?;
                        continue;
                    }
                    let args = self.nested(|p| p.comma_list(TokenKind::RParen, |p| p.expr()))?;
                    let end = self.last_span();
                    let span = e.span.to(end);
                    e = Expr::new(
                        ExprKind::Call {
                            callee: Box::new(e),
                            args,
                        },
                        span,
                    );
                }
                Some(TokenKind::LBracket) => {
                    self.advance();
                    let index = self.nested(|p| {
                        let i = p.expr()?;
                        p.expect(TokenKind::RBracket)?;
                        Ok(i)
                    })?;
                    let span = e.span.to(self.last_span());
                    e = Expr::new(
                        ExprKind::Index {
                            target: Box::new(e),
                            index: Box::new(index),
                        },
                        span,
                    );
                }
                _ => break,
            }
        }
        Ok(e)
    }

    /// Items separated by commas, consuming the closing token.
    fn comma_list<T>(
        &mut self,
        close: TokenKind,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        let mut items = Vec::new();
        if self.at(&close) {
            self.advance();
            return Ok(items);
        }
        loop {
            items.push(item(self)?);
            if self.at(&TokenKind::Comma) {
                self.advance();
                continue;
            }
            if self.at(&close) {
                self.advance();
                return Ok(items);
            }
            return Err(self.unexpected(vec![TokenKind::Comma.describe(), close.describe()]));
        }
    }

    fn order_by(&mut self, start: Span) -> PResult<Expr> {
        self.nested(|p| {
            let table = p.expr()?;
            p.expect(TokenKind::Comma)?;
            p.expect(TokenKind::LBracket)?;
            let pairs = p.comma_list(TokenKind::RBracket, |p| {
                let open = p.expect(TokenKind::LParen)?.span;
                let get_key = p.expr()?;
                p.expect(TokenKind::Comma)?;
                let compare = p.expr()?;
                let close = p.expect(TokenKind::RParen)?.span;
                Ok(OrderPair {
                    get_key,
                    compare,
                    span: open.to(close),
                })
            })?;
            let end = p.expect(TokenKind::RParen)?.span;
            Ok(Expr::new(
                ExprKind::OrderBy {
                    table: Box::new(table),
                    pairs,
                },
                start.to(end),
            ))
        })
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(t) = self.peek() else {
            return Err(self.unexpected(vec!["expression".into()]));
        };
        let span = t.span;
        let simple = |kind| Ok(Expr::new(kind, span));
        match &t.kind {
            TokenKind::Num(n) => {
                self.advance();
                simple(ExprKind::Number(*n))
            }
            TokenKind::Str(s) => {
                self.advance();
                simple(ExprKind::Str(s.clone()))
            }
            TokenKind::True | TokenKind::False => {
                self.advance();
                simple(ExprKind::Bool(t.kind == TokenKind::True))
            }
            TokenKind::Ident(name) => {
                self.advance();
                simple(ExprKind::Var(name.clone()))
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.nested(|p| {
                    let e = p.expr()?;
                    p.expect(TokenKind::RParen)?;
                    Ok(e)
                })?;
                Ok(Expr::new(inner.kind, span.to(self.last_span())))
            }
            TokenKind::LBracket => {
                self.advance();
                let items = self.nested(|p| p.comma_list(TokenKind::RBracket, |p| p.expr()))?;
                Ok(Expr::new(ExprKind::Seq(items), span.to(self.last_span())))
            }
            TokenKind::Function => {
                self.advance();
                self.expect(TokenKind::LParen)?;
                let params = self.nested(|p| p.comma_list(TokenKind::RParen, |p| p.ident()))?;
                self.expect(TokenKind::Colon)?;
                let body = self.with_lines(|p| p.block(&[TokenKind::End]))?;
                let end = self.advance().span;
                let full = span.to(end);
                Ok(Expr::new(
                    ExprKind::Function(Arc::new(FunctionDef {
                        params,
                        body,
                        span: full,
                    })),
                    full,
                ))
            }
            TokenKind::Table => {
                self.advance();
                self.expect(TokenKind::Colon)?;
                let lit = self.with_lines(|p| p.table_body(span))?;
                let full = lit.span;
                Ok(Expr::new(ExprKind::Table(lit), full))
            }
            TokenKind::Blank => Err(SyntaxError::Parse {
                span,
                expected: vec!["expression".into()],
                found: "`_` (blank cells are only allowed inside table literals)".into(),
            }),
            _ => Err(self.unexpected(vec!["expression".into()])),
        }
    }

    /// Header line, data lines, `end`. Rows are not checked against the
    /// header here; validation reports ragged rows with better context.
    fn table_body(&mut self, start: Span) -> PResult<TableLit> {
        self.skip_newlines();
        let mut header = Vec::new();
        if !self.at(&TokenKind::End) {
            header = self.header_row()?;
            self.line_end()?;
        }
        let mut rows = Vec::new();
        loop {
            self.skip_newlines();
            match self.peek_raw() {
                Some(t) if t.kind == TokenKind::End => break,
                None => return Err(self.unexpected(vec![TokenKind::End.describe()])),
                _ => {}
            }
            rows.push(self.data_row()?);
            self.line_end()?;
        }
        let end = self.advance().span;
        Ok(TableLit {
            header,
            rows,
            span: start.to(end),
        })
    }

    fn line_end(&mut self) -> PResult<()> {
        match self.peek_raw() {
            Some(t) if t.kind == TokenKind::Newline => Ok(()),
            Some(t) if t.kind == TokenKind::End => Ok(()),
            _ => Err(self.unexpected(vec![
                TokenKind::Pipe.describe(),
                "end of line".into(),
            ])),
        }
    }

    fn header_row(&mut self) -> PResult<Vec<HeaderCell>> {
        let mut cells = vec![self.header_cell()?];
        while self.peek_raw().map(|t| &t.kind) == Some(&TokenKind::Pipe) {
            self.advance();
            cells.push(self.header_cell()?);
        }
        Ok(cells)
    }

    fn header_cell(&mut self) -> PResult<HeaderCell> {
        let (name, span) = match self.peek_raw() {
            Some(Token {
                kind: TokenKind::Ident(n) | TokenKind::Str(n),
                span,
            }) => (n.clone(), *span),
            _ => return Err(self.unexpected(vec!["column name".into()])),
        };
        self.advance();
        let mut cell = HeaderCell {
            name,
            sort: None,
            optional: false,
            span,
        };
        if self.peek_raw().map(|t| &t.kind) == Some(&TokenKind::Colon) {
            self.advance();
            cell.sort = Some(self.sort_annotation()?);
            if self.peek_raw().map(|t| &t.kind) == Some(&TokenKind::Question) {
                self.advance();
                cell.optional = true;
            }
            cell.span = span.to(self.last_span());
        }
        Ok(cell)
    }

    fn sort_annotation(&mut self) -> PResult<Sort> {
        let expected = || {
            vec![
                "`Number`".into(),
                "`Boolean`".into(),
                "`String`".into(),
                "`ColName`".into(),
                "`Seq<...>`".into(),
                "`Table<...>`".into(),
            ]
        };
        let name = match self.peek_raw() {
            Some(Token {
                kind: TokenKind::Ident(n),
                ..
            }) => n.clone(),
            _ => return Err(self.unexpected(expected())),
        };
        let sort = match name.as_str() {
            "Number" => Sort::Number,
            "Boolean" => Sort::Boolean,
            "String" => Sort::String,
            "ColName" => Sort::ColName,
            "Seq" => {
                self.advance();
                self.expect(TokenKind::Lt)?;
                let elem = self.sort_annotation()?;
                if self.peek_raw().map(|t| &t.kind) != Some(&TokenKind::Gt) {
                    return Err(self.unexpected(vec![TokenKind::Gt.describe()]));
                }
                self.advance();
                return Ok(Sort::seq(elem));
            }
            "Table" => {
                self.advance();
                self.expect(TokenKind::Lt)?;
                let mut columns = Vec::new();
                if self.peek_raw().map(|t| &t.kind) != Some(&TokenKind::Gt) {
                    loop {
                        let cell = self.header_cell()?;
                        let Some(sort) = cell.sort else {
                            return Err(self.unexpected(vec![TokenKind::Colon.describe()]));
                        };
                        let name = ColName::new(&cell.name).map_err(|_| SyntaxError::Parse {
                            span: cell.span,
                            expected: vec!["column name".into()],
                            found: "an empty name".into(),
                        })?;
                        columns.push(Column {
                            name,
                            sort,
                            optional: cell.optional,
                        });
                        if self.peek_raw().map(|t| &t.kind) == Some(&TokenKind::Comma) {
                            self.advance();
                            continue;
                        }
                        break;
                    }
                }
                if self.peek_raw().map(|t| &t.kind) != Some(&TokenKind::Gt) {
                    return Err(self.unexpected(vec![TokenKind::Comma.describe(), TokenKind::Gt.describe()]));
                }
                let gt = self.advance().span;
                let schema = Schema::new(columns).map_err(|e| SyntaxError::Parse {
                    span: gt,
                    expected: vec!["distinct column names".into()],
                    found: e.kind.to_string(),
                })?;
                return Ok(Sort::SubTable(schema));
            }
            _ => return Err(self.unexpected(expected())),
        };
        self.advance();
        Ok(sort)
    }

    fn data_row(&mut self) -> PResult<LitRow> {
        let mut cells = vec![self.data_cell()?];
        while self.peek_raw().map(|t| &t.kind) == Some(&TokenKind::Pipe) {
            self.advance();
            cells.push(self.data_cell()?);
        }
        let span = cells[0].span.to(cells.last().expect("non-empty").span);
        Ok(LitRow { cells, span })
    }

    fn data_cell(&mut self) -> PResult<LitCell> {
        if let Some(t) = self.peek_raw() {
            if t.kind == TokenKind::Blank {
                self.advance();
                return Ok(LitCell {
                    value: None,
                    span: t.span,
                });
            }
        }
        let e = self.expr()?;
        Ok(LitCell {
            span: e.span,
            value: Some(e),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::tokenize;

    fn parse(src: &str) -> PResult<Program> {
        parse_program(&tokenize(src).unwrap())
    }

    fn table_lit(src: &str) -> TableLit {
        let p = parse(src).unwrap();
        match &p.stmts[0].kind {
            StmtKind::Bind { value, .. } => match &value.kind {
                ExprKind::Table(t) => t.clone(),
                other => panic!("not a table: {other:?}"),
            },
            other => panic!("not a binding: {other:?}"),
        }
    }

    #[test]
    fn missing_end_is_reported() {
        match parse("function(x):").unwrap_err() {
            SyntaxError::Parse {
                expected, found, ..
            } => {
                assert_eq!(expected, vec!["`end`"]);
                assert_eq!(found, "end of input");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn students_literal_has_nine_cells() {
        let lit = table_lit(
            "students = table:\n  name: String | age: Number | \"favorite color\": String\n  \"Bob\" | 12 | \"blue\"\n  \"Alice\" | 17 | \"green\"\n  \"Eve\" | 13 | \"red\"\nend\n",
        );
        assert_eq!(lit.header.len(), 3);
        assert_eq!(lit.header[2].name, "favorite color");
        let cells: usize = lit.rows.iter().map(|r| r.cells.len()).sum();
        assert_eq!(cells, 9);
        assert_eq!(lit.rows[0].cells[1].span.start, Pos::new(3, 11));
    }

    #[test]
    fn blank_marker_in_literal() {
        let lit = table_lit("t = table:\n  a | b\n  1 | _\nend");
        assert!(lit.rows[0].cells[1].value.is_none());
        assert_eq!(lit.rows[0].cells[1].span.start, Pos::new(3, 7));
    }

    #[test]
    fn ragged_rows_are_representable() {
        let lit = table_lit("t = table:\n  a | b | c\n  1 | 2\nend");
        assert_eq!(lit.rows[0].cells.len(), 2);
    }

    #[test]
    fn blank_outside_literal_is_an_error() {
        assert!(parse("x = _").is_err());
    }

    #[test]
    fn optional_and_seq_annotations() {
        let lit = table_lit("t = table:\n  a: Number? | b: Seq<Seq<String>>\nend");
        assert!(lit.header[0].optional);
        assert_eq!(lit.header[1].sort, Some(Sort::seq(Sort::seq(Sort::String))));
        assert!(lit.rows.is_empty());
    }

    #[test]
    fn sub_table_annotation() {
        let lit = table_lit("t = table:\n  g: Table<a: Number, \"b c\": Seq<String>?>\nend");
        let Some(Sort::SubTable(s)) = &lit.header[0].sort else {
            panic!()
        };
        assert_eq!(s.len(), 2);
        assert!(s.columns()[1].optional);
        assert_eq!(lit.header[0].sort.as_ref().unwrap().to_string(), "Table<a: Number, \"b c\": Seq<String>?>");
    }

    #[test]
    fn precedence() {
        let p = parse("x = not a == b and c or d").unwrap();
        let StmtKind::Bind { value, .. } = &p.stmts[0].kind else {
            panic!()
        };
        let ExprKind::Binary { op: BinOp::Or, lhs, .. } = &value.kind else {
            panic!("{value:?}")
        };
        let ExprKind::Binary { op: BinOp::And, lhs, .. } = &lhs.kind else {
            panic!()
        };
        assert!(matches!(lhs.kind, ExprKind::Not(_)));
    }

    #[test]
    fn comparisons_do_not_chain() {
        assert!(parse("x = a < b < c").is_err());
    }

    #[test]
    fn order_by_special_form() {
        let p = parse(
            "orderBy(students, [(function(r): r[\"age\"] end, function(a, b): a < b end)])",
        )
        .unwrap();
        let StmtKind::Expr(e) = &p.stmts[0].kind else {
            panic!()
        };
        let ExprKind::OrderBy { pairs, .. } = &e.kind else {
            panic!("{e:?}")
        };
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn multiline_call_arguments() {
        let p = parse("x = f(1,\n  2,\n  function(r):\n    r\n  end)\ny = 2").unwrap();
        assert_eq!(p.stmts.len(), 2);
    }

    #[test]
    fn if_else_and_for() {
        let p = parse("for c in cs:\n  if c == 1:\n    println(c)\n  else:\n    x = 2\n  end\nend").unwrap();
        assert_eq!(p.stmts.len(), 1);
    }

    #[test]
    fn statements_need_separators() {
        assert!(parse("x = 1 y = 2").is_err());
    }
}
