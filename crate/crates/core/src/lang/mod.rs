//! Lexer, parser and pretty-printer for `.tbl` sources.

pub mod ast;
mod lexer;
mod parser;
mod pretty;
mod span;

use std::fmt;

pub use ast::*;
pub use lexer::{detokenize, tokenize, tokenize_file, Token, TokenKind};
pub use parser::{parse_expr, parse_header_line, parse_program};
pub use pretty::{pretty_expr, pretty_program};
pub use span::{Pos, Span};

/// A lexical or grammatical error.
#[derive(Debug, Clone, PartialEq)]
pub enum SyntaxError {
    Lex {
        span: Span,
        message: String,
    },
    Parse {
        span: Span,
        expected: Vec<String>,
        found: String,
    },
}

impl SyntaxError {
    pub fn span(&self) -> Span {
        match self {
            SyntaxError::Lex { span, .. } | SyntaxError::Parse { span, .. } => *span,
        }
    }

    pub fn is_lex(&self) -> bool {
        matches!(self, SyntaxError::Lex { .. })
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxError::Lex { message, .. } => f.write_str(message),
            SyntaxError::Parse {
                expected, found, ..
            } => {
                write!(f, "expected ")?;
                match expected.as_slice() {
                    [] => write!(f, "something else")?,
                    [one] => write!(f, "{one}")?,
                    [init @ .., last] => write!(f, "{} or {last}", init.join(", "))?,
                }
                write!(f, ", found {found}")
            }
        }
    }
}

impl std::error::Error for SyntaxError {}

/// Tokenizes and parses a whole source file.
pub fn parse(source: &str) -> Result<Program, SyntaxError> {
    parse_program(&tokenize(source)?)
}
