use std::fmt;

use super::span::{Pos, Span};
use super::SyntaxError;
use crate::model::{format_number, quote};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Num(f64),
    Str(String),
    Function,
    End,
    For,
    In,
    If,
    Else,
    And,
    Or,
    Not,
    True,
    False,
    Table,
    Println,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    PlusPlus,
    Minus,
    Star,
    Slash,
    Pipe,
    Question,
    /// `_`, the blank-cell marker.
    Blank,
    Newline,
}

impl TokenKind {
    fn keyword(word: &str) -> Option<TokenKind> {
        Some(match word {
            "function" => TokenKind::Function,
            "end" => TokenKind::End,
            "for" => TokenKind::For,
            "in" => TokenKind::In,
            "if" => TokenKind::If,
            "else" => TokenKind::Else,
            "and" => TokenKind::And,
            "or" => TokenKind::Or,
            "not" => TokenKind::Not,
            "true" => TokenKind::True,
            "false" => TokenKind::False,
            "table" => TokenKind::Table,
            "println" => TokenKind::Println,
            "_" => TokenKind::Blank,
            _ => return None,
        })
    }

    /// Source text that lexes back to this token.
    pub fn text(&self) -> String {
        match self {
            TokenKind::Ident(s) => s.clone(),
            TokenKind::Num(n) => format_number(*n),
            TokenKind::Str(s) => quote(s),
            other => other.describe().trim_matches('`').to_string(),
        }
    }

    /// How the token is named in "expected ..." messages.
    pub fn describe(&self) -> String {
        let s = match self {
            TokenKind::Ident(_) => return "identifier".into(),
            TokenKind::Num(_) => return "number".into(),
            TokenKind::Str(_) => return "string".into(),
            TokenKind::Newline => return "end of line".into(),
            TokenKind::Function => "function",
            TokenKind::End => "end",
            TokenKind::For => "for",
            TokenKind::In => "in",
            TokenKind::If => "if",
            TokenKind::Else => "else",
            TokenKind::And => "and",
            TokenKind::Or => "or",
            TokenKind::Not => "not",
            TokenKind::True => "true",
            TokenKind::False => "false",
            TokenKind::Table => "table",
            TokenKind::Println => "println",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::Comma => ",",
            TokenKind::Colon => ":",
            TokenKind::Assign => "=",
            TokenKind::EqEq => "==",
            TokenKind::NotEq => "!=",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::Gt => ">",
            TokenKind::Ge => ">=",
            TokenKind::Plus => "+",
            TokenKind::PlusPlus => "++",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Pipe => "|",
            TokenKind::Question => "?",
            TokenKind::Blank => "_",
        };
        format!("`{s}`")
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Num(n) => write!(f, "number {}", format_number(*n)),
            TokenKind::Str(s) => write!(f, "string {}", quote(s)),
            other => f.write_str(&other.describe()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    file: u32,
    line: u32,
    col: u32,
    /// True until the first token of the current line has been produced.
    line_start: bool,
}

impl Lexer<'_> {
    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: Pos) -> Span {
        Span::new(self.file, start, self.pos())
    }
}

/// Splits source text into tokens.
///
/// `#` starts a comment that runs to the end of the line. A `>` that is
/// the first token on a line is a REPL prompt marker and is skipped, so
/// transcripts can be run as scripts.
pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    tokenize_file(source, 0)
}

pub fn tokenize_file(source: &str, file: u32) -> Result<Vec<Token>, SyntaxError> {
    let mut lx = Lexer {
        chars: source.chars().peekable(),
        file,
        line: 1,
        col: 1,
        line_start: true,
    };
    let mut out = Vec::new();
    while let Some(&c) = lx.chars.peek() {
        let start = lx.pos();
        if c == '\n' {
            lx.bump();
            lx.line_start = true;
            if !matches!(out.last(), None | Some(Token { kind: TokenKind::Newline, .. })) {
                out.push(Token {
                    kind: TokenKind::Newline,
                    span: Span::new(file, start, start),
                });
            }
            continue;
        }
        if c.is_whitespace() {
            lx.bump();
            continue;
        }
        if c == '#' {
            while let Some(&c) = lx.chars.peek() {
                if c == '\n' {
                    break;
                }
                lx.bump();
            }
            continue;
        }
        let first_on_line = std::mem::replace(&mut lx.line_start, false);
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = lx.chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    lx.bump();
                } else {
                    break;
                }
            }
            TokenKind::keyword(&word).unwrap_or(TokenKind::Ident(word))
        } else if c.is_ascii_digit() {
            let mut text = String::new();
            while let Some(&c) = lx.chars.peek() {
                if c.is_ascii_digit() {
                    text.push(c);
                    lx.bump();
                } else {
                    break;
                }
            }
            if lx.chars.peek() == Some(&'.') {
                let mut ahead = lx.chars.clone();
                ahead.next();
                if ahead.peek().is_some_and(|c| c.is_ascii_digit()) {
                    text.push('.');
                    lx.bump();
                    while let Some(&c) = lx.chars.peek() {
                        if c.is_ascii_digit() {
                            text.push(c);
                            lx.bump();
                        } else {
                            break;
                        }
                    }
                }
            }
            TokenKind::Num(text.parse().expect("digits parse as a number"))
        } else if c == '"' {
            lx.bump();
            let mut s = String::new();
            loop {
                match lx.bump() {
                    None | Some('\n') => {
                        return Err(SyntaxError::Lex {
                            span: lx.span_from(start),
                            message: "unterminated string literal".into(),
                        })
                    }
                    Some('"') => break,
                    Some('\\') => match lx.bump() {
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('r') => s.push('\r'),
                        other => {
                            return Err(SyntaxError::Lex {
                                span: lx.span_from(start),
                                message: format!(
                                    "unsupported escape `\\{}`",
                                    other.map(String::from).unwrap_or_default()
                                ),
                            })
                        }
                    },
                    Some(c) => s.push(c),
                }
            }
            TokenKind::Str(s)
        } else {
            lx.bump();
            let next = lx.chars.peek().copied();
            let two = |kind: TokenKind, lx: &mut Lexer| {
                lx.bump();
                kind
            };
            match (c, next) {
                ('+', Some('+')) => two(TokenKind::PlusPlus, &mut lx),
                ('=', Some('=')) => two(TokenKind::EqEq, &mut lx),
                ('!', Some('=')) => two(TokenKind::NotEq, &mut lx),
                ('<', Some('=')) => two(TokenKind::Le, &mut lx),
                ('>', Some('=')) => two(TokenKind::Ge, &mut lx),
                ('>', _) if first_on_line => {
                    lx.line_start = true;
                    continue;
                }
                ('+', _) => TokenKind::Plus,
                ('-', _) => TokenKind::Minus,
                ('*', _) => TokenKind::Star,
                ('/', _) => TokenKind::Slash,
                ('=', _) => TokenKind::Assign,
                ('<', _) => TokenKind::Lt,
                ('>', _) => TokenKind::Gt,
                ('(', _) => TokenKind::LParen,
                (')', _) => TokenKind::RParen,
                ('[', _) => TokenKind::LBracket,
                (']', _) => TokenKind::RBracket,
                (',', _) => TokenKind::Comma,
                (':', _) => TokenKind::Colon,
                ('|', _) => TokenKind::Pipe,
                ('?', _) => TokenKind::Question,
                (other, _) => {
                    return Err(SyntaxError::Lex {
                        span: lx.span_from(start),
                        message: format!("unexpected character {other:?}"),
                    })
                }
            }
        };
        out.push(Token {
            kind,
            span: lx.span_from(start),
        });
    }
    if matches!(out.last(), Some(Token { kind: TokenKind::Newline, .. })) {
        out.pop();
    }
    Ok(out)
}

/// Renders tokens back to source text, one space between tokens.
pub fn detokenize(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        if t.kind == TokenKind::Newline {
            out.push('\n');
            continue;
        }
        if !out.is_empty() && !out.ends_with('\n') {
            out.push(' ');
        }
        out.push_str(&t.kind.text());
    }
    out
}
