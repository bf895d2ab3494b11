use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{ErrorKind, ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Open,
    Close,
    /// `@name`
    Symbol(String),
    Int(u64),
    Ident(String),
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.')
}

pub(crate) fn lex(src: &str, errors: &mut Vec<ParseError>) -> Vec<Token> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let start = SourceSpan { line, column: col, length: 1 };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ';' => {
                while chars.peek().is_some_and(|c| *c != '\n') {
                    chars.next();
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '(' | ')' => {
                chars.next();
                col += 1;
                out.push(Token { tok: if c == '(' { Tok::Open } else { Tok::Close }, span: start });
            }
            _ => {
                let mut word = String::new();
                let at = c == '@';
                if at {
                    chars.next();
                    col += 1;
                }
                while let Some(&c) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    col += 1;
                }
                let span = SourceSpan { length: word.chars().count() + at as usize, ..start };
                if at {
                    if word.is_empty() {
                        errors.push(ParseError::new(
                            span,
                            ErrorKind::BadSymbolRef,
                            "`@` must be followed by a symbol name",
                        ));
                    } else {
                        out.push(Token { tok: Tok::Symbol(word), span });
                    }
                } else if word.is_empty() {
                    chars.next();
                    col += 1;
                    errors.push(ParseError::new(start, ErrorKind::Lex, format!("unexpected character `{c}`")));
                } else if word.chars().all(|c| c.is_ascii_digit()) {
                    match word.parse() {
                        Ok(n) => out.push(Token { tok: Tok::Int(n), span }),
                        Err(_) => errors.push(ParseError::new(span, ErrorKind::Lex, "integer out of range")),
                    }
                } else {
                    out.push(Token { tok: Tok::Ident(word), span });
                }
            }
        }
    }
    out
}
