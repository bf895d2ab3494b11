//! S-expression tree language.
//!
//! ```text
//! program   := node
//! node      := "(" keyword arg* node* ")"
//! arg       := integer | "forever" | "@" ident | ident | predicate
//! predicate := "(and" atom+ ")" | atom
//! atom      := "(is" category ")" | "(found" category ")"
//!            | "(left-of robot)" | "(right-of robot)" | "(gripper-holding)"
//! ```
//!
//! `;` starts a comment that runs to the end of the line. Symbol references
//! (`@name`) stay unresolved until the tree runs.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

mod lexer;
mod parser;
mod printer;

pub use parser::{parse, parse_predicate};
pub use printer::{serialize, serialize_predicate};

use crate::bt::{structural_violations, TreeNode, Violation};
use crate::profiles::{profile_violations, CapabilityProfile};

/// 1-based position of a token in the source.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Lex,
    Syntax,
    UnknownOp,
    Arity,
    BadSymbolRef,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub kind: ErrorKind,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, kind: ErrorKind, message: impl ToString) -> Self {
        ParseError { span, kind, message: message.to_string() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Lex => "lex",
            ErrorKind::Syntax => "syntax",
            ErrorKind::UnknownOp => "unknown op",
            ErrorKind::Arity => "arity",
            ErrorKind::BadSymbolRef => "bad symbol",
        };
        write!(f, "{}: {kind} error: {}", self.span, self.message)
    }
}

/// Structural violations plus one violation per leaf the profile does not
/// permit. Empty means the tree is runnable under `profile`.
pub fn validate_tree(tree: &TreeNode, profile: &CapabilityProfile) -> Vec<Violation> {
    let mut v = structural_violations(tree);
    v.extend(profile_violations(tree, profile));
    v
}

/// Renders diagnostics one per line.
pub fn format_errors(errors: &[ParseError]) -> String {
    errors.iter().map(|e| format!("{e}\n")).collect()
}
