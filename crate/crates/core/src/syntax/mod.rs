//! Concrete syntax: tokenizer, term and type parser with inference, the
//! pretty-printer and the theory-file grammar.

use std::fmt;

use thiserror::Error;

mod infer;
pub mod lexer;
mod parser;
mod printer;
mod table;
pub mod theory_file;

pub use infer::{parse_term, parse_term_at, parse_term_with, parse_type, resolve_type};
pub use parser::{PreTerm, PreType};
pub use printer::{print_plain, print_term, print_term_with, print_type, variant};
pub use table::{Assoc, Infix, NotationError, SyntaxTable};
pub use theory_file::{parse_tactic_expr, parse_theory, Decl, DeclKind, TacticExpr, TheoryFile};

/// A 1-based line/column position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub const START: Pos = Pos { line: 1, col: 1 };
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Ambiguity,
    Type,
}

#[derive(Error, Clone, Debug, PartialEq, Eq)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> ParseError {
        ParseError { pos, kind: ParseErrorKind::Syntax, msg: msg.into() }
    }

    pub(crate) fn with_kind(pos: Pos, kind: ParseErrorKind, msg: impl Into<String>) -> ParseError {
        ParseError { pos, kind, msg: msg.into() }
    }
}

/// Output alphabet for the printer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Unicode,
    Ascii,
}
