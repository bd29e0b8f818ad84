//! Text formats: host graphs and programs.

mod host;
mod lexer;
mod program;
mod print;

pub use host::{parse_host_graph, parse_host_graph_into, print_host_graph};
pub use print::print_program;
pub use program::parse_program;

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Diagnostic categories. Every static check has its own kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Syntax,
    UnknownMark,
    IllegalMark,
    DuplicateId,
    DanglingEndpoint,
    BadLiteral,
    UnknownVariable,
    DuplicateVariable,
    UnknownNode,
    NotSimple,
    TypeError,
    RhsVariable,
    ConditionVariable,
    AnyWithoutLhs,
    PreservedEdge,
    BidirectionalCreated,
    DuplicateDeclaration,
    UnknownName,
    RecursiveProcedure,
    BreakOutsideLoop,
    MissingMain,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ErrorKind,
    pub msg: String,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, kind: ErrorKind, msg: impl Into<String>) -> Self {
        ParseError { pos, kind, msg: msg.into() }
    }
}
