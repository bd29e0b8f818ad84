//! Host graph text format.
//!
//! ```text
//! graph := "[" node* "|" edge* "]"
//! node  := "(" ident ["(R)"] "," list ["#" mark] ")"
//! edge  := "(" ident "," ident "," ident "," list ["#" mark] ")"
//! list  := "empty" | atom (":" atom)*
//! atom  := ["-"] digits | '"' chars '"'
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use super::lexer::{Tok, Tokens};
use super::{ErrorKind, ParseError, Pos};
use crate::labels::{Atom, HostValue};
use crate::mark::{ItemKind, Mark};
use crate::store::HostGraph;

pub fn parse_host_graph(text: &str) -> Result<HostGraph, ParseError> {
    parse_host_graph_into(text, HostGraph::new())
}

/// Parse into a caller-supplied empty graph (for example a legacy-mode one).
pub fn parse_host_graph_into(text: &str, mut g: HostGraph) -> Result<HostGraph, ParseError> {
    assert!(g.is_empty(), "target graph must be empty");
    let mut t = Tokens::new(text)?;
    t.expect(&Tok::LBrack)?;
    let mut ids = HashMap::new();
    while t.peek() == &Tok::LParen {
        t.bump();
        let pos = t.pos();
        let name = t.word("a node identifier")?;
        let rooted = if t.eat(&Tok::LParen) {
            t.expect_word("R")?;
            t.expect(&Tok::RParen)?;
            true
        } else {
            false
        };
        t.expect(&Tok::Comma)?;
        let label = parse_host_list(&mut t)?;
        let mark = parse_mark(&mut t, ItemKind::Node)?;
        t.expect(&Tok::RParen)?;
        if ids.contains_key(&name) {
            return Err(ParseError::new(pos, ErrorKind::DuplicateId, format!("duplicate node id `{name}`")));
        }
        let id = g.add_node(label, mark, rooted).expect("mark checked by parser");
        ids.insert(name, id);
    }
    t.expect(&Tok::Bar)?;
    let mut edge_ids = HashMap::new();
    while t.peek() == &Tok::LParen {
        t.bump();
        let pos = t.pos();
        let name = t.word("an edge identifier")?;
        t.expect(&Tok::Comma)?;
        let mut ends = [None; 2];
        for (k, end) in ends.iter_mut().enumerate() {
            let p = t.pos();
            let n = t.word("a node identifier")?;
            *end = Some(*ids.get(&n).ok_or_else(|| {
                ParseError::new(p, ErrorKind::DanglingEndpoint, format!("edge `{name}` refers to unknown node `{n}`"))
            })?);
            if k == 0 {
                t.expect(&Tok::Comma)?;
            }
        }
        t.expect(&Tok::Comma)?;
        let label = parse_host_list(&mut t)?;
        let mark = parse_mark(&mut t, ItemKind::Edge)?;
        t.expect(&Tok::RParen)?;
        if edge_ids.insert(name.clone(), ()).is_some() {
            return Err(ParseError::new(pos, ErrorKind::DuplicateId, format!("duplicate edge id `{name}`")));
        }
        g.add_edge(ends[0].unwrap(), ends[1].unwrap(), label, mark).expect("checked by parser");
    }
    t.expect(&Tok::RBrack)?;
    t.expect(&Tok::Eof)?;
    Ok(g)
}

pub(crate) fn parse_int(word: &str, neg: bool, pos: Pos) -> Result<i64, ParseError> {
    if !word.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::new(pos, ErrorKind::BadLiteral, format!("`{word}` is not an integer")));
    }
    let text = if neg { format!("-{word}") } else { word.to_string() };
    text.parse::<i64>()
        .map_err(|_| ParseError::new(pos, ErrorKind::BadLiteral, format!("integer `{text}` out of range")))
}

fn parse_host_list(t: &mut Tokens) -> Result<HostValue, ParseError> {
    if t.eat_word("empty") {
        return Ok(HostValue::empty());
    }
    let mut v = HostValue::empty();
    loop {
        let pos = t.pos();
        let atom = match t.bump() {
            Tok::Minus => {
                let p = t.pos();
                let w = t.word("digits")?;
                Atom::Int(parse_int(&w, true, p)?)
            }
            Tok::Word(w) => Atom::Int(parse_int(&w, false, pos)?),
            Tok::Str(s) => Atom::str(&s),
            other => {
                return Err(ParseError::new(pos, ErrorKind::Syntax, format!("expected a label, found {other}")))
            }
        };
        v.push(atom);
        if !t.eat(&Tok::Colon) {
            return Ok(v);
        }
    }
}

fn parse_mark(t: &mut Tokens, kind: ItemKind) -> Result<Mark, ParseError> {
    if !t.eat(&Tok::Hash) {
        return Ok(Mark::None);
    }
    let pos = t.pos();
    let w = t.word("a mark")?;
    let mark = match w.as_str() {
        "red" => Mark::Red,
        "green" => Mark::Green,
        "blue" => Mark::Blue,
        "grey" => Mark::Grey,
        "dashed" => Mark::Dashed,
        _ => return Err(ParseError::new(pos, ErrorKind::UnknownMark, format!("unknown mark `{w}`"))),
    };
    if !mark.is_legal_host(kind) {
        return Err(ParseError::new(
            pos,
            ErrorKind::IllegalMark,
            format!("mark `{mark}` is not allowed on a host {}", if kind == ItemKind::Node { "node" } else { "edge" }),
        ));
    }
    Ok(mark)
}

/// Canonical single-line form. Nodes print as their slot index plus one and
/// edges as `e` followed by their slot index plus one, both in slot order.
pub fn print_host_graph(g: &HostGraph) -> String {
    let mut s = String::with_capacity(16 + 24 * (g.node_count() + g.edge_count()));
    s.push('[');
    for n in g.nodes() {
        let v = g.inspect_node(n).unwrap();
        write!(s, " ({}{}, {}", n.index() + 1, if v.rooted { "(R)" } else { "" }, v.label).unwrap();
        if v.mark != Mark::None {
            write!(s, " # {}", v.mark).unwrap();
        }
        s.push(')');
    }
    s.push_str(" |");
    for e in g.edges() {
        let v = g.inspect_edge(e).unwrap();
        write!(s, " (e{}, {}, {}, {}", e.index() + 1, v.source.index() + 1, v.target.index() + 1, v.label).unwrap();
        if v.mark != Mark::None {
            write!(s, " # {}", v.mark).unwrap();
        }
        s.push(')');
    }
    s.push_str(" ]");
    s
}
