//! Program parser and static checks.
//!
//! ```text
//! program  := decl*
//! decl     := "Main" "=" comseq
//!           | ident "=" ["[" decl* "]"] comseq
//!           | ident "(" vars ")" graph "=>" graph ["where" cond]
//! vars     := [ident ("," ident)* ":" type (";" ident ("," ident)* ":" type)*]
//! graph    := "[" rnode* "|" redge* "]"
//! rnode    := "(" ident ["(R)"] "," label ["#" mark] ")"
//! redge    := "(" ident ["(B)"] "," ident "," ident "," label ["#" mark] ")"
//! comseq   := command (";" command)*
//! command  := block ("or" block)*
//! block    := simple ["!"]
//! simple   := "(" comseq ")" | "if" block "then" block ["else" block]
//!           | "try" block ["then" block] ["else" block]
//!           | "{" [ident ("," ident)*] "}" | ident | "skip" | "fail" | "break"
//! ```

use std::collections::HashMap;

use super::host::parse_int;
use super::lexer::{Tok, Tokens};
use super::{ErrorKind, ParseError, Pos};
use crate::interp::{Command, Procedure, Program};
use crate::labels::{ArithOp, CmpOp, Condition, Expr, LabelExpr, VarDecl, VarRef, VarType};
use crate::mark::Mark;
use crate::rules::{Rule, RuleEdge, RuleError, RuleGraph, RuleNode};

const KEYWORDS: &[&str] = &[
    "Main", "if", "then", "else", "try", "or", "skip", "fail", "break", "where", "and", "not", "empty", "indeg",
    "outdeg", "length", "edge",
];

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut t = Tokens::new(text)?;
    let decls = parse_decls(&mut t, true)?;
    t.expect(&Tok::Eof)?;
    Builder::default().build(decls)
}

// ---- raw syntax ----

#[derive(Clone, Debug)]
enum RawCmd {
    Name(String, Pos),
    RuleSet(Vec<(String, Pos)>),
    Seq(Vec<RawCmd>),
    If(Box<RawCmd>, Box<RawCmd>, Option<Box<RawCmd>>),
    Try(Box<RawCmd>, Option<Box<RawCmd>>, Option<Box<RawCmd>>),
    Loop(Box<RawCmd>),
    Or(Box<RawCmd>, Box<RawCmd>),
    Break(Pos),
    Skip,
    Fail,
}

struct RawProc {
    name: String,
    pos: Pos,
    locals: Vec<RawDecl>,
    body: RawCmd,
}

enum RawDecl {
    Rule(Box<Rule>, Pos),
    Proc(RawProc),
    Main(RawCmd, Pos),
}

fn parse_decls(t: &mut Tokens, top: bool) -> Result<Vec<RawDecl>, ParseError> {
    let mut out = Vec::new();
    loop {
        match t.peek() {
            Tok::Eof if top => return Ok(out),
            Tok::RBrack if !top => return Ok(out),
            Tok::Word(_) => {}
            _ => return Err(t.unexpected("a declaration")),
        }
        let pos = t.pos();
        let name = t.word("a declaration")?;
        if name == "Main" {
            if !top {
                return Err(ParseError::new(pos, ErrorKind::Syntax, "`Main` must be declared at the top level"));
            }
            t.expect(&Tok::Eq)?;
            out.push(RawDecl::Main(parse_comseq(t)?, pos));
            continue;
        }
        if KEYWORDS.contains(&name.as_str()) {
            return Err(ParseError::new(pos, ErrorKind::Syntax, format!("`{name}` is a keyword")));
        }
        match t.peek() {
            Tok::LParen => {
                let rule = parse_rule(t, name, pos)?;
                out.push(RawDecl::Rule(Box::new(rule), pos));
            }
            Tok::Eq => {
                t.bump();
                let locals = if t.eat(&Tok::LBrack) {
                    let d = parse_decls(t, false)?;
                    t.expect(&Tok::RBrack)?;
                    d
                } else {
                    Vec::new()
                };
                let body = parse_comseq(t)?;
                out.push(RawDecl::Proc(RawProc { name, pos, locals, body }));
            }
            _ => return Err(t.unexpected("`(` or `=` after a declaration name")),
        }
    }
}

fn parse_comseq(t: &mut Tokens) -> Result<RawCmd, ParseError> {
    let mut cmds = vec![parse_command(t)?];
    while t.eat(&Tok::Semi) {
        cmds.push(parse_command(t)?);
    }
    Ok(if cmds.len() == 1 { cmds.pop().unwrap() } else { RawCmd::Seq(cmds) })
}

fn parse_command(t: &mut Tokens) -> Result<RawCmd, ParseError> {
    let mut c = parse_block(t)?;
    while t.eat_word("or") {
        let r = parse_block(t)?;
        c = RawCmd::Or(Box::new(c), Box::new(r));
    }
    Ok(c)
}

fn parse_block(t: &mut Tokens) -> Result<RawCmd, ParseError> {
    let c = parse_simple(t)?;
    Ok(if t.eat(&Tok::Bang) { RawCmd::Loop(Box::new(c)) } else { c })
}

fn parse_simple(t: &mut Tokens) -> Result<RawCmd, ParseError> {
    let pos = t.pos();
    match t.peek().clone() {
        Tok::LParen => {
            t.bump();
            let c = parse_comseq(t)?;
            t.expect(&Tok::RParen)?;
            Ok(c)
        }
        Tok::LBrace => {
            t.bump();
            let mut names = Vec::new();
            if !t.eat(&Tok::RBrace) {
                loop {
                    let p = t.pos();
                    names.push((t.word("a rule name")?, p));
                    if t.eat(&Tok::RBrace) {
                        break;
                    }
                    t.expect(&Tok::Comma)?;
                }
            }
            Ok(RawCmd::RuleSet(names))
        }
        Tok::Word(w) => {
            t.bump();
            match w.as_str() {
                "if" => {
                    let c = parse_block(t)?;
                    t.expect_word("then")?;
                    let p = parse_block(t)?;
                    let q = if t.eat_word("else") { Some(Box::new(parse_block(t)?)) } else { None };
                    Ok(RawCmd::If(Box::new(c), Box::new(p), q))
                }
                "try" => {
                    let c = parse_block(t)?;
                    let p = if t.eat_word("then") { Some(Box::new(parse_block(t)?)) } else { None };
                    let q = if t.eat_word("else") { Some(Box::new(parse_block(t)?)) } else { None };
                    Ok(RawCmd::Try(Box::new(c), p, q))
                }
                "skip" => Ok(RawCmd::Skip),
                "fail" => Ok(RawCmd::Fail),
                "break" => Ok(RawCmd::Break(pos)),
                kw if KEYWORDS.contains(&kw) => {
                    Err(ParseError::new(pos, ErrorKind::Syntax, format!("unexpected keyword `{kw}`")))
                }
                _ => Ok(RawCmd::Name(w, pos)),
            }
        }
        _ => Err(t.unexpected("a command")),
    }
}

// ---- rules ----

struct RuleCtx<'a> {
    rule: &'a str,
    var_ix: HashMap<String, usize>,
    /// Left-hand node names, available once the left graph is parsed.
    lnodes: Vec<String>,
}

impl RuleCtx<'_> {
    fn var(&self, name: &str, pos: Pos) -> Result<VarRef, ParseError> {
        self.var_ix.get(name).map(|&i| VarRef(i)).ok_or_else(|| {
            ParseError::new(
                pos,
                ErrorKind::UnknownVariable,
                format!("rule `{}`: undeclared variable `{name}`", self.rule),
            )
        })
    }

    fn lnode(&self, name: &str, pos: Pos) -> Result<usize, ParseError> {
        self.lnodes.iter().position(|n| n == name).ok_or_else(|| {
            ParseError::new(
                pos,
                ErrorKind::UnknownNode,
                format!("rule `{}`: `{name}` is not a left-hand node", self.rule),
            )
        })
    }
}

fn parse_rule(t: &mut Tokens, name: String, pos: Pos) -> Result<Rule, ParseError> {
    t.expect(&Tok::LParen)?;
    let mut vars: Vec<VarDecl> = Vec::new();
    let mut var_ix = HashMap::new();
    if !t.eat(&Tok::RParen) {
        loop {
            let mut group = Vec::new();
            loop {
                let p = t.pos();
                group.push((t.word("a variable name")?, p));
                if !t.eat(&Tok::Comma) {
                    break;
                }
            }
            t.expect(&Tok::Colon)?;
            let tp = t.pos();
            let ty: VarType = t
                .word("a type")?
                .parse()
                .map_err(|m: String| ParseError::new(tp, ErrorKind::Syntax, m))?;
            for (v, p) in group {
                if KEYWORDS.contains(&v.as_str()) {
                    return Err(ParseError::new(p, ErrorKind::Syntax, format!("`{v}` is a keyword")));
                }
                if var_ix.insert(v.clone(), vars.len()).is_some() {
                    return Err(ParseError::new(
                        p,
                        ErrorKind::DuplicateVariable,
                        format!("rule `{name}`: variable `{v}` declared twice"),
                    ));
                }
                vars.push(VarDecl { name: v, ty });
            }
            if t.eat(&Tok::RParen) {
                break;
            }
            t.expect(&Tok::Semi)?;
        }
    }
    let mut ctx = RuleCtx { rule: &name, var_ix, lnodes: Vec::new() };
    let lhs = parse_rule_graph(t, &ctx)?;
    ctx.lnodes = lhs.nodes.iter().map(|n| n.name.clone()).collect();
    t.expect(&Tok::Arrow)?;
    let rhs = parse_rule_graph(t, &ctx)?;
    let condition = if t.eat_word("where") { Some(parse_cond(t, &ctx)?) } else { None };
    Rule::new(name.clone(), vars.clone(), lhs, rhs, condition).map_err(|e| rule_error(e, pos))
}

fn rule_error(e: RuleError, pos: Pos) -> ParseError {
    let kind = match &e {
        RuleError::DuplicateNode { .. } | RuleError::DuplicateEdge { .. } => ErrorKind::DuplicateId,
        RuleError::IllegalMark { .. } => ErrorKind::IllegalMark,
        RuleError::NotSimple { .. } => ErrorKind::NotSimple,
        RuleError::Type { .. } => ErrorKind::TypeError,
        RuleError::RhsVariable { .. } => ErrorKind::RhsVariable,
        RuleError::ConditionVariable { .. } => ErrorKind::ConditionVariable,
        RuleError::AnyWithoutLhs { .. } => ErrorKind::AnyWithoutLhs,
        RuleError::PreservedEdgeEndpoints { .. } => ErrorKind::PreservedEdge,
        RuleError::BidirectionalCreated { .. } => ErrorKind::BidirectionalCreated,
        RuleError::DegreeNode { .. } => ErrorKind::UnknownNode,
    };
    ParseError::new(pos, kind, e.to_string())
}

fn parse_rule_graph(t: &mut Tokens, ctx: &RuleCtx) -> Result<RuleGraph, ParseError> {
    t.expect(&Tok::LBrack)?;
    let mut g = RuleGraph::default();
    let mut node_pos = Vec::new();
    while t.eat(&Tok::LParen) {
        let p = t.pos();
        let name = t.word("a node identifier")?;
        let rooted = parse_tag(t, "R")?;
        t.expect(&Tok::Comma)?;
        let label = parse_label(t, ctx)?;
        let mark = parse_rule_mark(t)?;
        t.expect(&Tok::RParen)?;
        node_pos.push(p);
        g.nodes.push(RuleNode { name, label, mark, rooted });
    }
    t.expect(&Tok::Bar)?;
    while t.eat(&Tok::LParen) {
        let name = t.word("an edge identifier")?;
        let bidirectional = parse_tag(t, "B")?;
        t.expect(&Tok::Comma)?;
        let mut ends = [0usize; 2];
        for (k, end) in ends.iter_mut().enumerate() {
            let p = t.pos();
            let n = t.word("a node identifier")?;
            *end = g.node_index(&n).ok_or_else(|| {
                ParseError::new(
                    p,
                    ErrorKind::DanglingEndpoint,
                    format!("rule `{}`: edge `{name}` refers to unknown node `{n}`", ctx.rule),
                )
            })?;
            if k == 0 {
                t.expect(&Tok::Comma)?;
            }
        }
        t.expect(&Tok::Comma)?;
        let label = parse_label(t, ctx)?;
        let mark = parse_rule_mark(t)?;
        t.expect(&Tok::RParen)?;
        g.edges.push(RuleEdge { name, src: ends[0], tgt: ends[1], label, mark, bidirectional });
    }
    t.expect(&Tok::RBrack)?;
    Ok(g)
}

/// Optional `(R)` / `(B)` suffix.
fn parse_tag(t: &mut Tokens, tag: &str) -> Result<bool, ParseError> {
    if t.peek() == &Tok::LParen {
        t.bump();
        t.expect_word(tag)?;
        t.expect(&Tok::RParen)?;
        Ok(true)
    } else {
        Ok(false)
    }
}

fn parse_rule_mark(t: &mut Tokens) -> Result<Mark, ParseError> {
    if !t.eat(&Tok::Hash) {
        return Ok(Mark::None);
    }
    let pos = t.pos();
    let w = t.word("a mark")?;
    match w.parse::<Mark>() {
        Ok(Mark::None) | Err(_) => Err(ParseError::new(pos, ErrorKind::UnknownMark, format!("unknown mark `{w}`"))),
        Ok(m) => Ok(m),
    }
}

fn parse_label(t: &mut Tokens, ctx: &RuleCtx) -> Result<LabelExpr, ParseError> {
    if t.eat_word("empty") {
        return Ok(LabelExpr::empty());
    }
    let mut items = vec![parse_concat(t, ctx)?];
    while t.eat(&Tok::Colon) {
        items.push(parse_concat(t, ctx)?);
    }
    Ok(LabelExpr::new(items))
}

fn parse_concat(t: &mut Tokens, ctx: &RuleCtx) -> Result<Expr, ParseError> {
    let first = parse_sum(t, ctx)?;
    if t.peek() != &Tok::Dot {
        return Ok(first);
    }
    let mut parts = vec![first];
    while t.eat(&Tok::Dot) {
        parts.push(parse_sum(t, ctx)?);
    }
    let flat = parts
        .into_iter()
        .flat_map(|p| match p {
            Expr::Concat(inner) => inner,
            other => vec![other],
        })
        .collect();
    Ok(Expr::Concat(flat))
}

fn parse_sum(t: &mut Tokens, ctx: &RuleCtx) -> Result<Expr, ParseError> {
    let mut e = parse_product(t, ctx)?;
    loop {
        let op = match t.peek() {
            Tok::Plus => ArithOp::Add,
            Tok::Minus => ArithOp::Sub,
            _ => return Ok(e),
        };
        t.bump();
        let r = parse_product(t, ctx)?;
        e = Expr::Arith(op, Box::new(e), Box::new(r));
    }
}

fn parse_product(t: &mut Tokens, ctx: &RuleCtx) -> Result<Expr, ParseError> {
    let mut e = parse_unary(t, ctx)?;
    loop {
        let op = match t.peek() {
            Tok::Star => ArithOp::Mul,
            Tok::Slash => ArithOp::Div,
            _ => return Ok(e),
        };
        t.bump();
        let r = parse_unary(t, ctx)?;
        e = Expr::Arith(op, Box::new(e), Box::new(r));
    }
}

fn parse_unary(t: &mut Tokens, ctx: &RuleCtx) -> Result<Expr, ParseError> {
    if t.eat(&Tok::Minus) {
        if let Tok::Word(w) = t.peek().clone() {
            if w.bytes().all(|b| b.is_ascii_digit()) {
                let p = t.pos();
                t.bump();
                return Ok(Expr::Int(parse_int(&w, true, p)?));
            }
        }
        return Ok(Expr::Neg(Box::new(parse_unary(t, ctx)?)));
    }
    parse_primary(t, ctx)
}

fn parse_primary(t: &mut Tokens, ctx: &RuleCtx) -> Result<Expr, ParseError> {
    let pos = t.pos();
    match t.bump() {
        Tok::Str(s) => Ok(Expr::str(&s)),
        Tok::LParen => {
            let e = parse_concat(t, ctx)?;
            t.expect(&Tok::RParen)?;
            Ok(e)
        }
        Tok::Word(w) if w.bytes().all(|b| b.is_ascii_digit()) => Ok(Expr::Int(parse_int(&w, false, pos)?)),
        Tok::Word(w) if w == "indeg" || w == "outdeg" => {
            t.expect(&Tok::LParen)?;
            let p = t.pos();
            let n = t.word("a node identifier")?;
            t.expect(&Tok::RParen)?;
            let i = ctx.lnode(&n, p)?;
            Ok(if w == "indeg" { Expr::Indeg(i) } else { Expr::Outdeg(i) })
        }
        Tok::Word(w) if w == "length" => {
            t.expect(&Tok::LParen)?;
            let p = t.pos();
            let v = t.word("a variable")?;
            t.expect(&Tok::RParen)?;
            Ok(Expr::Length(ctx.var(&v, p)?))
        }
        Tok::Word(w) if !KEYWORDS.contains(&w.as_str()) => Ok(Expr::Var(ctx.var(&w, pos)?)),
        other => Err(ParseError::new(pos, ErrorKind::Syntax, format!("expected an expression, found {other}"))),
    }
}

fn parse_cond(t: &mut Tokens, ctx: &RuleCtx) -> Result<Condition, ParseError> {
    let mut c = parse_conj(t, ctx)?;
    while t.eat_word("or") {
        let r = parse_conj(t, ctx)?;
        c = Condition::Or(Box::new(c), Box::new(r));
    }
    Ok(c)
}

fn parse_conj(t: &mut Tokens, ctx: &RuleCtx) -> Result<Condition, ParseError> {
    let mut c = parse_neg(t, ctx)?;
    while t.eat_word("and") {
        let r = parse_neg(t, ctx)?;
        c = Condition::And(Box::new(c), Box::new(r));
    }
    Ok(c)
}

fn parse_neg(t: &mut Tokens, ctx: &RuleCtx) -> Result<Condition, ParseError> {
    if t.eat_word("not") {
        return Ok(Condition::Not(Box::new(parse_neg(t, ctx)?)));
    }
    parse_atomic_cond(t, ctx)
}

fn parse_atomic_cond(t: &mut Tokens, ctx: &RuleCtx) -> Result<Condition, ParseError> {
    let pos = t.pos();
    if t.peek() == &Tok::LParen {
        // Either a grouped condition or a parenthesised operand of a
        // comparison; try the former first.
        let save = t.i;
        t.bump();
        if let Ok(c) = parse_cond(t, ctx) {
            if t.eat(&Tok::RParen) && !is_relop(t.peek()) {
                return Ok(c);
            }
        }
        t.i = save;
    }
    if let Tok::Word(w) = t.peek().clone() {
        if t.peek_at(1) == &Tok::LParen {
            let ty = match w.as_str() {
                "int" => Some(VarType::Int),
                "char" => Some(VarType::Char),
                "string" => Some(VarType::String),
                "atom" => Some(VarType::Atom),
                _ => None,
            };
            if let Some(ty) = ty {
                t.bump();
                t.bump();
                let p = t.pos();
                let v = t.word("a variable")?;
                t.expect(&Tok::RParen)?;
                return Ok(Condition::TypeTest(ty, ctx.var(&v, p)?));
            }
            if w == "edge" {
                t.bump();
                t.bump();
                let p = t.pos();
                let a = t.word("a node identifier")?;
                let a = ctx.lnode(&a, p)?;
                t.expect(&Tok::Comma)?;
                let p = t.pos();
                let b = t.word("a node identifier")?;
                let b = ctx.lnode(&b, p)?;
                let label = if t.eat(&Tok::Comma) { Some(parse_label(t, ctx)?) } else { None };
                t.expect(&Tok::RParen)?;
                return Ok(Condition::Edge(a, b, label));
            }
        }
    }
    let lhs = parse_label(t, ctx)?;
    let op = t.peek().clone();
    if !is_relop(&op) {
        return Err(t.unexpected("a comparison operator"));
    }
    t.bump();
    let rhs = parse_label(t, ctx)?;
    let single = |l: LabelExpr, p: Pos| -> Result<Expr, ParseError> {
        let mut items = l.items;
        if items.len() == 1 {
            Ok(items.pop().unwrap())
        } else {
            Err(ParseError::new(p, ErrorKind::TypeError, "integer comparison needs a single integer operand"))
        }
    };
    Ok(match op {
        Tok::Eq => Condition::Eq(lhs, rhs),
        Tok::Ne => Condition::Ne(lhs, rhs),
        _ => {
            let cmp = match op {
                Tok::Gt => CmpOp::Gt,
                Tok::Ge => CmpOp::Ge,
                Tok::Lt => CmpOp::Lt,
                _ => CmpOp::Le,
            };
            Condition::Cmp(cmp, single(lhs, pos)?, single(rhs, pos)?)
        }
    })
}

fn is_relop(t: &Tok) -> bool {
    matches!(t, Tok::Eq | Tok::Ne | Tok::Gt | Tok::Ge | Tok::Lt | Tok::Le)
}

// ---- name resolution and program-level checks ----

#[derive(Clone, Copy)]
enum Entry {
    Rule(usize),
    Proc(usize),
}

enum Site {
    Break,
    Proc(usize),
}

#[derive(Default)]
struct Builder {
    rules: Vec<Rule>,
    procs: Vec<Procedure>,
    proc_pos: Vec<Pos>,
}

impl Builder {
    fn build(mut self, decls: Vec<RawDecl>) -> Result<Program, ParseError> {
        let mut stack = Vec::new();
        let (_, _, main) = self.declare(decls, &mut stack)?;
        let Some((main, _)) = main else {
            return Err(ParseError::new(Pos { line: 1, col: 1 }, ErrorKind::MissingMain, "no `Main` declaration"));
        };
        let mut sites = Vec::new();
        let main = self.resolve(&main, &stack, false, &mut Some(&mut sites))?;
        self.check_recursion()?;
        let free = self.free_breaks();
        for (pos, site) in sites {
            let bad = match site {
                Site::Break => true,
                Site::Proc(p) => free[p],
            };
            if bad {
                return Err(ParseError::new(pos, ErrorKind::BreakOutsideLoop, "`break` outside of a loop"));
            }
        }
        Ok(Program { rules: self.rules, procs: self.procs, main })
    }

    /// Register a declaration list as a new innermost scope (left on the
    /// stack), then resolve the procedures declared in it.
    #[allow(clippy::type_complexity)]
    fn declare(
        &mut self,
        decls: Vec<RawDecl>,
        stack: &mut Vec<HashMap<String, Entry>>,
    ) -> Result<(Vec<usize>, Vec<usize>, Option<(RawCmd, Pos)>), ParseError> {
        let mut scope = HashMap::new();
        let mut rules = Vec::new();
        let mut procs = Vec::new();
        let mut pending = Vec::new();
        let mut main = None;
        for d in decls {
            let (name, pos, entry) = match d {
                RawDecl::Rule(r, pos) => {
                    let idx = self.rules.len();
                    let name = r.name.clone();
                    self.rules.push(*r);
                    rules.push(idx);
                    (name, pos, Entry::Rule(idx))
                }
                RawDecl::Proc(p) => {
                    let idx = self.procs.len();
                    self.procs.push(Procedure {
                        name: p.name.clone(),
                        body: Command::Skip,
                        local_rules: vec![],
                        local_procs: vec![],
                    });
                    self.proc_pos.push(p.pos);
                    procs.push(idx);
                    let out = (p.name.clone(), p.pos, Entry::Proc(idx));
                    pending.push((idx, p));
                    out
                }
                RawDecl::Main(body, pos) => {
                    if main.is_some() {
                        return Err(ParseError::new(pos, ErrorKind::DuplicateDeclaration, "`Main` declared twice"));
                    }
                    main = Some((body, pos));
                    continue;
                }
            };
            if scope.insert(name.clone(), entry).is_some() {
                return Err(ParseError::new(pos, ErrorKind::DuplicateDeclaration, format!("`{name}` declared twice")));
            }
        }
        stack.push(scope);
        for (idx, p) in pending {
            let (lr, lp, _) = self.declare(p.locals, stack)?;
            let body = self.resolve(&p.body, stack, false, &mut None)?;
            stack.pop();
            let proc = &mut self.procs[idx];
            proc.body = body;
            proc.local_rules = lr;
            proc.local_procs = lp;
        }
        Ok((rules, procs, main))
    }

    fn lookup(stack: &[HashMap<String, Entry>], name: &str, pos: Pos) -> Result<Entry, ParseError> {
        stack
            .iter()
            .rev()
            .find_map(|s| s.get(name).copied())
            .ok_or_else(|| ParseError::new(pos, ErrorKind::UnknownName, format!("`{name}` is not declared")))
    }

    fn resolve(
        &self,
        c: &RawCmd,
        stack: &[HashMap<String, Entry>],
        in_loop: bool,
        sites: &mut Option<&mut Vec<(Pos, Site)>>,
    ) -> Result<Command, ParseError> {
        let sub = |c: &RawCmd, in_loop: bool, sites: &mut Option<&mut Vec<(Pos, Site)>>| {
            self.resolve(c, stack, in_loop, sites).map(Box::new)
        };
        Ok(match c {
            RawCmd::Name(n, pos) => match Self::lookup(stack, n, *pos)? {
                Entry::Rule(i) => Command::RuleSet(vec![i]),
                Entry::Proc(i) => {
                    if !in_loop {
                        if let Some(s) = sites {
                            s.push((*pos, Site::Proc(i)));
                        }
                    }
                    Command::Call(i)
                }
            },
            RawCmd::RuleSet(names) => {
                let mut ids = Vec::new();
                for (n, pos) in names {
                    match Self::lookup(stack, n, *pos)? {
                        Entry::Rule(i) => ids.push(i),
                        Entry::Proc(_) => {
                            return Err(ParseError::new(
                                *pos,
                                ErrorKind::UnknownName,
                                format!("`{n}` is a procedure, not a rule"),
                            ))
                        }
                    }
                }
                Command::RuleSet(ids)
            }
            RawCmd::Seq(cs) => {
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    out.push(self.resolve(c, stack, in_loop, sites)?);
                }
                Command::Seq(out)
            }
            RawCmd::If(c, p, q) => Command::If {
                cond: sub(c, in_loop, sites)?,
                then: sub(p, in_loop, sites)?,
                els: q.as_ref().map(|q| sub(q, in_loop, sites)).transpose()?,
            },
            RawCmd::Try(c, p, q) => Command::Try {
                cond: sub(c, in_loop, sites)?,
                then: p.as_ref().map(|p| sub(p, in_loop, sites)).transpose()?,
                els: q.as_ref().map(|q| sub(q, in_loop, sites)).transpose()?,
            },
            RawCmd::Loop(b) => Command::Loop(sub(b, true, sites)?),
            RawCmd::Or(a, b) => Command::Or(sub(a, in_loop, sites)?, sub(b, in_loop, sites)?),
            RawCmd::Break(pos) => {
                if !in_loop {
                    if let Some(s) = sites {
                        s.push((*pos, Site::Break));
                    }
                }
                Command::Break
            }
            RawCmd::Skip => Command::Skip,
            RawCmd::Fail => Command::Fail,
        })
    }

    fn check_recursion(&self) -> Result<(), ParseError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.procs.len()];
        fn visit(b: &Builder, p: usize, state: &mut [u8]) -> Result<(), usize> {
            match state[p] {
                1 => return Err(p),
                2 => return Ok(()),
                _ => {}
            }
            state[p] = 1;
            let mut calls = Vec::new();
            collect_calls(&b.procs[p].body, &mut calls);
            for q in calls {
                visit(b, q, state)?;
            }
            state[p] = 2;
            Ok(())
        }
        for p in 0..self.procs.len() {
            if let Err(q) = visit(self, p, &mut state) {
                return Err(ParseError::new(
                    self.proc_pos[q],
                    ErrorKind::RecursiveProcedure,
                    format!("procedure `{}` is recursive", self.procs[q].name),
                ));
            }
        }
        Ok(())
    }

    /// For each procedure: may its body raise a `break` not caught by a loop
    /// inside it?
    fn free_breaks(&self) -> Vec<bool> {
        let mut memo: Vec<Option<bool>> = vec![None; self.procs.len()];
        fn proc_free(b: &Builder, p: usize, memo: &mut Vec<Option<bool>>) -> bool {
            if let Some(v) = memo[p] {
                return v;
            }
            let v = cmd_free(b, &b.procs[p].body, memo);
            memo[p] = Some(v);
            v
        }
        fn cmd_free(b: &Builder, c: &Command, memo: &mut Vec<Option<bool>>) -> bool {
            match c {
                Command::Break => true,
                Command::Call(p) => proc_free(b, *p, memo),
                Command::Loop(_) => false,
                Command::Seq(cs) => cs.iter().any(|c| cmd_free(b, c, memo)),
                Command::If { cond, then, els } => {
                    cmd_free(b, cond, memo) || cmd_free(b, then, memo) || els.as_ref().is_some_and(|e| cmd_free(b, e, memo))
                }
                Command::Try { cond, then, els } => {
                    cmd_free(b, cond, memo)
                        || then.as_ref().is_some_and(|e| cmd_free(b, e, memo))
                        || els.as_ref().is_some_and(|e| cmd_free(b, e, memo))
                }
                Command::Or(a, c) => cmd_free(b, a, memo) || cmd_free(b, c, memo),
                Command::RuleSet(_) | Command::Skip | Command::Fail => false,
            }
        }
        (0..self.procs.len()).map(|p| proc_free(self, p, &mut memo)).collect()
    }
}

fn collect_calls(c: &Command, out: &mut Vec<usize>) {
    match c {
        Command::Call(p) => out.push(*p),
        Command::Seq(cs) => cs.iter().for_each(|c| collect_calls(c, out)),
        Command::If { cond, then, els } => {
            collect_calls(cond, out);
            collect_calls(then, out);
            if let Some(e) = els {
                collect_calls(e, out);
            }
        }
        Command::Try { cond, then, els } => {
            collect_calls(cond, out);
            for e in [then, els].into_iter().flatten() {
                collect_calls(e, out);
            }
        }
        Command::Loop(b) => collect_calls(b, out),
        Command::Or(a, b) => {
            collect_calls(a, out);
            collect_calls(b, out);
        }
        _ => {}
    }
}
