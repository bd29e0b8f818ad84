//! Program printer. Output re-parses to an equal program.

use std::fmt::Write as _;

use crate::interp::{Command, Program};
use crate::labels::{write_named, Condition, LabelExpr, VarDecl};
use crate::mark::Mark;
use crate::rules::{Rule, RuleGraph};

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for r in p.top_level_rules() {
        print_rule(&p.rules[r], &mut out, "");
        out.push('\n');
    }
    for q in p.top_level_procs() {
        print_proc(p, q, &mut out, "");
    }
    out.push_str("Main = ");
    out.push_str(&comseq(p, &p.main));
    out.push('\n');
    out
}

fn print_proc(p: &Program, q: usize, out: &mut String, indent: &str) {
    let proc = &p.procs[q];
    write!(out, "{indent}{} = ", proc.name).unwrap();
    if !proc.local_rules.is_empty() || !proc.local_procs.is_empty() {
        out.push_str("[\n");
        let inner = format!("{indent}    ");
        for &r in &proc.local_rules {
            print_rule(&p.rules[r], out, &inner);
            out.push('\n');
        }
        for &lp in &proc.local_procs {
            print_proc(p, lp, out, &inner);
        }
        write!(out, "{indent}] ").unwrap();
    }
    out.push_str(&comseq(p, &proc.body));
    out.push('\n');
}

pub(crate) fn print_rule(r: &Rule, out: &mut String, indent: &str) {
    write!(out, "{indent}{}(", r.name).unwrap();
    let mut i = 0;
    while i < r.vars.len() {
        let ty = r.vars[i].ty;
        let mut j = i;
        while j < r.vars.len() && r.vars[j].ty == ty {
            j += 1;
        }
        if i > 0 {
            out.push_str("; ");
        }
        let names: Vec<&str> = r.vars[i..j].iter().map(|v| v.name.as_str()).collect();
        write!(out, "{}:{}", names.join(", "), ty).unwrap();
        i = j;
    }
    out.push_str(")\n");
    let lnames = |n: usize| r.lhs.nodes[n].name.clone();
    write!(out, "{indent}    ").unwrap();
    print_graph(&r.lhs, &r.vars, &lnames, out);
    write!(out, "\n{indent}    => ").unwrap();
    print_graph(&r.rhs, &r.vars, &lnames, out);
    if let Some(c) = &r.condition {
        write!(out, "\n{indent}    where ").unwrap();
        print_cond(c, &r.vars, &lnames, out, false);
    }
}

fn print_label(l: &LabelExpr, vars: &[VarDecl], names: &dyn Fn(usize) -> String, out: &mut String) {
    l.write_with(vars, names, out).unwrap();
}

fn print_mark(m: Mark, out: &mut String) {
    if m != Mark::None {
        write!(out, " # {m}").unwrap();
    }
}

fn print_graph(g: &RuleGraph, vars: &[VarDecl], names: &dyn Fn(usize) -> String, out: &mut String) {
    out.push('[');
    for n in &g.nodes {
        write!(out, " ({}{}, ", n.name, if n.rooted { "(R)" } else { "" }).unwrap();
        print_label(&n.label, vars, names, out);
        print_mark(n.mark, out);
        out.push(')');
    }
    out.push_str(" |");
    for e in &g.edges {
        write!(
            out,
            " ({}{}, {}, {}, ",
            e.name,
            if e.bidirectional { "(B)" } else { "" },
            g.nodes[e.src].name,
            g.nodes[e.tgt].name
        )
        .unwrap();
        print_label(&e.label, vars, names, out);
        print_mark(e.mark, out);
        out.push(')');
    }
    out.push_str(" ]");
}

fn print_cond(c: &Condition, vars: &[VarDecl], names: &dyn Fn(usize) -> String, out: &mut String, nested: bool) {
    match c {
        Condition::TypeTest(t, v) => write!(out, "{t}({})", vars[v.0].name).unwrap(),
        Condition::Eq(a, b) | Condition::Ne(a, b) => {
            print_label(a, vars, names, out);
            out.push_str(if matches!(c, Condition::Eq(..)) { " = " } else { " != " });
            print_label(b, vars, names, out);
        }
        Condition::Cmp(op, a, b) => {
            write_named(a, vars, names, out, false).unwrap();
            write!(out, " {} ", op.symbol()).unwrap();
            write_named(b, vars, names, out, false).unwrap();
        }
        Condition::Edge(s, t, l) => {
            write!(out, "edge({}, {}", names(*s), names(*t)).unwrap();
            if let Some(l) = l {
                out.push_str(", ");
                print_label(l, vars, names, out);
            }
            out.push(')');
        }
        Condition::Not(inner) => {
            out.push_str("not ");
            print_cond(inner, vars, names, out, true);
        }
        Condition::And(a, b) | Condition::Or(a, b) => {
            if nested {
                out.push('(');
            }
            print_cond(a, vars, names, out, true);
            out.push_str(if matches!(c, Condition::And(..)) { " and " } else { " or " });
            print_cond(b, vars, names, out, true);
            if nested {
                out.push(')');
            }
        }
    }
}

fn name_of(p: &Program, c: &Command) -> Option<String> {
    match c {
        Command::RuleSet(rs) if rs.len() == 1 => Some(p.rules[rs[0]].name.clone()),
        Command::RuleSet(rs) => {
            let names: Vec<&str> = rs.iter().map(|&r| p.rules[r].name.as_str()).collect();
            Some(format!("{{{}}}", names.join(", ")))
        }
        Command::Call(q) => Some(p.procs[*q].name.clone()),
        Command::Break => Some("break".into()),
        Command::Skip => Some("skip".into()),
        Command::Fail => Some("fail".into()),
        _ => None,
    }
}

fn block(p: &Program, c: &Command) -> String {
    if let Some(n) = name_of(p, c) {
        return n;
    }
    if let Command::Loop(b) = c {
        return format!("{}!", loop_body(p, b));
    }
    format!("({})", comseq(p, c))
}

fn loop_body(p: &Program, b: &Command) -> String {
    name_of(p, b).unwrap_or_else(|| format!("({})", comseq(p, b)))
}

fn command(p: &Program, c: &Command) -> String {
    match c {
        Command::Or(a, b) => {
            let left = if matches!(**a, Command::Or(..)) { command(p, a) } else { block(p, a) };
            format!("{left} or {}", block(p, b))
        }
        Command::If { cond, then, els } => {
            let mut s = format!("if {} then {}", block(p, cond), block(p, then));
            if let Some(e) = els {
                write!(s, " else {}", block(p, e)).unwrap();
            }
            s
        }
        Command::Try { cond, then, els } => {
            let mut s = format!("try {}", block(p, cond));
            if let Some(t) = then {
                write!(s, " then {}", block(p, t)).unwrap();
            }
            if let Some(e) = els {
                write!(s, " else {}", block(p, e)).unwrap();
            }
            s
        }
        Command::Seq(_) => format!("({})", comseq(p, c)),
        _ => block(p, c),
    }
}

fn comseq(p: &Program, c: &Command) -> String {
    match c {
        Command::Seq(cs) if !cs.is_empty() => cs.iter().map(|c| command(p, c)).collect::<Vec<_>>().join("; "),
        // An empty sequence has no surface syntax of its own.
        Command::Seq(_) => "skip".into(),
        _ => command(p, c),
    }
}
