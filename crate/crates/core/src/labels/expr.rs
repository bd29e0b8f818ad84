//! Rule-side label expressions.

use std::fmt;
use std::sync::Arc;

use super::{Atom, EvalCtx, HostValue, RuntimeError, VarDecl, VarType};

/// Index of a variable in its rule's declaration list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> char {
        match self {
            ArithOp::Add => '+',
            ArithOp::Sub => '-',
            ArithOp::Mul => '*',
            ArithOp::Div => '/',
        }
    }

    /// Checked; division truncates toward zero.
    pub fn apply(self, a: i64, b: i64) -> Result<i64, RuntimeError> {
        let r = match self {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_sub(b),
            ArithOp::Mul => a.checked_mul(b),
            ArithOp::Div => {
                if b == 0 {
                    return Err(RuntimeError::DivisionByZero);
                }
                a.checked_div(b)
            }
        };
        r.ok_or(RuntimeError::Overflow)
    }
}

/// One item of a label list, or a sub-expression of one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(VarRef),
    Int(i64),
    Str(Arc<str>),
    /// String concatenation `a . b . c`.
    Concat(Vec<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// Degrees of the host node matched by a left-hand rule node.
    Indeg(usize),
    Outdeg(usize),
    Length(VarRef),
}

/// Static kind of an expression. `Str` covers both string and char.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExprType {
    List,
    Atom,
    Int,
    Str,
}

impl ExprType {
    fn of_var(t: VarType) -> ExprType {
        match t {
            VarType::List => ExprType::List,
            VarType::Atom => ExprType::Atom,
            VarType::Int => ExprType::Int,
            VarType::String | VarType::Char => ExprType::Str,
        }
    }
}

impl Expr {
    pub fn str(s: &str) -> Expr {
        Expr::Str(Arc::from(s))
    }

    pub fn typecheck(&self, vars: &[VarDecl]) -> Result<ExprType, String> {
        match self {
            Expr::Var(v) => Ok(ExprType::of_var(vars[v.0].ty)),
            Expr::Int(_) | Expr::Indeg(_) | Expr::Outdeg(_) | Expr::Length(_) => Ok(ExprType::Int),
            Expr::Str(_) => Ok(ExprType::Str),
            Expr::Concat(parts) => {
                for p in parts {
                    if p.typecheck(vars)? != ExprType::Str {
                        return Err(format!("operand of `.` must be a string: {}", p.display(vars)));
                    }
                }
                Ok(ExprType::Str)
            }
            Expr::Arith(op, a, b) => {
                for e in [a, b] {
                    if e.typecheck(vars)? != ExprType::Int {
                        return Err(format!(
                            "operand of `{}` must be an integer: {}",
                            op.symbol(),
                            e.display(vars)
                        ));
                    }
                }
                Ok(ExprType::Int)
            }
            Expr::Neg(e) => {
                if e.typecheck(vars)? != ExprType::Int {
                    return Err(format!("operand of unary `-` must be an integer: {}", e.display(vars)));
                }
                Ok(ExprType::Int)
            }
        }
    }

    /// Free of arithmetic, degree and length operators.
    fn is_structural(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Int(_) | Expr::Str(_) => true,
            Expr::Concat(parts) => parts.iter().all(Expr::is_structural),
            _ => false,
        }
    }

    pub fn uses_degree(&self) -> bool {
        match self {
            Expr::Indeg(_) | Expr::Outdeg(_) => true,
            Expr::Concat(p) => p.iter().any(Expr::uses_degree),
            Expr::Arith(_, a, b) => a.uses_degree() || b.uses_degree(),
            Expr::Neg(a) => a.uses_degree(),
            _ => false,
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<VarRef>) {
        match self {
            Expr::Var(v) | Expr::Length(v) => out.push(*v),
            Expr::Concat(p) => p.iter().for_each(|e| e.collect_vars(out)),
            Expr::Arith(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Neg(a) => a.collect_vars(out),
            _ => {}
        }
    }

    pub fn collect_nodes(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Indeg(n) | Expr::Outdeg(n) => out.push(*n),
            Expr::Concat(p) => p.iter().for_each(|e| e.collect_nodes(out)),
            Expr::Arith(_, a, b) => {
                a.collect_nodes(out);
                b.collect_nodes(out);
            }
            Expr::Neg(a) => a.collect_nodes(out),
            _ => {}
        }
    }

    pub fn eval_int(&self, ctx: &dyn EvalCtx) -> Result<i64, RuntimeError> {
        match self {
            Expr::Int(i) => Ok(*i),
            Expr::Var(v) => {
                let val = ctx.var(*v)?;
                val.as_int().ok_or_else(|| RuntimeError::NotAnInteger(val.clone()))
            }
            Expr::Arith(op, a, b) => op.apply(a.eval_int(ctx)?, b.eval_int(ctx)?),
            Expr::Neg(a) => a.eval_int(ctx)?.checked_neg().ok_or(RuntimeError::Overflow),
            Expr::Indeg(n) => Ok(ctx.indeg(*n)),
            Expr::Outdeg(n) => Ok(ctx.outdeg(*n)),
            Expr::Length(v) => {
                let val = ctx.var(*v)?;
                let n = match val.single() {
                    Some(Atom::Str(s)) => s.len(),
                    _ => val.len(),
                };
                Ok(n as i64)
            }
            Expr::Str(_) | Expr::Concat(_) => {
                Err(RuntimeError::NotAnInteger(HostValue::atom(self.eval_atom(ctx)?)))
            }
        }
    }

    fn eval_str_into(&self, ctx: &dyn EvalCtx, out: &mut String) -> Result<(), RuntimeError> {
        match self {
            Expr::Str(s) => out.push_str(s),
            Expr::Var(v) => {
                let val = ctx.var(*v)?;
                out.push_str(val.as_str().ok_or_else(|| RuntimeError::NotAString(val.clone()))?);
            }
            Expr::Concat(parts) => {
                for p in parts {
                    p.eval_str_into(ctx, out)?;
                }
            }
            other => {
                let a = other.eval_atom(ctx)?;
                return Err(RuntimeError::NotAString(HostValue::atom(a)));
            }
        }
        Ok(())
    }

    /// Evaluate an expression denoting a single atom.
    pub fn eval_atom(&self, ctx: &dyn EvalCtx) -> Result<Atom, RuntimeError> {
        match self {
            Expr::Str(s) => Ok(Atom::Str(s.clone())),
            Expr::Concat(_) => {
                let mut s = String::new();
                self.eval_str_into(ctx, &mut s)?;
                Ok(Atom::Str(Arc::from(s)))
            }
            Expr::Var(v) => {
                let val = ctx.var(*v)?;
                val.single().cloned().ok_or_else(|| RuntimeError::NotAnInteger(val.clone()))
            }
            _ => Ok(Atom::Int(self.eval_int(ctx)?)),
        }
    }

    pub fn display<'a>(&'a self, vars: &'a [VarDecl]) -> impl fmt::Display + 'a {
        DisplayExpr { e: self, vars }
    }

    fn write(&self, vars: &[VarDecl], f: &mut dyn fmt::Write, nested: bool) -> fmt::Result {
        match self {
            Expr::Var(v) => f.write_str(&vars[v.0].name),
            Expr::Int(i) => {
                if *i < 0 && nested {
                    write!(f, "({i})")
                } else {
                    write!(f, "{i}")
                }
            }
            Expr::Str(s) => write!(f, "\"{s}\""),
            Expr::Concat(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_char('.')?;
                    }
                    p.write(vars, f, true)?;
                }
                Ok(())
            }
            Expr::Arith(op, a, b) => {
                f.write_char('(')?;
                a.write(vars, f, true)?;
                f.write_char(op.symbol())?;
                b.write(vars, f, true)?;
                f.write_char(')')
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write(vars, f, true)
            }
            Expr::Indeg(n) => write!(f, "indeg(#{n})"),
            Expr::Outdeg(n) => write!(f, "outdeg(#{n})"),
            Expr::Length(v) => write!(f, "length({})", vars[v.0].name),
        }
    }
}

struct DisplayExpr<'a> {
    e: &'a Expr,
    vars: &'a [VarDecl],
}

impl fmt::Display for DisplayExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.e.write(self.vars, f, false)
    }
}

/// A rule label: a list of items joined by `:`. No items means `empty`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LabelExpr {
    pub items: Vec<Expr>,
}

impl LabelExpr {
    pub fn new(items: Vec<Expr>) -> Self {
        LabelExpr { items }
    }

    pub fn empty() -> Self {
        LabelExpr { items: Vec::new() }
    }

    pub fn var(v: VarRef) -> Self {
        LabelExpr { items: vec![Expr::Var(v)] }
    }

    pub fn typecheck(&self, vars: &[VarDecl]) -> Result<(), String> {
        for it in &self.items {
            it.typecheck(vars)?;
        }
        Ok(())
    }

    /// Simple labels may appear on the left-hand side: no operators, at
    /// most one list variable, at most one string variable per concatenation.
    pub fn check_simple(&self, vars: &[VarDecl]) -> Result<(), String> {
        let mut lists = 0;
        for it in &self.items {
            if !it.is_structural() {
                return Err(format!("left-hand label item `{}` is not simple", it.display(vars)));
            }
            match it {
                Expr::Var(v) if vars[v.0].ty == VarType::List => lists += 1,
                Expr::Concat(parts) => {
                    let strings = parts
                        .iter()
                        .filter(|p| matches!(p, Expr::Var(v) if vars[v.0].ty == VarType::String))
                        .count();
                    if strings > 1 {
                        return Err(format!(
                            "concatenation `{}` has more than one string variable",
                            it.display(vars)
                        ));
                    }
                    if parts.iter().any(|p| !matches!(p, Expr::Var(_) | Expr::Str(_))) {
                        return Err(format!("concatenation `{}` is not simple", it.display(vars)));
                    }
                }
                _ => {}
            }
        }
        if lists > 1 {
            return Err("left-hand label has more than one list variable".into());
        }
        Ok(())
    }

    pub fn uses_degree(&self) -> bool {
        self.items.iter().any(Expr::uses_degree)
    }

    pub fn vars(&self) -> Vec<VarRef> {
        let mut out = Vec::new();
        for it in &self.items {
            it.collect_vars(&mut out);
        }
        out
    }

    pub fn degree_nodes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for it in &self.items {
            it.collect_nodes(&mut out);
        }
        out
    }

    pub fn eval(&self, ctx: &dyn EvalCtx) -> Result<HostValue, RuntimeError> {
        let mut out = HostValue::empty();
        for it in &self.items {
            match it {
                Expr::Var(v) => out.extend_from(ctx.var(*v)?),
                other => out.push(other.eval_atom(ctx)?),
            }
        }
        Ok(out)
    }

    pub fn display<'a>(&'a self, vars: &'a [VarDecl]) -> impl fmt::Display + 'a {
        DisplayLabel { l: self, vars }
    }

    /// Printer used by the program printer; degree operators name their
    /// node via `node_names`.
    pub fn write_with(
        &self,
        vars: &[VarDecl],
        node_names: &dyn Fn(usize) -> String,
        f: &mut dyn fmt::Write,
    ) -> fmt::Result {
        if self.items.is_empty() {
            return f.write_str("empty");
        }
        for (i, it) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_char(':')?;
            }
            write_named(it, vars, node_names, f, false)?;
        }
        Ok(())
    }
}

pub(crate) fn write_named(
    e: &Expr,
    vars: &[VarDecl],
    node_names: &dyn Fn(usize) -> String,
    f: &mut dyn fmt::Write,
    nested: bool,
) -> fmt::Result {
    match e {
        Expr::Indeg(n) => write!(f, "indeg({})", node_names(*n)),
        Expr::Outdeg(n) => write!(f, "outdeg({})", node_names(*n)),
        Expr::Arith(op, a, b) => {
            f.write_char('(')?;
            write_named(a, vars, node_names, f, true)?;
            f.write_char(op.symbol())?;
            write_named(b, vars, node_names, f, true)?;
            f.write_char(')')
        }
        Expr::Neg(a) => {
            f.write_str("-")?;
            write_named(a, vars, node_names, f, true)
        }
        Expr::Concat(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    f.write_char('.')?;
                }
                write_named(p, vars, node_names, f, true)?;
            }
            Ok(())
        }
        other => other.write(vars, f, nested),
    }
}

struct DisplayLabel<'a> {
    l: &'a LabelExpr,
    vars: &'a [VarDecl],
}

impl fmt::Display for DisplayLabel<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.l.write_with(self.vars, &|n| format!("#{n}"), f)
    }
}
