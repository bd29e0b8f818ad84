//! Rule application conditions.

use super::{EvalCtx, Expr, ExprType, LabelExpr, RuntimeError, VarDecl, VarRef, VarType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Gt,
    Ge,
    Lt,
    Le,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
        }
    }

    fn holds(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// `int(x)`, `char(x)`, `string(x)`, `atom(x)`.
    TypeTest(VarType, VarRef),
    Eq(LabelExpr, LabelExpr),
    Ne(LabelExpr, LabelExpr),
    Cmp(CmpOp, Expr, Expr),
    /// `edge(n1, n2 [, label])` over left-hand node indices.
    Edge(usize, usize, Option<LabelExpr>),
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

impl Condition {
    pub fn eval(&self, ctx: &dyn EvalCtx) -> Result<bool, RuntimeError> {
        Ok(match self {
            Condition::TypeTest(t, v) => t.admits(ctx.var(*v)?),
            Condition::Eq(a, b) => a.eval(ctx)? == b.eval(ctx)?,
            Condition::Ne(a, b) => a.eval(ctx)? != b.eval(ctx)?,
            Condition::Cmp(op, a, b) => op.holds(a.eval_int(ctx)?, b.eval_int(ctx)?),
            Condition::Edge(s, t, l) => match l {
                Some(l) => {
                    let v = l.eval(ctx)?;
                    ctx.has_edge(*s, *t, Some(&v))
                }
                None => ctx.has_edge(*s, *t, None),
            },
            Condition::Not(c) => !c.eval(ctx)?,
            Condition::And(a, b) => a.eval(ctx)? && b.eval(ctx)?,
            Condition::Or(a, b) => a.eval(ctx)? || b.eval(ctx)?,
        })
    }

    pub fn typecheck(&self, vars: &[VarDecl]) -> Result<(), String> {
        match self {
            Condition::TypeTest(..) => Ok(()),
            Condition::Eq(a, b) | Condition::Ne(a, b) => {
                a.typecheck(vars)?;
                b.typecheck(vars)
            }
            Condition::Cmp(op, a, b) => {
                for e in [a, b] {
                    if e.typecheck(vars)? != ExprType::Int {
                        return Err(format!(
                            "operand of `{}` must be an integer: {}",
                            op.symbol(),
                            e.display(vars)
                        ));
                    }
                }
                Ok(())
            }
            Condition::Edge(_, _, l) => l.as_ref().map_or(Ok(()), |l| l.typecheck(vars)),
            Condition::Not(c) => c.typecheck(vars),
            Condition::And(a, b) | Condition::Or(a, b) => {
                a.typecheck(vars)?;
                b.typecheck(vars)
            }
        }
    }

    pub fn vars(&self) -> Vec<VarRef> {
        let mut out = Vec::new();
        self.collect(&mut out, &mut Vec::new());
        out
    }

    /// Left-hand nodes referenced by `edge` predicates and degree operators.
    pub fn nodes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect(&mut Vec::new(), &mut out);
        out
    }

    fn collect(&self, vars: &mut Vec<VarRef>, nodes: &mut Vec<usize>) {
        match self {
            Condition::TypeTest(_, v) => vars.push(*v),
            Condition::Eq(a, b) | Condition::Ne(a, b) => {
                vars.extend(a.vars());
                vars.extend(b.vars());
                nodes.extend(a.degree_nodes());
                nodes.extend(b.degree_nodes());
            }
            Condition::Cmp(_, a, b) => {
                a.collect_vars(vars);
                b.collect_vars(vars);
                a.collect_nodes(nodes);
                b.collect_nodes(nodes);
            }
            Condition::Edge(s, t, l) => {
                nodes.push(*s);
                nodes.push(*t);
                if let Some(l) = l {
                    vars.extend(l.vars());
                    nodes.extend(l.degree_nodes());
                }
            }
            Condition::Not(c) => c.collect(vars, nodes),
            Condition::And(a, b) | Condition::Or(a, b) => {
                a.collect(vars, nodes);
                b.collect(vars, nodes);
            }
        }
    }
}
