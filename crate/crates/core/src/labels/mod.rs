//! Label algebra: typed variables, rule-side expressions and conditions,
//! their evaluation, and unification of simple labels against host values.

mod cond;
mod expr;
mod unify;
mod value;

pub use cond::{CmpOp, Condition};
pub use expr::{ArithOp, Expr, ExprType, LabelExpr, VarRef};
pub(crate) use expr::write_named;
pub use unify::{unify_label, Assignment};
pub use value::{is_valid_string, Atom, HostValue};

use std::fmt;
use std::str::FromStr;

/// Variable types. `char <= string <= atom <= list` and `int <= atom`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarType {
    List,
    Atom,
    Int,
    String,
    Char,
}

impl VarType {
    pub fn is_subtype_of(self, other: VarType) -> bool {
        use VarType::*;
        match (self, other) {
            (a, b) if a == b => true,
            (_, List) => true,
            (Int | String | Char, Atom) => true,
            (Char, String) => true,
            _ => false,
        }
    }

    /// Whether a host value inhabits this type.
    pub fn admits(self, v: &HostValue) -> bool {
        match self {
            VarType::List => true,
            VarType::Atom => v.len() == 1,
            VarType::Int => v.as_int().is_some(),
            VarType::String => v.as_str().is_some(),
            VarType::Char => v.as_str().is_some_and(|s| s.len() == 1),
        }
    }

    pub(crate) fn admits_atom(self, a: &Atom) -> bool {
        match (self, a) {
            (VarType::List | VarType::Atom, _) => true,
            (VarType::Int, Atom::Int(_)) => true,
            (VarType::String, Atom::Str(_)) => true,
            (VarType::Char, Atom::Str(s)) => s.len() == 1,
            _ => false,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            VarType::List => "list",
            VarType::Atom => "atom",
            VarType::Int => "int",
            VarType::String => "string",
            VarType::Char => "char",
        }
    }
}

impl fmt::Display for VarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for VarType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "list" => VarType::List,
            "atom" => VarType::Atom,
            "int" => VarType::Int,
            "string" => VarType::String,
            "char" => VarType::Char,
            _ => return Err(format!("unknown type `{s}`")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub ty: VarType,
}

/// Errors raised while evaluating expressions at run time.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RuntimeError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("arithmetic on non-integer value {0}")]
    NotAnInteger(HostValue),
    #[error("string operation on non-string value {0}")]
    NotAString(HostValue),
    #[error("variable {0} is unbound")]
    Unbound(usize),
}

/// What expression and condition evaluation needs from the outside world.
/// Node references are indices of left-hand rule nodes.
pub trait EvalCtx {
    fn var(&self, v: VarRef) -> Result<&HostValue, RuntimeError>;
    fn indeg(&self, node: usize) -> i64;
    fn outdeg(&self, node: usize) -> i64;
    /// Some host edge from the image of `src` to the image of `tgt`, with
    /// label equal to `label` when given.
    fn has_edge(&self, src: usize, tgt: usize, label: Option<&HostValue>) -> bool;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subtype_hierarchy() {
        use VarType::*;
        let all = [List, Atom, Int, String, Char];
        for t in all {
            assert!(t.is_subtype_of(List));
            assert!(t.is_subtype_of(t));
        }
        assert!(Char.is_subtype_of(String));
        assert!(Char.is_subtype_of(Atom));
        assert!(Int.is_subtype_of(Atom));
        assert!(!Int.is_subtype_of(String));
        assert!(!String.is_subtype_of(Char));
        assert!(!List.is_subtype_of(Atom));
    }

    #[test]
    fn admits() {
        let two = HostValue::from_atoms([Atom::Int(1), Atom::Int(2)]);
        assert!(VarType::List.admits(&two));
        assert!(VarType::List.admits(&HostValue::empty()));
        assert!(!VarType::Atom.admits(&two));
        assert!(VarType::Int.admits(&HostValue::int(-9)));
        assert!(!VarType::Int.admits(&HostValue::string("9")));
        assert!(VarType::Char.admits(&HostValue::string("f")));
        assert!(!VarType::Char.admits(&HostValue::string("ff")));
        assert!(VarType::String.admits(&HostValue::string("")));
    }
}
