//! Unification of simple left-hand labels with host labels.

use super::{Atom, EvalCtx, Expr, HostValue, LabelExpr, RuntimeError, VarDecl, VarRef, VarType};

/// Partial variable assignment with a trail so that a matcher can undo
/// bindings when it backtracks.
#[derive(Clone, Debug, Default)]
pub struct Assignment {
    values: Vec<Option<HostValue>>,
    trail: Vec<usize>,
}

impl Assignment {
    pub fn new(nvars: usize) -> Self {
        Assignment { values: vec![None; nvars], trail: Vec::new() }
    }

    pub fn get(&self, v: VarRef) -> Option<&HostValue> {
        self.values.get(v.0).and_then(Option::as_ref)
    }

    pub fn bind(&mut self, v: VarRef, val: HostValue) {
        debug_assert!(self.values[v.0].is_none(), "rebinding variable {}", v.0);
        self.values[v.0] = Some(val);
        self.trail.push(v.0);
    }

    /// Current trail height; pass to [`Assignment::undo_to`] to retract
    /// every binding made since.
    pub fn checkpoint(&self) -> usize {
        self.trail.len()
    }

    pub fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.values[v] = None;
        }
    }

    pub fn clear(&mut self) {
        self.undo_to(0);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn bound(&self) -> impl Iterator<Item = (VarRef, &HostValue)> {
        self.values.iter().enumerate().filter_map(|(i, v)| v.as_ref().map(|v| (VarRef(i), v)))
    }

    pub fn lookup(&self, v: VarRef) -> Result<&HostValue, RuntimeError> {
        self.get(v).ok_or(RuntimeError::Unbound(v.0))
    }
}

/// Assignment-only context; degree and edge queries are not available.
impl EvalCtx for Assignment {
    fn var(&self, v: VarRef) -> Result<&HostValue, RuntimeError> {
        self.lookup(v)
    }
    fn indeg(&self, _: usize) -> i64 {
        0
    }
    fn outdeg(&self, _: usize) -> i64 {
        0
    }
    fn has_edge(&self, _: usize, _: usize, _: Option<&HostValue>) -> bool {
        false
    }
}

/// Extend `alpha` so that `label` instantiates to `host`. On failure `alpha`
/// is left as it was. `label` must be simple.
pub fn unify_label(label: &LabelExpr, vars: &[VarDecl], host: &HostValue, alpha: &mut Assignment) -> bool {
    let mark = alpha.checkpoint();
    let ok = unify_items(&label.items, vars, host.atoms(), alpha);
    if !ok {
        alpha.undo_to(mark);
    }
    ok
}

fn unify_items(items: &[Expr], vars: &[VarDecl], atoms: &[Atom], alpha: &mut Assignment) -> bool {
    let list_pos = items
        .iter()
        .position(|e| matches!(e, Expr::Var(v) if vars[v.0].ty == VarType::List));
    let Some(p) = list_pos else {
        return items.len() == atoms.len()
            && items.iter().zip(atoms).all(|(e, a)| unify_atom(e, vars, a, alpha));
    };
    let after = items.len() - p - 1;
    if atoms.len() < p + after {
        return false;
    }
    let tail_start = atoms.len() - after;
    if !items[..p].iter().zip(&atoms[..p]).all(|(e, a)| unify_atom(e, vars, a, alpha)) {
        return false;
    }
    if !items[p + 1..].iter().zip(&atoms[tail_start..]).all(|(e, a)| unify_atom(e, vars, a, alpha)) {
        return false;
    }
    let Expr::Var(lv) = items[p] else { unreachable!() };
    let middle = &atoms[p..tail_start];
    match alpha.get(lv) {
        Some(bound) => bound.atoms() == middle,
        None => {
            alpha.bind(lv, HostValue::from_atoms(middle.iter().cloned()));
            true
        }
    }
}

fn unify_atom(e: &Expr, vars: &[VarDecl], a: &Atom, alpha: &mut Assignment) -> bool {
    match e {
        Expr::Int(i) => matches!(a, Atom::Int(j) if i == j),
        Expr::Str(s) => matches!(a, Atom::Str(t) if s == t),
        Expr::Var(v) => {
            if !vars[v.0].ty.admits_atom(a) {
                return false;
            }
            match alpha.get(*v) {
                Some(bound) => bound.single() == Some(a),
                None => {
                    alpha.bind(*v, HostValue::atom(a.clone()));
                    true
                }
            }
        }
        Expr::Concat(parts) => match a {
            Atom::Str(s) => unify_concat(parts, vars, s, alpha),
            Atom::Int(_) => false,
        },
        _ => false,
    }
}

/// Bind a string/char variable to `s`, or compare with its binding.
fn unify_str_var(v: VarRef, vars: &[VarDecl], s: &str, alpha: &mut Assignment) -> bool {
    if vars[v.0].ty == VarType::Char && s.len() != 1 {
        return false;
    }
    match alpha.get(v) {
        Some(bound) => bound.as_str() == Some(s),
        None => {
            alpha.bind(v, HostValue::string(s));
            true
        }
    }
}

fn unify_concat(parts: &[Expr], vars: &[VarDecl], s: &str, alpha: &mut Assignment) -> bool {
    let str_pos = parts
        .iter()
        .position(|e| matches!(e, Expr::Var(v) if vars[v.0].ty == VarType::String));
    let split = str_pos.unwrap_or(parts.len());
    let mut rest = s;
    for part in &parts[..split] {
        match part {
            Expr::Str(lit) => match rest.strip_prefix(&**lit) {
                Some(r) => rest = r,
                None => return false,
            },
            Expr::Var(v) => {
                if rest.is_empty() || !unify_str_var(*v, vars, &rest[..1], alpha) {
                    return false;
                }
                rest = &rest[1..];
            }
            _ => return false,
        }
    }
    let Some(p) = str_pos else {
        return rest.is_empty();
    };
    for part in parts[p + 1..].iter().rev() {
        match part {
            Expr::Str(lit) => match rest.strip_suffix(&**lit) {
                Some(r) => rest = r,
                None => return false,
            },
            Expr::Var(v) => {
                if rest.is_empty() {
                    return false;
                }
                let cut = rest.len() - 1;
                if !unify_str_var(*v, vars, &rest[cut..], alpha) {
                    return false;
                }
                rest = &rest[..cut];
            }
            _ => return false,
        }
    }
    let Expr::Var(sv) = parts[p] else { unreachable!() };
    unify_str_var(sv, vars, rest, alpha)
}
