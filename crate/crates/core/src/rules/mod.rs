//! Rules: representation, validation, search-plan compilation, matching and
//! application.
//!
//! A rule's interface is the set of node names shared by its left and right
//! graphs. Edges that carry the same name on both sides, between
//! corresponding interface nodes, are preserved and updated in place; every
//! other left edge is deleted and every other right edge created.

mod apply;
mod matcher;
mod plan;

pub use apply::RuleStats;
pub use matcher::Match;
pub use plan::Step;

use crate::labels::{Condition, LabelExpr, VarDecl, VarRef};
use crate::mark::{ItemKind, Mark};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleNode {
    pub name: String,
    pub label: LabelExpr,
    pub mark: Mark,
    pub rooted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleEdge {
    pub name: String,
    /// Node indices within the same side.
    pub src: usize,
    pub tgt: usize,
    pub label: LabelExpr,
    pub mark: Mark,
    /// Matches a host edge in either direction.
    pub bidirectional: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleGraph {
    pub nodes: Vec<RuleNode>,
    pub edges: Vec<RuleEdge>,
}

impl RuleGraph {
    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }
}

/// Static rule errors. Each variant is a distinct diagnostic.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule `{rule}`: duplicate node `{name}`")]
    DuplicateNode { rule: String, name: String },
    #[error("rule `{rule}`: duplicate edge `{name}`")]
    DuplicateEdge { rule: String, name: String },
    #[error("rule `{rule}`: mark `{mark}` is not allowed on {kind:?} `{item}`")]
    IllegalMark { rule: String, item: String, mark: Mark, kind: ItemKind },
    #[error("rule `{rule}`: {msg}")]
    NotSimple { rule: String, msg: String },
    #[error("rule `{rule}`: {msg}")]
    Type { rule: String, msg: String },
    #[error("rule `{rule}`: variable `{var}` occurs on the right-hand side but not on the left")]
    RhsVariable { rule: String, var: String },
    #[error("rule `{rule}`: variable `{var}` occurs in the condition but not on the left-hand side")]
    ConditionVariable { rule: String, var: String },
    #[error("rule `{rule}`: `any` on right-hand item `{item}` without `any` on the matching left-hand item")]
    AnyWithoutLhs { rule: String, item: String },
    #[error("rule `{rule}`: preserved edge `{item}` must keep its endpoints")]
    PreservedEdgeEndpoints { rule: String, item: String },
    #[error("rule `{rule}`: bidirectional edge `{item}` on the right-hand side must be preserved")]
    BidirectionalCreated { rule: String, item: String },
    #[error("rule `{rule}`: degree operator refers to `{item}`, which is not a left-hand node")]
    DegreeNode { rule: String, item: String },
}

/// Planned effect on an interface node.
#[derive(Clone, Debug)]
pub(crate) struct NodeUpdate {
    pub l: usize,
    pub r: usize,
    pub relabel: bool,
    pub mark: Option<Mark>,
    pub root: Option<bool>,
}

#[derive(Clone, Debug)]
pub(crate) struct EdgeUpdate {
    pub l: usize,
    pub r: usize,
    pub relabel: bool,
    pub mark: Option<Mark>,
}

#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub plan: Vec<Step>,
    /// Right node index for each left node in the interface.
    pub l_to_r: Vec<Option<usize>>,
    /// Left node index for each right node in the interface.
    pub r_to_l: Vec<Option<usize>>,
    pub deleted_edges: Vec<usize>,
    /// Deleted left nodes with their incident left edges.
    pub deleted_nodes: Vec<(usize, Vec<usize>)>,
    pub node_updates: Vec<NodeUpdate>,
    pub edge_updates: Vec<EdgeUpdate>,
    pub added_nodes: Vec<usize>,
    pub added_edges: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub name: String,
    pub vars: Vec<VarDecl>,
    pub lhs: RuleGraph,
    pub rhs: RuleGraph,
    /// Node references in the condition and in right-hand degree operators
    /// are left-hand node indices.
    pub condition: Option<Condition>,
    compiled: Compiled,
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        vars: Vec<VarDecl>,
        lhs: RuleGraph,
        rhs: RuleGraph,
        condition: Option<Condition>,
    ) -> Result<Rule, RuleError> {
        let name = name.into();
        let compiled = validate(&name, &vars, &lhs, &rhs, condition.as_ref())?;
        Ok(Rule { name, vars, lhs, rhs, condition, compiled })
    }

    pub fn plan(&self) -> &[Step] {
        &self.compiled.plan
    }

    /// Left nodes that are also right nodes, as (left, right) index pairs.
    pub fn interface(&self) -> Vec<(usize, usize)> {
        self.compiled.l_to_r.iter().enumerate().filter_map(|(l, r)| r.map(|r| (l, r))).collect()
    }

    /// Every left node is reached from a root and no left node is bound by
    /// a global scan.
    pub fn is_rooted_plan(&self) -> bool {
        !self.compiled.plan.iter().any(|s| matches!(s, Step::Scan(_)))
    }

    pub fn new_match(&self) -> Match {
        Match::new(self)
    }

    /// Whether applying the rule never changes the host graph.
    pub fn is_identity(&self) -> bool {
        let c = self.compiled();
        c.deleted_edges.is_empty()
            && c.deleted_nodes.is_empty()
            && c.node_updates.is_empty()
            && c.edge_updates.is_empty()
            && c.added_nodes.is_empty()
            && c.added_edges.is_empty()
    }

    pub(crate) fn compiled(&self) -> &Compiled {
        &self.compiled
    }
}

fn validate(
    rule: &str,
    vars: &[VarDecl],
    lhs: &RuleGraph,
    rhs: &RuleGraph,
    cond: Option<&Condition>,
) -> Result<Compiled, RuleError> {
    let r = || rule.to_string();
    for g in [lhs, rhs] {
        for (i, n) in g.nodes.iter().enumerate() {
            if g.nodes[..i].iter().any(|m| m.name == n.name) {
                return Err(RuleError::DuplicateNode { rule: r(), name: n.name.clone() });
            }
            if !n.mark.is_legal_rule(ItemKind::Node) {
                return Err(RuleError::IllegalMark { rule: r(), item: n.name.clone(), mark: n.mark, kind: ItemKind::Node });
            }
            n.label.typecheck(vars).map_err(|msg| RuleError::Type { rule: r(), msg })?;
        }
        for (i, e) in g.edges.iter().enumerate() {
            if g.edges[..i].iter().any(|f| f.name == e.name) {
                return Err(RuleError::DuplicateEdge { rule: r(), name: e.name.clone() });
            }
            if !e.mark.is_legal_rule(ItemKind::Edge) {
                return Err(RuleError::IllegalMark { rule: r(), item: e.name.clone(), mark: e.mark, kind: ItemKind::Edge });
            }
            e.label.typecheck(vars).map_err(|msg| RuleError::Type { rule: r(), msg })?;
        }
    }
    for n in &lhs.nodes {
        n.label.check_simple(vars).map_err(|msg| RuleError::NotSimple { rule: r(), msg })?;
    }
    for e in &lhs.edges {
        e.label.check_simple(vars).map_err(|msg| RuleError::NotSimple { rule: r(), msg })?;
    }

    let mut lvars = vec![false; vars.len()];
    for l in lhs.nodes.iter().map(|n| &n.label).chain(lhs.edges.iter().map(|e| &e.label)) {
        for VarRef(v) in l.vars() {
            lvars[v] = true;
        }
    }
    for l in rhs.nodes.iter().map(|n| &n.label).chain(rhs.edges.iter().map(|e| &e.label)) {
        for VarRef(v) in l.vars() {
            if !lvars[v] {
                return Err(RuleError::RhsVariable { rule: r(), var: vars[v].name.clone() });
            }
        }
        for n in l.degree_nodes() {
            if n >= lhs.nodes.len() {
                return Err(RuleError::DegreeNode { rule: r(), item: format!("#{n}") });
            }
        }
    }
    if let Some(c) = cond {
        c.typecheck(vars).map_err(|msg| RuleError::Type { rule: r(), msg })?;
        for VarRef(v) in c.vars() {
            if !lvars[v] {
                return Err(RuleError::ConditionVariable { rule: r(), var: vars[v].name.clone() });
            }
        }
        for n in c.nodes() {
            if n >= lhs.nodes.len() {
                return Err(RuleError::DegreeNode { rule: r(), item: format!("#{n}") });
            }
        }
    }

    let l_to_r: Vec<Option<usize>> = lhs.nodes.iter().map(|n| rhs.node_index(&n.name)).collect();
    let r_to_l: Vec<Option<usize>> = rhs.nodes.iter().map(|n| lhs.node_index(&n.name)).collect();

    let mut node_updates = Vec::new();
    let mut added_nodes = Vec::new();
    for (ri, rn) in rhs.nodes.iter().enumerate() {
        match r_to_l[ri] {
            Some(li) => {
                let ln = &lhs.nodes[li];
                if rn.mark == Mark::Any && ln.mark != Mark::Any {
                    return Err(RuleError::AnyWithoutLhs { rule: r(), item: rn.name.clone() });
                }
                let relabel = rn.label != ln.label || rn.label.uses_degree();
                let mark = (rn.mark != Mark::Any && rn.mark != ln.mark).then_some(rn.mark);
                let root = (rn.rooted != ln.rooted).then_some(rn.rooted);
                if relabel || mark.is_some() || root.is_some() {
                    node_updates.push(NodeUpdate { l: li, r: ri, relabel, mark, root });
                }
            }
            None => {
                if rn.mark == Mark::Any {
                    return Err(RuleError::AnyWithoutLhs { rule: r(), item: rn.name.clone() });
                }
                added_nodes.push(ri);
            }
        }
    }

    let mut edge_updates = Vec::new();
    let mut added_edges = Vec::new();
    let mut kept = vec![false; lhs.edges.len()];
    for (ri, re) in rhs.edges.iter().enumerate() {
        let preserved = lhs.edge_index(&re.name);
        match preserved {
            Some(li) => {
                let le = &lhs.edges[li];
                if l_to_r[le.src] != Some(re.src) || l_to_r[le.tgt] != Some(re.tgt) || le.bidirectional != re.bidirectional
                {
                    return Err(RuleError::PreservedEdgeEndpoints { rule: r(), item: re.name.clone() });
                }
                if re.mark == Mark::Any && le.mark != Mark::Any {
                    return Err(RuleError::AnyWithoutLhs { rule: r(), item: re.name.clone() });
                }
                kept[li] = true;
                let relabel = re.label != le.label || re.label.uses_degree();
                let mark = (re.mark != Mark::Any && re.mark != le.mark).then_some(re.mark);
                if relabel || mark.is_some() {
                    edge_updates.push(EdgeUpdate { l: li, r: ri, relabel, mark });
                }
            }
            None => {
                if re.bidirectional {
                    return Err(RuleError::BidirectionalCreated { rule: r(), item: re.name.clone() });
                }
                if re.mark == Mark::Any {
                    return Err(RuleError::AnyWithoutLhs { rule: r(), item: re.name.clone() });
                }
                added_edges.push(ri);
            }
        }
    }
    let deleted_edges: Vec<usize> = (0..lhs.edges.len()).filter(|&i| !kept[i]).collect();
    let deleted_nodes: Vec<(usize, Vec<usize>)> = (0..lhs.nodes.len())
        .filter(|&i| l_to_r[i].is_none())
        .map(|i| {
            let inc = lhs.edges.iter().enumerate().filter(|(_, e)| e.src == i || e.tgt == i).map(|(j, _)| j).collect();
            (i, inc)
        })
        .collect();

    Ok(Compiled {
        plan: plan::compile(lhs),
        l_to_r,
        r_to_l,
        deleted_edges,
        deleted_nodes,
        node_updates,
        edge_updates,
        added_nodes,
        added_edges,
    })
}

#[cfg(test)]
mod tests;
