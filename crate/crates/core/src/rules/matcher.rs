//! Backtracking execution of a search plan.

use super::{Rule, Step};
use crate::labels::{unify_label, Assignment, EvalCtx, HostValue, RuntimeError, VarRef};
use crate::mark::Mark;
use crate::store::{EdgeId, HostGraph, NodeId, Orientation};

/// A match of a rule's left graph: node and edge images plus the variable
/// assignment. Reused across attempts to avoid allocation.
#[derive(Clone, Debug)]
pub struct Match {
    nodes: Vec<Option<NodeId>>,
    edges: Vec<Option<EdgeId>>,
    /// Assignment checkpoints taken before binding each node / edge.
    node_cp: Vec<usize>,
    edge_cp: Vec<usize>,
    pub alpha: Assignment,
    /// Candidates inspected by the most recent search.
    pub attempts: u64,
}

impl Match {
    pub(crate) fn new(rule: &Rule) -> Match {
        Match {
            nodes: vec![None; rule.lhs.nodes.len()],
            edges: vec![None; rule.lhs.edges.len()],
            node_cp: vec![0; rule.lhs.nodes.len()],
            edge_cp: vec![0; rule.lhs.edges.len()],
            alpha: Assignment::new(rule.vars.len()),
            attempts: 0,
        }
    }

    /// Host image of left node `i`. Panics if unbound.
    pub fn node(&self, i: usize) -> NodeId {
        self.nodes[i].expect("unbound rule node")
    }

    pub fn edge(&self, i: usize) -> EdgeId {
        self.edges[i].expect("unbound rule edge")
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().flatten().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().flatten().copied()
    }

    fn reset(&mut self) {
        self.nodes.iter_mut().for_each(|n| *n = None);
        self.edges.iter_mut().for_each(|e| *e = None);
        self.alpha.clear();
    }

    fn clear_flags(&self, g: &mut HostGraph) {
        for n in self.nodes.iter().flatten() {
            g.set_node_matched(*n, false);
        }
        for e in self.edges.iter().flatten() {
            g.set_edge_matched(*e, false);
        }
    }
}

/// Evaluation context over a host graph and a (complete) match.
pub(crate) struct MatchCtx<'a> {
    pub g: &'a HostGraph,
    pub m: &'a Match,
}

impl EvalCtx for MatchCtx<'_> {
    fn var(&self, v: VarRef) -> Result<&HostValue, RuntimeError> {
        self.m.alpha.lookup(v)
    }

    fn indeg(&self, node: usize) -> i64 {
        self.g.indeg(self.m.node(node)) as i64
    }

    fn outdeg(&self, node: usize) -> i64 {
        self.g.outdeg(self.m.node(node)) as i64
    }

    fn has_edge(&self, src: usize, tgt: usize, label: Option<&HostValue>) -> bool {
        let (s, t) = (self.m.node(src), self.m.node(tgt));
        let orient = if s == t { Orientation::Loop } else { Orientation::Out };
        [Mark::None, Mark::Any].into_iter().any(|mark| {
            let mut cur = self.g.edge_cursor(s, mark, orient);
            while let Some(e) = self.g.next_edge(&mut cur) {
                if self.g.target(e) == t && label.is_none_or(|l| self.g.edge_label(e) == l) {
                    return true;
                }
            }
            false
        })
    }
}

impl Rule {
    /// Search for a match satisfying the dangling condition and the rule
    /// condition. On success `m` holds it. Matched flags are clear on return.
    pub fn find_match(&self, g: &mut HostGraph, m: &mut Match) -> Result<bool, RuntimeError> {
        m.reset();
        let before = g.inspections();
        let r = self.search(g, m, 0);
        m.attempts = g.inspections() - before;
        m.clear_flags(g);
        if !matches!(r, Ok(true)) {
            m.reset();
        }
        r
    }

    fn search(&self, g: &mut HostGraph, m: &mut Match, k: usize) -> Result<bool, RuntimeError> {
        let plan = &self.compiled().plan;
        if k == plan.len() {
            return self.final_checks(g, m);
        }
        match plan[k] {
            Step::Root(i) => {
                let mut cur = g.root_cursor();
                while let Some(h) = g.next_node(&mut cur) {
                    if self.bind_node(g, m, i, h) {
                        if self.search(g, m, k + 1)? {
                            return Ok(true);
                        }
                        self.unbind_node(g, m, i);
                    }
                }
            }
            Step::Scan(i) => {
                let mut cur = g.node_cursor(self.lhs.nodes[i].mark);
                while let Some(h) = g.next_node(&mut cur) {
                    if self.bind_node(g, m, i, h) {
                        if self.search(g, m, k + 1)? {
                            return Ok(true);
                        }
                        self.unbind_node(g, m, i);
                    }
                }
            }
            Step::Extend { edge, from, to, orient } => {
                let le = &self.lhs.edges[edge];
                let hf = m.node(from);
                let reverse = match orient {
                    Orientation::Out => Orientation::In,
                    _ => Orientation::Out,
                };
                let orients = [orient, reverse];
                let count = if le.bidirectional { 2 } else { 1 };
                for &o in &orients[..count] {
                    let mut cur = g.edge_cursor(hf, le.mark, o);
                    while let Some(he) = g.next_edge(&mut cur) {
                        let other = if o == Orientation::Out { g.target(he) } else { g.source(he) };
                        if !self.bind_edge(g, m, edge, he) {
                            continue;
                        }
                        let fresh = m.nodes[to].is_none();
                        let ok = if fresh { self.bind_node(g, m, to, other) } else { m.nodes[to] == Some(other) };
                        if ok {
                            if self.search(g, m, k + 1)? {
                                return Ok(true);
                            }
                            if fresh {
                                self.unbind_node(g, m, to);
                            }
                        }
                        self.unbind_edge(g, m, edge);
                    }
                }
            }
            Step::Loop { edge, node } => {
                let le = &self.lhs.edges[edge];
                let mut cur = g.edge_cursor(m.node(node), le.mark, Orientation::Loop);
                while let Some(he) = g.next_edge(&mut cur) {
                    if self.bind_edge(g, m, edge, he) {
                        if self.search(g, m, k + 1)? {
                            return Ok(true);
                        }
                        self.unbind_edge(g, m, edge);
                    }
                }
            }
        }
        Ok(false)
    }

    fn bind_node(&self, g: &mut HostGraph, m: &mut Match, i: usize, h: NodeId) -> bool {
        let ln = &self.lhs.nodes[i];
        if g.is_node_matched(h) || !ln.mark.matches(g.node_mark(h)) || (ln.rooted && !g.is_root(h)) {
            return false;
        }
        let cp = m.alpha.checkpoint();
        if !unify_label(&ln.label, &self.vars, g.node_label(h), &mut m.alpha) {
            return false;
        }
        m.node_cp[i] = cp;
        m.nodes[i] = Some(h);
        g.set_node_matched(h, true);
        true
    }

    fn unbind_node(&self, g: &mut HostGraph, m: &mut Match, i: usize) {
        let h = m.nodes[i].take().unwrap();
        g.set_node_matched(h, false);
        m.alpha.undo_to(m.node_cp[i]);
    }

    fn bind_edge(&self, g: &mut HostGraph, m: &mut Match, j: usize, h: EdgeId) -> bool {
        let le = &self.lhs.edges[j];
        if g.is_edge_matched(h) || !le.mark.matches(g.edge_mark(h)) {
            return false;
        }
        let cp = m.alpha.checkpoint();
        if !unify_label(&le.label, &self.vars, g.edge_label(h), &mut m.alpha) {
            return false;
        }
        m.edge_cp[j] = cp;
        m.edges[j] = Some(h);
        g.set_edge_matched(h, true);
        true
    }

    fn unbind_edge(&self, g: &mut HostGraph, m: &mut Match, j: usize) {
        let h = m.edges[j].take().unwrap();
        g.set_edge_matched(h, false);
        m.alpha.undo_to(m.edge_cp[j]);
    }

    fn final_checks(&self, g: &HostGraph, m: &Match) -> Result<bool, RuntimeError> {
        if !self.dangling_ok(g, m) {
            return Ok(false);
        }
        match &self.condition {
            None => Ok(true),
            Some(c) => c.eval(&MatchCtx { g, m }),
        }
    }

    /// Every node the rule deletes has all of its incident edges matched.
    /// Compares host degrees with the matched incidence, so the cost is
    /// independent of the host degree.
    pub fn dangling_ok(&self, g: &HostGraph, m: &Match) -> bool {
        self.compiled().deleted_nodes.iter().all(|(i, inc)| {
            let h = m.node(*i);
            let (mut ins, mut outs) = (0, 0);
            for &j in inc {
                let he = m.edge(j);
                if g.source(he) == h {
                    outs += 1;
                }
                if g.target(he) == h {
                    ins += 1;
                }
            }
            g.indeg(h) == ins && g.outdeg(h) == outs
        })
    }
}
