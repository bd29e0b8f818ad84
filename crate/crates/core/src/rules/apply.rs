//! Rule application.

use smallvec::SmallVec;

use super::matcher::MatchCtx;
use super::{Match, Rule};
use crate::labels::{HostValue, RuntimeError};
use crate::store::{HostGraph, NodeId};

/// Per-rule counters. `calls = successes + failures`; `attempts` counts
/// host candidates inspected while matching.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleStats {
    pub calls: u64,
    pub successes: u64,
    pub failures: u64,
    pub attempts: u64,
}

/// Per-application buffers; rules rarely have more than a handful of items.
type Scratch<T> = SmallVec<[T; 4]>;

impl Rule {
    /// Transform `g` according to a match found by [`Rule::find_match`].
    /// Right-hand labels are evaluated before anything is changed, so an
    /// evaluation error leaves `g` untouched.
    pub fn apply(&self, g: &mut HostGraph, m: &Match) -> Result<(), RuntimeError> {
        let c = self.compiled();
        let ctx = MatchCtx { g, m };
        let mut node_labels: Scratch<Option<HostValue>> = SmallVec::new();
        for u in &c.node_updates {
            node_labels.push(if u.relabel { Some(self.rhs.nodes[u.r].label.eval(&ctx)?) } else { None });
        }
        let mut new_node_labels: Scratch<HostValue> = SmallVec::new();
        for &r in &c.added_nodes {
            new_node_labels.push(self.rhs.nodes[r].label.eval(&ctx)?);
        }
        let mut new_edge_labels: Scratch<HostValue> = SmallVec::new();
        for &r in &c.added_edges {
            new_edge_labels.push(self.rhs.edges[r].label.eval(&ctx)?);
        }
        let mut edge_labels: Scratch<Option<HostValue>> = SmallVec::new();
        for u in &c.edge_updates {
            edge_labels.push(if u.relabel { Some(self.rhs.edges[u.r].label.eval(&ctx)?) } else { None });
        }

        const BUG: &str = "rule application violated a store precondition";
        for &j in &c.deleted_edges {
            g.delete_edge(m.edge(j)).expect(BUG);
        }
        for (i, _) in &c.deleted_nodes {
            g.delete_node(m.node(*i)).expect(BUG);
        }
        for (u, label) in c.node_updates.iter().zip(node_labels) {
            g.update_node(m.node(u.l), label, u.mark, u.root).expect(BUG);
        }
        let mut r_nodes: Scratch<Option<NodeId>> = c.r_to_l.iter().map(|l| l.map(|l| m.node(l))).collect();
        for (&r, label) in c.added_nodes.iter().zip(new_node_labels) {
            let rn = &self.rhs.nodes[r];
            r_nodes[r] = Some(g.add_node(label, rn.mark, rn.rooted).expect(BUG));
        }
        for (&r, label) in c.added_edges.iter().zip(new_edge_labels) {
            let re = &self.rhs.edges[r];
            let (s, t) = (r_nodes[re.src].expect(BUG), r_nodes[re.tgt].expect(BUG));
            g.add_edge(s, t, label, re.mark).expect(BUG);
        }
        for (u, label) in c.edge_updates.iter().zip(edge_labels) {
            g.update_edge(m.edge(u.l), label, u.mark).expect(BUG);
        }
        Ok(())
    }

    /// Find a match and apply it. Returns whether the rule applied.
    pub fn apply_once(&self, g: &mut HostGraph, m: &mut Match, stats: &mut RuleStats) -> Result<bool, RuntimeError> {
        stats.calls += 1;
        let found = self.find_match(g, m);
        stats.attempts += m.attempts;
        // A runtime error counts as a failed call.
        match found.and_then(|f| if f { self.apply(g, m).map(|_| true) } else { Ok(false) }) {
            Ok(true) => {
                stats.successes += 1;
                Ok(true)
            }
            other => {
                stats.failures += 1;
                other
            }
        }
    }
}
