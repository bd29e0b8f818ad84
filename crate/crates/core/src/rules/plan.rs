//! Search plans.
//!
//! Rooted left nodes are bound first from the root list. Remaining items are
//! reached breadth-first along left edges, ignoring direction. A node that
//! cannot be reached from anything bound so far starts a new component with
//! a scan of its mark bucket.

use std::collections::VecDeque;

use super::RuleGraph;
use crate::store::Orientation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Bind a rooted left node to some host root.
    Root(usize),
    /// Bind a left node to some host node of its mark.
    Scan(usize),
    /// Walk the `orient` cell of the already bound `from`, binding `edge` and
    /// binding or checking `to`. Bidirectional edges also try the reverse cell.
    Extend { edge: usize, from: usize, to: usize, orient: Orientation },
    /// Walk the loop cell of the bound `node`.
    Loop { edge: usize, node: usize },
}

pub(crate) fn compile(lhs: &RuleGraph) -> Vec<Step> {
    let n = lhs.nodes.len();
    let mut plan = Vec::with_capacity(n + lhs.edges.len());
    let mut bound = vec![false; n];
    let mut planned = vec![false; lhs.edges.len()];
    let mut queue = VecDeque::new();

    for (i, node) in lhs.nodes.iter().enumerate() {
        if node.rooted {
            plan.push(Step::Root(i));
            bound[i] = true;
            queue.push_back(i);
        }
    }
    loop {
        while let Some(u) = queue.pop_front() {
            for (j, e) in lhs.edges.iter().enumerate() {
                if planned[j] || (e.src != u && e.tgt != u) {
                    continue;
                }
                planned[j] = true;
                if e.src == e.tgt {
                    plan.push(Step::Loop { edge: j, node: u });
                    continue;
                }
                let (to, orient) = if e.src == u { (e.tgt, Orientation::Out) } else { (e.src, Orientation::In) };
                plan.push(Step::Extend { edge: j, from: u, to, orient });
                if !bound[to] {
                    bound[to] = true;
                    queue.push_back(to);
                }
            }
        }
        match bound.iter().position(|b| !b) {
            Some(i) => {
                plan.push(Step::Scan(i));
                bound[i] = true;
                queue.push_back(i);
            }
            None => break,
        }
    }
    plan
}
