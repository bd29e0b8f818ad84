//! Read-only checks run after every rule application.

use crate::mark::Mark;
use crate::store::{EdgeId, HostGraph, NodeId, Orientation};

pub trait Monitor {
    fn name(&self) -> &str;
    /// `Err` describes the violated property.
    fn check(&mut self, g: &HostGraph) -> Result<(), String>;
}

/// At most `max` root nodes.
pub struct RootBound(pub usize);

impl Monitor for RootBound {
    fn name(&self) -> &str {
        "root-count"
    }

    fn check(&mut self, g: &HostGraph) -> Result<(), String> {
        let n = g.root_count();
        if n > self.0 {
            return Err(format!("{n} root nodes, bound {}", self.0));
        }
        Ok(())
    }
}

/// At most `max` red edges.
pub struct RedEdgeBound(pub usize);

impl Monitor for RedEdgeBound {
    fn name(&self) -> &str {
        "red-edge-count"
    }

    fn check(&mut self, g: &HostGraph) -> Result<(), String> {
        let n = g.edges().filter(|&e| g.edge_mark(e) == Mark::Red).count();
        if n > self.0 {
            return Err(format!("{n} red edges, bound {}", self.0));
        }
        Ok(())
    }
}

/// Dashed edges form one simple path of blue nodes with the root at one
/// end. Rules match dashed edges in either direction, so the path is
/// followed regardless of host edge orientation. Vacuous when there are no
/// dashed edges.
pub struct DashedPath;

impl Monitor for DashedPath {
    fn name(&self) -> &str {
        "dashed-path"
    }

    fn check(&mut self, g: &HostGraph) -> Result<(), String> {
        let total = g.edges().filter(|&e| g.edge_mark(e) == Mark::Dashed).count();
        if total == 0 {
            return Ok(());
        }
        let dashed_at = |n: NodeId| -> Vec<EdgeId> {
            let mut out = Vec::new();
            for o in [Orientation::In, Orientation::Out, Orientation::Loop] {
                out.extend(g.incident_edges(n, Mark::Dashed, o).expect("live node"));
            }
            out
        };
        let Some(root) = g.root_nodes().next() else {
            return Err("dashed edges exist but there is no root".into());
        };
        if g.root_count() != 1 {
            return Err(format!("{} roots", g.root_count()));
        }
        let (mut cur, mut came_by) = (root, None);
        let mut seen = 0;
        loop {
            if g.node_mark(cur) != Mark::Blue {
                return Err(format!("node {cur} on the dashed path is {}", g.node_mark(cur)));
            }
            let inc = dashed_at(cur);
            let limit = if came_by.is_none() { 1 } else { 2 };
            if inc.len() > limit {
                return Err(format!("node {cur} has {} dashed edges", inc.len()));
            }
            match inc.into_iter().find(|&e| Some(e) != came_by) {
                Some(e) => {
                    if g.source(e) == g.target(e) {
                        return Err(format!("dashed loop {e}"));
                    }
                    seen += 1;
                    if seen > total {
                        return Err("dashed edges form a cycle".into());
                    }
                    cur = if g.source(e) == cur { g.target(e) } else { g.source(e) };
                    came_by = Some(e);
                }
                None => break,
            }
        }
        if seen != total {
            return Err(format!("{} dashed edges are not on the path from the root", total - seen));
        }
        Ok(())
    }
}
