//! Host graph store.
//!
//! Nodes live in one of five mark buckets (none, grey, red, green, blue) and
//! optionally in the root list. Every node owns fifteen edge cells indexed by
//! edge mark (none, dashed, red, green, blue) and orientation (in, out, loop).
//! All lists are intrusive and doubly linked, so every elementary update is a
//! constant number of pointer splices.

mod journal;
mod list;

use std::cell::Cell;
use std::fmt;

use crate::labels::HostValue;
use crate::mark::{ItemKind, Mark};
use journal::{Journal, Undo};
use list::{insert_after, push_back, unlink, Link, List, NIL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    index: u32,
    generation: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    index: u32,
    generation: u32,
}

impl NodeId {
    pub fn index(self) -> usize {
        self.index as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.index as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.index)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    In = 0,
    Out = 1,
    Loop = 2,
}

impl Orientation {
    pub const ALL: [Orientation; 3] = [Orientation::In, Orientation::Out, Orientation::Loop];
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StoreError {
    #[error("mark `{mark}` is not allowed on a host {kind:?}")]
    IllegalMark { mark: Mark, kind: ItemKind },
    #[error("no such node {0}")]
    NodeNotFound(NodeId),
    #[error("no such edge {0}")]
    EdgeNotFound(EdgeId),
    #[error("node {0} still has incident edges")]
    NonzeroDegree(NodeId),
    #[error("store mode can only change while the graph is empty")]
    NotEmpty,
}

/// Edge rows in array order.
const EDGE_ROWS: [Mark; 5] = [Mark::None, Mark::Dashed, Mark::Red, Mark::Green, Mark::Blue];
/// Node buckets in array order.
const NODE_BUCKETS: [Mark; 5] = [Mark::None, Mark::Grey, Mark::Red, Mark::Green, Mark::Blue];

#[derive(Clone, Debug)]
struct NodeSlot {
    generation: u32,
    alive: bool,
    matched: bool,
    rooted: bool,
    mark: Mark,
    indeg: u32,
    outdeg: u32,
    label: HostValue,
    /// Bucket membership; doubles as the free-list link of dead slots.
    bucket: Link,
    root: Link,
    cells: [[List; 3]; 5],
}

#[derive(Clone, Debug)]
struct EdgeSlot {
    generation: u32,
    alive: bool,
    matched: bool,
    mark: Mark,
    source: u32,
    target: u32,
    label: HostValue,
    /// Link in the source's out cell, or the loop cell; free-list link when dead.
    src: Link,
    /// Link in the target's in cell (unused by loops).
    tgt: Link,
}

fn bucket_link(n: &mut NodeSlot) -> &mut Link {
    &mut n.bucket
}
fn root_link(n: &mut NodeSlot) -> &mut Link {
    &mut n.root
}
fn src_link(e: &mut EdgeSlot) -> &mut Link {
    &mut e.src
}
fn tgt_link(e: &mut EdgeSlot) -> &mut Link {
    &mut e.tgt
}

fn link_for(o: Orientation) -> fn(&mut EdgeSlot) -> &mut Link {
    match o {
        Orientation::In => tgt_link,
        Orientation::Out | Orientation::Loop => src_link,
    }
}

/// Read-only view of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeView<'a> {
    pub id: NodeId,
    pub label: &'a HostValue,
    pub mark: Mark,
    pub rooted: bool,
    pub indeg: usize,
    pub outdeg: usize,
}

/// Read-only view of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeView<'a> {
    pub id: EdgeId,
    pub label: &'a HostValue,
    pub mark: Mark,
    pub source: NodeId,
    pub target: NodeId,
}

/// Position in a node sequence. Cursors do not borrow the graph; advance them
/// with [`HostGraph::next_node`]. Structural mutation invalidates a cursor.
#[derive(Clone, Copy, Debug)]
pub struct NodeCursor(NodeCursorKind);

#[derive(Clone, Copy, Debug)]
enum NodeCursorKind {
    Buckets { rows: [u8; 4], nrows: u8, ri: u8, next: u32 },
    Roots { next: u32 },
    Scan { mark: Mark, pos: u32 },
}

/// Position in the edge cells of one node.
#[derive(Clone, Copy, Debug)]
pub struct EdgeCursor {
    node: u32,
    orient: Orientation,
    rows: [u8; 4],
    nrows: u8,
    ri: u8,
    next: u32,
}

#[derive(Clone, Debug, Default)]
pub struct HostGraph {
    nodes: Vec<NodeSlot>,
    edges: Vec<EdgeSlot>,
    free_nodes: Option<u32>,
    free_edges: Option<u32>,
    buckets: [List; 5],
    roots: List,
    node_count: usize,
    edge_count: usize,
    root_count: usize,
    legacy: bool,
    inspections: Cell<u64>,
    journal: Journal,
}

impl HostGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// A graph whose node lookups by mark scan every node in slot order,
    /// as a store without mark buckets would.
    pub fn new_legacy() -> Self {
        HostGraph { legacy: true, ..Self::default() }
    }

    pub fn set_legacy_mode(&mut self, enabled: bool) -> Result<(), StoreError> {
        if enabled == self.legacy {
            return Ok(());
        }
        if self.node_count > 0 || self.edge_count > 0 {
            return Err(StoreError::NotEmpty);
        }
        self.legacy = enabled;
        Ok(())
    }

    pub fn is_legacy(&self) -> bool {
        self.legacy
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn root_count(&self) -> usize {
        self.root_count
    }

    pub fn is_empty(&self) -> bool {
        self.node_count == 0
    }

    /// Number of candidate items handed out by cursors so far.
    pub fn inspections(&self) -> u64 {
        self.inspections.get()
    }

    pub fn reset_inspections(&self) {
        self.inspections.set(0);
    }

    #[inline]
    fn inspect_one(&self) {
        self.inspections.set(self.inspections.get() + 1);
    }

    // ---- id validation ----

    #[inline]
    fn live_node(&self, id: NodeId) -> Option<&NodeSlot> {
        self.nodes
            .get(id.index as usize)
            .filter(|n| n.alive && n.generation == id.generation)
    }

    #[inline]
    fn live_edge(&self, id: EdgeId) -> Option<&EdgeSlot> {
        self.edges
            .get(id.index as usize)
            .filter(|e| e.alive && e.generation == id.generation)
    }

    fn check_node(&self, id: NodeId) -> Result<(), StoreError> {
        self.live_node(id).map(|_| ()).ok_or(StoreError::NodeNotFound(id))
    }

    fn check_edge(&self, id: EdgeId) -> Result<(), StoreError> {
        self.live_edge(id).map(|_| ()).ok_or(StoreError::EdgeNotFound(id))
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.live_node(id).is_some()
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.live_edge(id).is_some()
    }

    fn node_id(&self, index: u32) -> NodeId {
        NodeId { index, generation: self.nodes[index as usize].generation }
    }

    fn edge_id(&self, index: u32) -> EdgeId {
        EdgeId { index, generation: self.edges[index as usize].generation }
    }

    /// The live node occupying slot `index`, if any.
    pub fn node_at(&self, index: usize) -> Option<NodeId> {
        self.nodes.get(index).filter(|n| n.alive).map(|_| self.node_id(index as u32))
    }

    pub fn edge_at(&self, index: usize) -> Option<EdgeId> {
        self.edges.get(index).filter(|e| e.alive).map(|_| self.edge_id(index as u32))
    }

    /// Live nodes in slot order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter_map(|i| self.node_at(i))
    }

    /// Live edges in slot order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).filter_map(|i| self.edge_at(i))
    }

    // ---- inspection ----

    pub fn inspect_node(&self, id: NodeId) -> Result<NodeView<'_>, StoreError> {
        let n = self.live_node(id).ok_or(StoreError::NodeNotFound(id))?;
        Ok(NodeView {
            id,
            label: &n.label,
            mark: n.mark,
            rooted: n.rooted,
            indeg: n.indeg as usize,
            outdeg: n.outdeg as usize,
        })
    }

    pub fn inspect_edge(&self, id: EdgeId) -> Result<EdgeView<'_>, StoreError> {
        let e = self.live_edge(id).ok_or(StoreError::EdgeNotFound(id))?;
        Ok(EdgeView {
            id,
            label: &e.label,
            mark: e.mark,
            source: self.node_id(e.source),
            target: self.node_id(e.target),
        })
    }

    // Unchecked accessors for hot paths; ids must be live.

    #[inline]
    fn n(&self, id: NodeId) -> &NodeSlot {
        let n = &self.nodes[id.index as usize];
        debug_assert!(n.alive && n.generation == id.generation, "stale {id}");
        n
    }

    #[inline]
    fn e(&self, id: EdgeId) -> &EdgeSlot {
        let e = &self.edges[id.index as usize];
        debug_assert!(e.alive && e.generation == id.generation, "stale {id}");
        e
    }

    pub fn node_mark(&self, id: NodeId) -> Mark {
        self.n(id).mark
    }

    pub fn node_label(&self, id: NodeId) -> &HostValue {
        &self.n(id).label
    }

    pub fn is_root(&self, id: NodeId) -> bool {
        self.n(id).rooted
    }

    /// Incoming edges, loops included.
    pub fn indeg(&self, id: NodeId) -> usize {
        self.n(id).indeg as usize
    }

    /// Outgoing edges, loops included.
    pub fn outdeg(&self, id: NodeId) -> usize {
        self.n(id).outdeg as usize
    }

    pub fn edge_mark(&self, id: EdgeId) -> Mark {
        self.e(id).mark
    }

    pub fn edge_label(&self, id: EdgeId) -> &HostValue {
        &self.e(id).label
    }

    pub fn source(&self, id: EdgeId) -> NodeId {
        self.node_id(self.e(id).source)
    }

    pub fn target(&self, id: EdgeId) -> NodeId {
        self.node_id(self.e(id).target)
    }

    // ---- matched flags ----

    pub fn set_node_matched(&mut self, id: NodeId, on: bool) {
        debug_assert!(self.contains_node(id));
        self.nodes[id.index as usize].matched = on;
    }

    pub fn is_node_matched(&self, id: NodeId) -> bool {
        self.n(id).matched
    }

    pub fn set_edge_matched(&mut self, id: EdgeId, on: bool) {
        debug_assert!(self.contains_edge(id));
        self.edges[id.index as usize].matched = on;
    }

    pub fn is_edge_matched(&self, id: EdgeId) -> bool {
        self.e(id).matched
    }

    /// True when no live item carries a matched flag. Linear; for tests.
    pub fn no_matched_flags(&self) -> bool {
        self.nodes.iter().all(|n| !n.alive || !n.matched) && self.edges.iter().all(|e| !e.alive || !e.matched)
    }

    // ---- cursors ----

    /// Nodes with mark `mark`; `Mark::Any` visits red, green, blue and grey
    /// in that order.
    pub fn node_cursor(&self, mark: Mark) -> NodeCursor {
        debug_assert!(mark != Mark::Dashed);
        if self.legacy {
            return NodeCursor(NodeCursorKind::Scan { mark, pos: 0 });
        }
        let mut rows = [0u8; 4];
        let nrows = if mark == Mark::Any {
            for (r, m) in rows.iter_mut().zip(Mark::ANY_NODE_MARKS) {
                *r = m.node_bucket() as u8;
            }
            4
        } else {
            rows[0] = mark.node_bucket() as u8;
            1
        };
        let next = self.buckets[rows[0] as usize].head;
        NodeCursor(NodeCursorKind::Buckets { rows, nrows, ri: 0, next })
    }

    pub fn root_cursor(&self) -> NodeCursor {
        NodeCursor(NodeCursorKind::Roots { next: self.roots.head })
    }

    pub fn next_node(&self, cur: &mut NodeCursor) -> Option<NodeId> {
        match &mut cur.0 {
            NodeCursorKind::Buckets { rows, nrows, ri, next } => loop {
                if *next != NIL {
                    let i = *next;
                    *next = self.nodes[i as usize].bucket.next;
                    self.inspect_one();
                    return Some(self.node_id(i));
                }
                *ri += 1;
                if *ri >= *nrows {
                    return None;
                }
                *next = self.buckets[rows[*ri as usize] as usize].head;
            },
            NodeCursorKind::Roots { next } => {
                if *next == NIL {
                    return None;
                }
                let i = *next;
                *next = self.nodes[i as usize].root.next;
                self.inspect_one();
                Some(self.node_id(i))
            }
            NodeCursorKind::Scan { mark, pos } => {
                while (*pos as usize) < self.nodes.len() {
                    let i = *pos;
                    *pos += 1;
                    let n = &self.nodes[i as usize];
                    if n.alive {
                        self.inspect_one();
                        if *mark == n.mark || (*mark == Mark::Any && mark.matches(n.mark)) {
                            return Some(self.node_id(i));
                        }
                    }
                }
                None
            }
        }
    }

    /// Edges of `node` in the given orientation with mark `mark`; `Mark::Any`
    /// visits red, green, blue and dashed rows in that order.
    pub fn edge_cursor(&self, node: NodeId, mark: Mark, orient: Orientation) -> EdgeCursor {
        debug_assert!(mark != Mark::Grey);
        let mut rows = [0u8; 4];
        let nrows = if mark == Mark::Any {
            for (r, m) in rows.iter_mut().zip(Mark::ANY_EDGE_MARKS) {
                *r = m.edge_row() as u8;
            }
            4
        } else {
            rows[0] = mark.edge_row() as u8;
            1
        };
        let next = self.n(node).cells[rows[0] as usize][orient as usize].head;
        EdgeCursor { node: node.index, orient, rows, nrows, ri: 0, next }
    }

    pub fn next_edge(&self, cur: &mut EdgeCursor) -> Option<EdgeId> {
        loop {
            if cur.next != NIL {
                let i = cur.next;
                let e = &self.edges[i as usize];
                cur.next = match cur.orient {
                    Orientation::In => e.tgt.next,
                    _ => e.src.next,
                };
                self.inspect_one();
                return Some(self.edge_id(i));
            }
            cur.ri += 1;
            if cur.ri >= cur.nrows {
                return None;
            }
            let row = cur.rows[cur.ri as usize] as usize;
            cur.next = self.nodes[cur.node as usize].cells[row][cur.orient as usize].head;
        }
    }

    pub fn nodes_with_mark(&self, mark: Mark) -> NodeIter<'_> {
        NodeIter { g: self, cur: self.node_cursor(mark) }
    }

    pub fn root_nodes(&self) -> NodeIter<'_> {
        NodeIter { g: self, cur: self.root_cursor() }
    }

    pub fn incident_edges(&self, node: NodeId, mark: Mark, orient: Orientation) -> Result<EdgeIter<'_>, StoreError> {
        self.check_node(node)?;
        Ok(EdgeIter { g: self, cur: self.edge_cursor(node, mark, orient) })
    }

    // ---- journal frames ----

    pub fn begin_frame(&mut self) {
        self.journal.begin();
    }

    pub fn commit_frame(&mut self) {
        self.journal.commit();
    }

    /// Undo every change made since the matching [`HostGraph::begin_frame`].
    pub fn rollback_frame(&mut self) {
        let start = self.journal.close_for_rollback();
        while self.journal.log.len() > start {
            let op = self.journal.log.pop().unwrap();
            self.undo(op);
        }
        if self.journal.frames.is_empty() {
            self.journal.log.clear();
        }
    }

    pub fn frame_depth(&self) -> usize {
        self.journal.frames.len()
    }

    /// Entries recorded in the currently open frames.
    pub fn journal_len(&self) -> usize {
        self.journal.log.len()
    }

    #[inline]
    fn record(&mut self, op: impl FnOnce() -> Undo) {
        if self.journal.recording() {
            self.journal.log.push(op());
        }
    }

    // ---- mutation ----

    pub fn add_node(&mut self, label: HostValue, mark: Mark, rooted: bool) -> Result<NodeId, StoreError> {
        if !mark.is_host_node_mark() {
            return Err(StoreError::IllegalMark { mark, kind: ItemKind::Node });
        }
        let (index, fresh) = match self.free_nodes {
            Some(i) => {
                let next = self.nodes[i as usize].bucket.next;
                self.free_nodes = (next != NIL).then_some(next);
                (i, false)
            }
            None => {
                self.nodes.push(NodeSlot {
                    generation: 0,
                    alive: false,
                    matched: false,
                    rooted: false,
                    mark: Mark::None,
                    indeg: 0,
                    outdeg: 0,
                    label: HostValue::empty(),
                    bucket: Link::default(),
                    root: Link::default(),
                    cells: Default::default(),
                });
                ((self.nodes.len() - 1) as u32, true)
            }
        };
        {
            let n = &mut self.nodes[index as usize];
            n.alive = true;
            n.matched = false;
            n.rooted = false;
            n.mark = mark;
            n.label = label;
            n.indeg = 0;
            n.outdeg = 0;
            n.bucket = Link::default();
            n.root = Link::default();
        }
        push_back(&mut self.buckets[mark.node_bucket()], &mut self.nodes, bucket_link, index);
        if rooted {
            self.set_root_raw(index);
        }
        self.node_count += 1;
        self.record(|| Undo::AddNode { index, fresh });
        Ok(self.node_id(index))
    }

    fn set_root_raw(&mut self, index: u32) {
        self.nodes[index as usize].rooted = true;
        push_back(&mut self.roots, &mut self.nodes, root_link, index);
        self.root_count += 1;
    }

    fn clear_root_raw(&mut self, index: u32) -> u32 {
        self.nodes[index as usize].rooted = false;
        self.root_count -= 1;
        unlink(&mut self.roots, &mut self.nodes, root_link, index)
    }

    pub fn delete_node(&mut self, id: NodeId) -> Result<(), StoreError> {
        self.check_node(id)?;
        let index = id.index;
        let n = &self.nodes[index as usize];
        if n.indeg != 0 || n.outdeg != 0 {
            return Err(StoreError::NonzeroDegree(id));
        }
        let (mark, rooted) = (n.mark, n.rooted);
        let root_prev = if rooted { self.clear_root_raw(index) } else { NIL };
        let bucket_prev = unlink(&mut self.buckets[mark.node_bucket()], &mut self.nodes, bucket_link, index);
        let n = &mut self.nodes[index as usize];
        let label = std::mem::take(&mut n.label);
        let generation = n.generation;
        n.alive = false;
        n.matched = false;
        n.generation = n.generation.wrapping_add(1);
        n.bucket.next = self.free_nodes.unwrap_or(NIL);
        self.free_nodes = Some(index);
        self.node_count -= 1;
        if self.journal.recording() {
            self.journal.log.push(Undo::DeleteNode { index, generation, label, mark, rooted, bucket_prev, root_prev });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, src: NodeId, tgt: NodeId, label: HostValue, mark: Mark) -> Result<EdgeId, StoreError> {
        self.check_node(src)?;
        self.check_node(tgt)?;
        if !mark.is_host_edge_mark() {
            return Err(StoreError::IllegalMark { mark, kind: ItemKind::Edge });
        }
        let (index, fresh) = match self.free_edges {
            Some(i) => {
                let next = self.edges[i as usize].src.next;
                self.free_edges = (next != NIL).then_some(next);
                (i, false)
            }
            None => {
                self.edges.push(EdgeSlot {
                    generation: 0,
                    alive: false,
                    matched: false,
                    mark: Mark::None,
                    source: NIL,
                    target: NIL,
                    label: HostValue::empty(),
                    src: Link::default(),
                    tgt: Link::default(),
                });
                ((self.edges.len() - 1) as u32, true)
            }
        };
        {
            let e = &mut self.edges[index as usize];
            e.alive = true;
            e.matched = false;
            e.mark = mark;
            e.source = src.index;
            e.target = tgt.index;
            e.label = label;
            e.src = Link::default();
            e.tgt = Link::default();
        }
        self.attach_edge_at(index, None);
        self.edge_count += 1;
        self.record(|| Undo::AddEdge { index, fresh });
        Ok(self.edge_id(index))
    }

    /// Link edge `index` into its endpoint cells, at the tails or after the
    /// given (source-side, target-side) predecessors.
    fn attach_edge_at(&mut self, index: u32, after: Option<(u32, u32)>) {
        let e = &self.edges[index as usize];
        let (s, t, row) = (e.source, e.target, e.mark.edge_row());
        let cells: &[(u32, Orientation)] = if s == t {
            &[(s, Orientation::Loop)]
        } else {
            &[(s, Orientation::Out), (t, Orientation::In)]
        };
        for &(node, o) in cells {
            let list = &mut self.nodes[node as usize].cells[row][o as usize];
            match after {
                None => push_back(list, &mut self.edges, link_for(o), index),
                Some((sp, tp)) => {
                    let prev = if o == Orientation::In { tp } else { sp };
                    insert_after(list, &mut self.edges, link_for(o), index, prev)
                }
            }
        }
        self.nodes[s as usize].outdeg += 1;
        self.nodes[t as usize].indeg += 1;
    }

    /// Unlink edge `index` from its endpoint cells; returns the predecessors.
    fn detach_edge(&mut self, index: u32) -> (u32, u32) {
        let e = &self.edges[index as usize];
        let (s, t, row) = (e.source, e.target, e.mark.edge_row());
        let (sp, tp) = if s == t {
            let list = &mut self.nodes[s as usize].cells[row][Orientation::Loop as usize];
            (unlink(list, &mut self.edges, src_link, index), NIL)
        } else {
            let list = &mut self.nodes[s as usize].cells[row][Orientation::Out as usize];
            let sp = unlink(list, &mut self.edges, src_link, index);
            let list = &mut self.nodes[t as usize].cells[row][Orientation::In as usize];
            (sp, unlink(list, &mut self.edges, tgt_link, index))
        };
        self.nodes[s as usize].outdeg -= 1;
        self.nodes[t as usize].indeg -= 1;
        (sp, tp)
    }

    pub fn delete_edge(&mut self, id: EdgeId) -> Result<(), StoreError> {
        self.check_edge(id)?;
        let index = id.index;
        let (src_prev, tgt_prev) = self.detach_edge(index);
        let e = &mut self.edges[index as usize];
        let label = std::mem::take(&mut e.label);
        let (generation, mark, source, target) = (e.generation, e.mark, e.source, e.target);
        e.alive = false;
        e.matched = false;
        e.generation = e.generation.wrapping_add(1);
        e.src.next = self.free_edges.unwrap_or(NIL);
        self.free_edges = Some(index);
        self.edge_count -= 1;
        if self.journal.recording() {
            self.journal.log.push(Undo::DeleteEdge {
                index,
                generation,
                label,
                mark,
                source,
                target,
                src_prev,
                tgt_prev,
            });
        }
        Ok(())
    }

    /// Change any of label, mark and rootedness. Unchanged fields cost nothing.
    pub fn update_node(
        &mut self,
        id: NodeId,
        label: Option<HostValue>,
        mark: Option<Mark>,
        rooted: Option<bool>,
    ) -> Result<(), StoreError> {
        self.check_node(id)?;
        if let Some(m) = mark {
            if !m.is_host_node_mark() {
                return Err(StoreError::IllegalMark { mark: m, kind: ItemKind::Node });
            }
        }
        let index = id.index;
        if let Some(l) = label {
            let old = std::mem::replace(&mut self.nodes[index as usize].label, l);
            self.record(|| Undo::NodeLabel { index, label: old });
        }
        if let Some(m) = mark {
            let old = self.nodes[index as usize].mark;
            if m != old {
                let bucket_prev = self.move_bucket(index, old, m);
                self.record(|| Undo::NodeMark { index, mark: old, bucket_prev });
            }
        }
        if let Some(r) = rooted {
            if r != self.nodes[index as usize].rooted {
                let root_prev = if r {
                    self.set_root_raw(index);
                    NIL
                } else {
                    self.clear_root_raw(index)
                };
                self.record(|| Undo::NodeRoot { index, rooted: !r, root_prev });
            }
        }
        Ok(())
    }

    fn move_bucket(&mut self, index: u32, old: Mark, new: Mark) -> u32 {
        let prev = unlink(&mut self.buckets[old.node_bucket()], &mut self.nodes, bucket_link, index);
        push_back(&mut self.buckets[new.node_bucket()], &mut self.nodes, bucket_link, index);
        self.nodes[index as usize].mark = new;
        prev
    }

    pub fn update_edge(&mut self, id: EdgeId, label: Option<HostValue>, mark: Option<Mark>) -> Result<(), StoreError> {
        self.check_edge(id)?;
        if let Some(m) = mark {
            if !m.is_host_edge_mark() {
                return Err(StoreError::IllegalMark { mark: m, kind: ItemKind::Edge });
            }
        }
        let index = id.index;
        if let Some(l) = label {
            let old = std::mem::replace(&mut self.edges[index as usize].label, l);
            self.record(|| Undo::EdgeLabel { index, label: old });
        }
        if let Some(m) = mark {
            let old = self.edges[index as usize].mark;
            if m != old {
                let (src_prev, tgt_prev) = self.detach_edge(index);
                self.edges[index as usize].mark = m;
                self.attach_edge_at(index, None);
                self.record(|| Undo::EdgeMark { index, mark: old, src_prev, tgt_prev });
            }
        }
        Ok(())
    }

    // ---- undo ----

    fn undo(&mut self, op: Undo) {
        match op {
            Undo::AddNode { index, fresh } => {
                let n = &self.nodes[index as usize];
                debug_assert!(n.alive && n.indeg == 0 && n.outdeg == 0);
                let (mark, rooted) = (n.mark, n.rooted);
                if rooted {
                    self.clear_root_raw(index);
                }
                unlink(&mut self.buckets[mark.node_bucket()], &mut self.nodes, bucket_link, index);
                self.node_count -= 1;
                if fresh {
                    debug_assert_eq!(index as usize, self.nodes.len() - 1);
                    self.nodes.pop();
                } else {
                    let n = &mut self.nodes[index as usize];
                    n.alive = false;
                    n.label = HostValue::empty();
                    n.bucket.next = self.free_nodes.unwrap_or(NIL);
                    self.free_nodes = Some(index);
                }
            }
            Undo::DeleteNode { index, generation, label, mark, rooted, bucket_prev, root_prev } => {
                debug_assert_eq!(self.free_nodes, Some(index));
                let next = self.nodes[index as usize].bucket.next;
                self.free_nodes = (next != NIL).then_some(next);
                let n = &mut self.nodes[index as usize];
                n.alive = true;
                n.generation = generation;
                n.label = label;
                n.mark = mark;
                n.rooted = rooted;
                n.bucket = Link::default();
                n.root = Link::default();
                insert_after(&mut self.buckets[mark.node_bucket()], &mut self.nodes, bucket_link, index, bucket_prev);
                if rooted {
                    insert_after(&mut self.roots, &mut self.nodes, root_link, index, root_prev);
                    self.root_count += 1;
                }
                self.node_count += 1;
            }
            Undo::AddEdge { index, fresh } => {
                self.detach_edge(index);
                self.edge_count -= 1;
                if fresh {
                    debug_assert_eq!(index as usize, self.edges.len() - 1);
                    self.edges.pop();
                } else {
                    let e = &mut self.edges[index as usize];
                    e.alive = false;
                    e.label = HostValue::empty();
                    e.src.next = self.free_edges.unwrap_or(NIL);
                    self.free_edges = Some(index);
                }
            }
            Undo::DeleteEdge { index, generation, label, mark, source, target, src_prev, tgt_prev } => {
                debug_assert_eq!(self.free_edges, Some(index));
                let next = self.edges[index as usize].src.next;
                self.free_edges = (next != NIL).then_some(next);
                let e = &mut self.edges[index as usize];
                e.alive = true;
                e.generation = generation;
                e.label = label;
                e.mark = mark;
                e.source = source;
                e.target = target;
                e.src = Link::default();
                e.tgt = Link::default();
                self.attach_edge_at(index, Some((src_prev, tgt_prev)));
                self.edge_count += 1;
            }
            Undo::NodeLabel { index, label } => self.nodes[index as usize].label = label,
            Undo::NodeMark { index, mark, bucket_prev } => {
                let cur = self.nodes[index as usize].mark;
                unlink(&mut self.buckets[cur.node_bucket()], &mut self.nodes, bucket_link, index);
                insert_after(&mut self.buckets[mark.node_bucket()], &mut self.nodes, bucket_link, index, bucket_prev);
                self.nodes[index as usize].mark = mark;
            }
            Undo::NodeRoot { index, rooted, root_prev } => {
                if rooted {
                    self.nodes[index as usize].rooted = true;
                    insert_after(&mut self.roots, &mut self.nodes, root_link, index, root_prev);
                    self.root_count += 1;
                } else {
                    self.clear_root_raw(index);
                }
            }
            Undo::EdgeLabel { index, label } => self.edges[index as usize].label = label,
            Undo::EdgeMark { index, mark, src_prev, tgt_prev } => {
                self.detach_edge(index);
                self.edges[index as usize].mark = mark;
                self.attach_edge_at(index, Some((src_prev, tgt_prev)));
            }
        }
    }

    // ---- diagnostics ----

    /// Full-scan consistency check of every structural invariant.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut seen = vec![0u8; self.nodes.len()];
        let mut count = 0;
        for (b, m) in NODE_BUCKETS.iter().enumerate() {
            let mut prev = NIL;
            let mut i = self.buckets[b].head;
            while i != NIL {
                let n = &self.nodes[i as usize];
                if !n.alive || n.mark != *m {
                    return Err(format!("slot {i} misfiled in bucket {m}"));
                }
                if n.bucket.prev != prev {
                    return Err(format!("bad back link at slot {i}"));
                }
                seen[i as usize] += 1;
                count += 1;
                prev = i;
                i = n.bucket.next;
            }
            if self.buckets[b].tail != prev {
                return Err(format!("bad tail in bucket {m}"));
            }
        }
        if count != self.node_count {
            return Err(format!("bucket total {count} != node count {}", self.node_count));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.alive && seen[i] != 1 {
                return Err(format!("slot {i} in {} buckets", seen[i]));
            }
        }
        let mut roots = 0;
        let mut i = self.roots.head;
        while i != NIL {
            let n = &self.nodes[i as usize];
            if !n.alive || !n.rooted {
                return Err(format!("slot {i} in root list but not a live root"));
            }
            roots += 1;
            i = n.root.next;
        }
        let rooted = self.nodes.iter().filter(|n| n.alive && n.rooted).count();
        if roots != rooted || roots != self.root_count {
            return Err(format!("root list {roots}, rooted {rooted}, count {}", self.root_count));
        }
        let mut indeg = vec![0u32; self.nodes.len()];
        let mut outdeg = vec![0u32; self.nodes.len()];
        let mut cell_hits = vec![0u32; self.edges.len()];
        for (ni, n) in self.nodes.iter().enumerate() {
            if !n.alive {
                if n.cells.iter().flatten().any(|c| !c.is_empty()) {
                    return Err(format!("dead slot {ni} has edges"));
                }
                continue;
            }
            for (r, m) in EDGE_ROWS.iter().enumerate() {
                for o in Orientation::ALL {
                    let mut i = n.cells[r][o as usize].head;
                    while i != NIL {
                        let e = &self.edges[i as usize];
                        let ok = e.alive
                            && e.mark == *m
                            && match o {
                                Orientation::Out => e.source as usize == ni && e.target as usize != ni,
                                Orientation::In => e.target as usize == ni && e.source as usize != ni,
                                Orientation::Loop => e.source as usize == ni && e.target as usize == ni,
                            };
                        if !ok {
                            return Err(format!("edge slot {i} misfiled at node {ni} row {m} {o:?}"));
                        }
                        cell_hits[i as usize] += 1;
                        i = match o {
                            Orientation::In => e.tgt.next,
                            _ => e.src.next,
                        };
                    }
                }
            }
        }
        let mut edges = 0;
        for (i, e) in self.edges.iter().enumerate() {
            if !e.alive {
                continue;
            }
            edges += 1;
            if !self.nodes[e.source as usize].alive || !self.nodes[e.target as usize].alive {
                return Err(format!("edge slot {i} dangles"));
            }
            let want = if e.source == e.target { 1 } else { 2 };
            if cell_hits[i] != want {
                return Err(format!("edge slot {i} in {} cells", cell_hits[i]));
            }
            outdeg[e.source as usize] += 1;
            indeg[e.target as usize] += 1;
        }
        if edges != self.edge_count {
            return Err(format!("edge count {} != {edges}", self.edge_count));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.alive && (n.indeg != indeg[i] || n.outdeg != outdeg[i]) {
                return Err(format!("degree mismatch at slot {i}"));
            }
        }
        Ok(())
    }
}

pub struct NodeIter<'a> {
    g: &'a HostGraph,
    cur: NodeCursor,
}

impl Iterator for NodeIter<'_> {
    type Item = NodeId;
    fn next(&mut self) -> Option<NodeId> {
        self.g.next_node(&mut self.cur)
    }
}

pub struct EdgeIter<'a> {
    g: &'a HostGraph,
    cur: EdgeCursor,
}

impl Iterator for EdgeIter<'_> {
    type Item = EdgeId;
    fn next(&mut self) -> Option<EdgeId> {
        self.g.next_edge(&mut self.cur)
    }
}
